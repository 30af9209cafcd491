#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/transcript.hpp"

namespace glsc::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::vector<std::string_view> split(std::string_view line, char sep);

// Lines without terminators ('\r' stripped); blank and '#' lines are skipped.
// Pairs carry the 1-based line number for error messages.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text);

double parse_seconds(std::string_view field, std::size_t line_no);

// Shortest decimal that round-trips the double.
std::string format_seconds(double seconds);

/// `session_id<TAB>speaker_id<TAB>start<TAB>end<TAB>text` rows. Sessions are
/// returned in order of first appearance; utterances keep file order.
std::vector<Session> parse_sessions_tsv(std::string_view text);
std::string render_sessions_tsv(const std::vector<Session>& sessions);

/// `segment_id<TAB>hyp_text` rows.
std::map<std::string, std::string> parse_hyps_tsv(std::string_view text);

}  // namespace glsc::io
