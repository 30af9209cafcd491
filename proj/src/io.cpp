#include "glsc/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_map>

#include "glsc/error.hpp"
#include "glsc/utf8.hpp"

namespace glsc::io {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& message) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + message);
}

void require_utf8(std::string_view text) {
  if (auto bad = utf8::first_invalid(text)) {
    throw Error(ErrorCode::kParse, "invalid UTF-8 at byte " + std::to_string(*bad));
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(sep, begin);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    ++line_no;
    begin = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line_no, line);
  }
  return out;
}

double parse_seconds(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    fail(line_no, "bad time value '" + std::string(field) + "'");
  }
  return value;
}

std::string format_seconds(double seconds) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), seconds);
  return std::string(buf.data(), end);
}

std::vector<Session> parse_sessions_tsv(std::string_view text) {
  require_utf8(text);
  std::vector<Session> sessions;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& [line_no, line] : data_lines(text)) {
    const auto fields = split(line, '\t');
    if (fields.size() != 5) fail(line_no, "expected 5 tab-separated fields");
    Utterance u;
    u.session_id = std::string(fields[0]);
    u.speaker_id = std::string(fields[1]);
    u.start = parse_seconds(fields[2], line_no);
    u.end = parse_seconds(fields[3], line_no);
    u.text = std::string(fields[4]);
    if (u.session_id.empty()) fail(line_no, "empty session id");
    if (u.speaker_id.empty()) fail(line_no, "empty speaker id");
    if (u.start < 0.0 || u.end < u.start) fail(line_no, "invalid time interval");
    auto [it, inserted] = index.try_emplace(u.session_id, sessions.size());
    if (inserted) sessions.push_back(Session{u.session_id, {}});
    sessions[it->second].utterances.push_back(std::move(u));
  }
  return sessions;
}

std::string render_sessions_tsv(const std::vector<Session>& sessions) {
  std::string out;
  for (const auto& s : sessions) {
    for (const auto& u : s.utterances) {
      out += u.session_id + '\t' + u.speaker_id + '\t' + format_seconds(u.start) + '\t' +
             format_seconds(u.end) + '\t' + u.text + '\n';
    }
  }
  return out;
}

std::map<std::string, std::string> parse_hyps_tsv(std::string_view text) {
  require_utf8(text);
  std::map<std::string, std::string> hyps;
  for (const auto& [line_no, line] : data_lines(text)) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) fail(line_no, "expected segment_id<TAB>hyp_text");
    std::string id(line.substr(0, tab));
    if (id.empty()) fail(line_no, "empty segment id");
    if (!hyps.emplace(std::move(id), std::string(line.substr(tab + 1))).second) {
      fail(line_no, "duplicate segment id");
    }
  }
  return hyps;
}

}  // namespace glsc::io
