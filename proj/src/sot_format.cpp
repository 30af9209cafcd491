#include "glsc/sot_format.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "glsc/error.hpp"
#include "glsc/utf8.hpp"

namespace glsc {

namespace {

constexpr std::string_view kSdrToken = "<|SDR|>";
constexpr std::string_view kGlscToken = "<|GLSC|>";

bool needs_escape(unsigned char c) { return c == '<' || c == '|' || c == '\\' || c < 0x20 || c == 0x7f; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string render_item(const SotItem& item, double resolution) {
  return fmt::format("<|ts:{}|><|ts:{}|><|spk:{}|>{}", format_timestamp(item.start, resolution),
                     format_timestamp(item.end, resolution), escape_payload(item.speaker),
                     escape_payload(item.text));
}

class Parser {
 public:
  Parser(std::string_view input, bool lenient) : lenient_(lenient) {
    if (auto bad = utf8::first_invalid(input)) {
      if (!lenient_) throw ParseError(*bad, "invalid UTF-8");
      result_.diagnostics.push_back({*bad, "invalid UTF-8 replaced by U+FFFD"});
      for (char32_t cp : utf8::decode_lossy(input)) utf8::append(repaired_, cp);
      input_ = repaired_;
    } else {
      input_ = input;
    }
  }

  SotParseResult run() {
    std::size_t pos = 0;
    bool have_task = false;
    while (pos < input_.size()) {
      if (input_.compare(pos, 2, "<|") == 0) {
        const auto close = input_.find("|>", pos + 2);
        const auto reopen = input_.find('<', pos + 2);
        if (close == std::string_view::npos || reopen < close) {
          problem(pos, "unterminated tag");
          pos = reopen == std::string_view::npos ? input_.size() : reopen;
          continue;
        }
        const auto body = input_.substr(pos + 2, close - pos - 2);
        if (!have_task) {
          if (body == "SDR" || body == "GLSC") {
            if (pos != 0) problem(0, "text before task token");
            have_task = true;
            result_.sequence.task = body == "SDR" ? SotTask::kSdr : SotTask::kGlsc;
          } else {
            // Lenient: anything before the task token is skipped.
            problem(pos, "expected task token");
          }
        } else {
          on_tag(body, pos);
        }
        pos = close + 2;
        continue;
      }
      auto next = input_.find("<|", pos + 1);
      if (next == std::string_view::npos) next = input_.size();
      if (!have_task) {
        problem(pos, "expected task token");
      } else {
        on_text(input_.substr(pos, next - pos), pos);
      }
      pos = next;
    }
    if (!have_task) {
      problem(input_.size(), "missing task token");
      result_.sequence.task = SotTask::kSdr;
    }
    finish();
    return std::move(result_);
  }

 private:
  enum class State { kIdle, kAfterStart, kAfterEnd, kInText, kSkipping, kGlscText };

  void problem(std::size_t offset, const std::string& message) {
    if (!lenient_) throw ParseError(offset, message);
    result_.diagnostics.push_back({offset, message});
  }

  // Decodes escapes; reports raw reserved characters.
  std::string unescape(std::string_view raw, std::size_t base) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto c = static_cast<unsigned char>(raw[i]);
      if (c == '\\') {
        char32_t cp = 0;
        bool ok = raw.size() - i >= 6 && raw[i + 1] == 'u';
        if (ok) {
          for (std::size_t k = 2; k < 6; ++k) {
            const int h = hex_value(raw[i + k]);
            if (h < 0) {
              ok = false;
              break;
            }
            cp = cp * 16 + static_cast<char32_t>(h);
          }
        }
        if (ok && cp >= 0xD800 && cp <= 0xDFFF) ok = false;
        if (!ok) {
          problem(base + i, "bad escape");
          out += '\\';
          continue;
        }
        utf8::append(out, cp);
        i += 5;
        continue;
      }
      if (c == '<' || c == '|' || c < 0x20 || c == 0x7f) problem(base + i, "unescaped reserved character");
      out += static_cast<char>(c);
    }
    return out;
  }

  std::optional<double> parse_time(std::string_view value, std::size_t offset) {
    std::size_t i = 0;
    while (i < value.size() && value[i] >= '0' && value[i] <= '9') ++i;
    bool ok = i > 0;
    if (ok && i < value.size()) {
      ok = value[i] == '.' && i + 1 < value.size();
      for (std::size_t k = i + 1; ok && k < value.size(); ++k) ok = value[k] >= '0' && value[k] <= '9';
    }
    double t = 0.0;
    if (ok) {
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t);
      ok = ec == std::errc() && ptr == value.data() + value.size() && std::isfinite(t);
    }
    if (!ok) {
      problem(offset, "bad timestamp '" + std::string(value) + "'");
      return std::nullopt;
    }
    return t;
  }

  void close_item() {
    if (state_ == State::kInText) {
      auto& items = result_.sequence.items;
      if (current_.end < current_.start) {
        problem(item_offset_, "end before start");
        current_.end = current_.start;
      }
      if (!items.empty() && current_.start < items.back().start) {
        problem(item_offset_, "items out of start order");
        unsorted_ = true;
      }
      items.push_back(std::move(current_));
    } else if (state_ == State::kAfterStart || state_ == State::kAfterEnd) {
      problem(item_offset_, "item without speaker dropped");
    }
    current_ = SotItem{};
    state_ = State::kIdle;
  }

  void on_tag(std::string_view body, std::size_t offset) {
    const std::size_t value_offset = offset + 2;
    if (body == "SDR" || body == "GLSC") {
      problem(offset, "repeated task token");
      return;
    }
    const bool is_ts = body.substr(0, 3) == "ts:";
    const bool is_spk = body.substr(0, 4) == "spk:";
    if (!is_ts && !is_spk) {
      problem(offset, "unknown tag");
      return;
    }
    if (result_.sequence.task == SotTask::kGlsc) {
      on_glsc_tag(body, is_spk, offset, value_offset);
      return;
    }
    if (is_ts) {
      const auto t = parse_time(body.substr(3), value_offset + 3);
      if (!t) return;
      if (state_ == State::kAfterStart) {
        current_.end = *t;
        state_ = State::kAfterEnd;
      } else {
        close_item();
        current_.start = *t;
        item_offset_ = offset;
        state_ = State::kAfterStart;
      }
      return;
    }
    if (state_ == State::kAfterStart) {
      problem(offset, "missing end timestamp");
      current_.end = current_.start;
      state_ = State::kAfterEnd;
    }
    if (state_ != State::kAfterEnd) {
      problem(offset, "speaker tag without timestamps");
      close_item();
      state_ = State::kSkipping;
      return;
    }
    auto label = unescape(body.substr(4), value_offset + 4);
    if (label.empty()) {
      problem(offset, "empty speaker label");
      current_ = SotItem{};
      state_ = State::kSkipping;
      return;
    }
    current_.speaker = std::move(label);
    state_ = State::kInText;
  }

  void on_glsc_tag(std::string_view body, bool is_spk, std::size_t offset, std::size_t value_offset) {
    if (!is_spk) {
      problem(offset, "timestamp in GLSC sequence");
      return;
    }
    if (state_ != State::kIdle) {
      problem(offset, "repeated speaker tag");
      state_ = State::kSkipping;
      return;
    }
    auto label = unescape(body.substr(4), value_offset + 4);
    try {
      label = compose_label(parse_label(label));
    } catch (const Error&) {
      problem(value_offset + 4, "malformed composite label");
    }
    result_.sequence.items.push_back(SotItem{0.0, 0.0, std::move(label), {}});
    state_ = State::kGlscText;
  }

  void on_text(std::string_view raw, std::size_t offset) {
    if (state_ == State::kInText) {
      current_.text += unescape(raw, offset);
    } else if (state_ == State::kGlscText) {
      result_.sequence.items.back().text += unescape(raw, offset);
    } else {
      problem(offset, "stray text");
    }
  }

  void finish() {
    if (result_.sequence.task == SotTask::kGlsc) {
      if (result_.sequence.items.empty()) problem(input_.size(), "missing speaker tag");
      return;
    }
    close_item();
    if (unsorted_) {
      std::stable_sort(result_.sequence.items.begin(), result_.sequence.items.end(),
                       [](const SotItem& a, const SotItem& b) { return a.start < b.start; });
    }
  }

  bool lenient_;
  std::string repaired_;
  std::string_view input_;
  SotParseResult result_;
  State state_ = State::kIdle;
  SotItem current_;
  std::size_t item_offset_ = 0;
  bool unsorted_ = false;
};

}  // namespace

std::string_view task_token(SotTask task) { return task == SotTask::kSdr ? kSdrToken : kGlscToken; }

std::string escape_payload(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (needs_escape(c)) {
      out += fmt::format("\\u{:04x}", c);
    } else {
      out += ch;
    }
  }
  return out;
}

int resolution_decimals(double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw Error(ErrorCode::kInvalidArgument, "timestamp resolution must be positive");
  }
  double scaled = resolution;
  for (int d = 0; d < 9; ++d, scaled *= 10.0) {
    if (std::fabs(scaled - std::round(scaled)) <= 1e-9 * std::max(1.0, scaled)) return d;
  }
  return 9;
}

std::string format_timestamp(double seconds, double resolution) {
  const int decimals = resolution_decimals(resolution);
  const double q = std::round(seconds / resolution) * resolution;
  return fmt::format("{:.{}f}", q == 0.0 ? 0.0 : q, decimals);
}

double quantize_timestamp(double seconds, double resolution) {
  const auto text = format_timestamp(seconds, resolution);
  double value = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  return value;
}

SotSequence sdr_sequence(const TurnGroup& group, double resolution) {
  if (group.utterances.empty()) throw Error(ErrorCode::kInvalidArgument, "empty turn group");
  SotSequence seq{SotTask::kSdr, {}};
  for (std::size_t idx : chronological_order(group.utterances)) {
    const auto& u = group.utterances[idx];
    const double rel_start = u.start - group.start;
    const double rel_end = u.end - group.start;
    if (rel_start < 0.0 || rel_end < 0.0) {
      throw Error(ErrorCode::kNegativeRelativeTime,
                  fmt::format("utterance at {} precedes its group start {}", u.start, group.start));
    }
    seq.items.push_back(SotItem{quantize_timestamp(rel_start, resolution),
                                quantize_timestamp(rel_end, resolution), u.speaker_id, u.text});
  }
  return seq;
}

std::string serialize_sdr(const TurnGroup& group, double resolution) {
  return serialize(sdr_sequence(group, resolution), resolution);
}

std::string serialize_glsc(const SegmentRecord& segment, GlscLabel label) {
  return std::string(kGlscToken) + "<|spk:" + compose_label(label) + "|>" + escape_payload(segment.ref_text);
}

std::string serialize(const SotSequence& sequence, double resolution) {
  std::string out(task_token(sequence.task));
  if (sequence.task == SotTask::kGlsc) {
    for (const auto& item : sequence.items) {
      out += "<|spk:" + escape_payload(item.speaker) + "|>" + escape_payload(item.text);
    }
    return out;
  }
  for (const auto& item : sequence.items) out += render_item(item, resolution);
  return out;
}

SotParseResult parse_sot(std::string_view sequence, bool lenient) {
  return Parser(sequence, lenient).run();
}

std::vector<Utterance> sot_utterances(const SotSequence& sequence, const std::string& session_id,
                                      double offset) {
  std::vector<Utterance> out;
  for (const auto& item : sequence.items) {
    out.push_back(Utterance{session_id, item.speaker, offset + item.start, offset + item.end, item.text});
  }
  return out;
}

}  // namespace glsc
