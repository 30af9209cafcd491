#include "doctest.h"

#include <random>

#include "glsc/error.hpp"
#include "glsc/glsc_pipeline.hpp"
#include "glsc/perm_metrics.hpp"
#include "glsc/sot_format.hpp"
#include "support.hpp"

using namespace glsc;

namespace {

std::size_t strict_offset(std::string_view text) {
  try {
    parse_sot(text, false);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("strict parse accepted " << text);
  return 0;
}

TurnGroup group_of(const Session& s) {
  auto groups = turn_group_segmentation(s, 100.0, 1e9);
  REQUIRE(groups.size() == 1);
  return groups.front();
}

std::string random_text(std::mt19937_64& gen) {
  static const std::vector<std::string> pieces{"a", "b", " ", "<", "|", ">", "\\", "u", "\t", "\n",
                                               "\x7f", "\xc3\xa9", "\xe4\xbd\xa0", "<|", "|>", "0"};
  std::string out;
  const std::size_t n = gen() % 8;
  for (std::size_t i = 0; i < n; ++i) out += pieces[gen() % pieces.size()];
  return out;
}

}  // namespace

TEST_CASE("sdr serialization example") {
  const auto s = test::session("m", {{"A", 10.0, 11.2, "hi"}});
  CHECK(serialize_sdr(group_of(s)) == "<|SDR|><|ts:0.0|><|ts:1.2|><|spk:A|>hi");
  const auto two = test::session("m", {{"B", 12.04, 13.0, "b"}, {"A", 10.0, 11.0, "a"}});
  CHECK(serialize_sdr(group_of(two)) == "<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a<|ts:2.0|><|ts:3.0|><|spk:B|>b");
  CHECK(serialize_sdr(group_of(two), 0.25) ==
        "<|SDR|><|ts:0.00|><|ts:1.00|><|spk:A|>a<|ts:2.00|><|ts:3.00|><|spk:B|>b");
}

TEST_CASE("sdr serialization errors") {
  CHECK_THROWS_AS(serialize_sdr(TurnGroup{}), Error);
  auto g = group_of(test::session("m", {{"A", 1.0, 2.0, "x"}}));
  g.start = 1.5;
  try {
    serialize_sdr(g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNegativeRelativeTime);
  }
}

TEST_CASE("glsc serialization example") {
  SegmentRecord seg{"m_0000", "m", "A", 0, 1, "hello world", "hello"};
  CHECK(serialize_glsc(seg, {3, 1}) == "<|GLSC|><|spk:G3-L1|>hello world");
  const auto parsed = parse_sot(serialize_glsc(seg, {3, 1}), false).sequence;
  CHECK(parsed.task == SotTask::kGlsc);
  REQUIRE(parsed.items.size() == 1);
  CHECK(parse_label(parsed.items[0].speaker) == GlscLabel{3, 1});
  CHECK(parsed.items[0].text == "hello world");
}

TEST_CASE("escaping") {
  CHECK(escape_payload("a<b") == "a\\u003cb");
  CHECK(escape_payload("x|y\\z") == "x\\u007cy\\u005cz");
  CHECK(escape_payload("t\tn\n") == "t\\u0009n\\u000a");
  CHECK(escape_payload("\xe4\xbd\xa0>") == "\xe4\xbd\xa0>");
  const auto s = test::session("m", {{"A", 0, 1, "1<2"}});
  const auto text = serialize_sdr(group_of(s));
  CHECK(text == "<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>1\\u003c2");
  CHECK(parse_sot(text, false).sequence.items[0].text == "1<2");
}

TEST_CASE("timestamps") {
  CHECK(resolution_decimals(0.1) == 1);
  CHECK(resolution_decimals(0.25) == 2);
  CHECK(resolution_decimals(1.0) == 0);
  CHECK(resolution_decimals(0.01) == 2);
  CHECK_THROWS_AS(resolution_decimals(0.0), Error);
  CHECK(format_timestamp(1.24) == "1.2");
  CHECK(format_timestamp(1.26) == "1.3");
  CHECK(format_timestamp(-0.01) == "0.0");
  CHECK(format_timestamp(0.37, 0.25) == "0.25");
  CHECK(format_timestamp(0.38, 0.25) == "0.50");
  CHECK(quantize_timestamp(2.04) == 2.0);
}

TEST_CASE("lenient parse repairs a missing end timestamp") {
  const std::string text = "<|SDR|><|ts:0.0|><|spk:A|>hi";
  const auto r = parse_sot(text, true);
  REQUIRE(r.sequence.items.size() == 1);
  CHECK(r.sequence.items[0] == SotItem{0.0, 0.0, "A", "hi"});
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].offset == 17);
  CHECK(strict_offset(text) == 17);
}

TEST_CASE("strict parse reports the first violation") {
  CHECK(strict_offset("") == 0);
  CHECK(strict_offset("x<|SDR|>") == 0);
  CHECK(strict_offset("<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a<b") == 37);
  CHECK(strict_offset("<|SDR|><|ts:1.0|><|ts:0.5|><|spk:A|>a") == 7);
  CHECK(strict_offset("<|SDR|><|ts:1.0|><|ts:2.0|><|spk:A|>a<|ts:0.0|><|ts:1.0|><|spk:B|>b") == 37);
  CHECK(strict_offset("<|SDR|><|ts:1.|><|ts:2.0|><|spk:A|>a") == 12);
  CHECK(strict_offset("<|SDR|><|ts:-1|><|ts:2.0|><|spk:A|>a") == 12);
  CHECK(strict_offset("<|SDR|><|foo|>") == 7);
  CHECK(strict_offset("<|SDR|><|SDR|>") == 7);
  CHECK(strict_offset("<|SDR|>stray") == 7);
  CHECK(strict_offset("<|SDR|><|ts:0.0|><|ts:1.0|>") == 7);
  CHECK(strict_offset("<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a\\u12") == 37);
  CHECK(strict_offset("<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a\xff") == 37);
  CHECK(strict_offset("<|GLSC|><|spk:G1L0|>x") == 14);
  CHECK(strict_offset("<|GLSC|>") == 8);
  CHECK(strict_offset("<|GLSC|><|ts:0.0|><|spk:G1-L0|>x") == 8);
}

TEST_CASE("lenient repairs") {
  auto r = parse_sot("<|SDR|><|ts:2.0|><|ts:3.0|><|spk:B|>b<|ts:0.0|><|ts:1.0|><|spk:A|>a", true);
  REQUIRE(r.sequence.items.size() == 2);
  CHECK(r.sequence.items[0].speaker == "A");
  CHECK(r.diagnostics.size() == 1);

  r = parse_sot("junk<|SDR|>stray<|ts:0.0|><|ts:1.0|>x<|bogus|><|spk:A|>ok<|ts:1.0|><|ts:2.0|>", true);
  REQUIRE(r.sequence.items.size() == 1);
  CHECK(r.sequence.items[0].text == "ok");
  CHECK(r.diagnostics.size() >= 4);

  r = parse_sot("<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a\xffz", true);
  REQUIRE(r.sequence.items.size() == 1);
  CHECK(r.sequence.items[0].text == "a\xef\xbf\xbdz");

  r = parse_sot("no tags at all", true);
  CHECK(r.sequence.items.empty());
  CHECK(!r.diagnostics.empty());
}

TEST_CASE("round trips") {
  std::mt19937_64 gen(61);
  for (int t = 0; t < 300; ++t) {
    SotSequence seq{SotTask::kSdr, {}};
    double clock = 0.0;
    const std::size_t n = gen() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      clock += static_cast<double>(gen() % 20) / 10.0;
      const double end = clock + static_cast<double>(gen() % 30) / 10.0;
      std::string spk = random_text(gen);
      if (spk.empty()) spk = "S";
      seq.items.push_back({quantize_timestamp(clock), quantize_timestamp(end), spk, random_text(gen)});
    }
    const auto text = serialize(seq);
    const auto back = parse_sot(text, false).sequence;
    REQUIRE(back == seq);
    REQUIRE(serialize(back) == text);
  }
}

TEST_CASE("parsers never misbehave on arbitrary input") {
  std::mt19937_64 gen(62);
  const std::vector<std::string> pieces{"<|SDR|>", "<|GLSC|>", "<|ts:", "<|spk:", "|>", "<|", "0.5", "1", ".",
                                        "G2-L1", "A", "\\u003c", "\\u", "\xff", "\xc3", "<", "|", " ", "-"};
  for (int t = 0; t < 2000; ++t) {
    std::string text;
    const std::size_t n = gen() % 14;
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 5 == 0) {
        text += static_cast<char>(gen() % 256);
      } else {
        text += pieces[gen() % pieces.size()];
      }
    }
    bool strict_ok = true;
    try {
      parse_sot(text, false);
    } catch (const ParseError& e) {
      strict_ok = false;
      REQUIRE(e.offset() <= text.size());
    }
    SotParseResult lenient;
    REQUIRE_NOTHROW(lenient = parse_sot(text, true));
    if (strict_ok) REQUIRE(lenient.diagnostics.empty());
    if (lenient.sequence.task == SotTask::kSdr) {
      REQUIRE_NOTHROW(parse_sot(serialize(lenient.sequence), false));
    }
  }
}

TEST_CASE("sot transcripts score against themselves") {
  const auto s = test::session("m", {{"A", 3.0, 4.0, "a b"}, {"B", 4.0, 5.5, "c"}, {"A", 6.0, 7.0, "d e"}});
  const auto g = group_of(s);
  const auto parsed = parse_sot(serialize_sdr(g), false).sequence;
  Session back{"m", sot_utterances(parsed, "m", g.start)};
  CHECK(back.utterances[1].start == doctest::Approx(4.0));
  const auto r = cpwer(s, back, TokenMode::kWord);
  CHECK(r.errors == 0);
  CHECK(r.ref_len == 5);
}
