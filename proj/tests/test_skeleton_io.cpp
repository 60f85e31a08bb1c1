#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "jtm/error.hpp"
#include "jtm/skeleton_io.hpp"
#include "oracles.hpp"

using namespace jtm;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("plain text: two frames of one joint") {
  const auto seq = parse_sequence(std::string_view("0 0 1\n0 1 1"), SequenceFormat::kPlainXyz);
  CHECK(seq.frame_count() == 2);
  CHECK(seq.joint_count == 1);
  CHECK(seq.at(1, 0) == Point3{0, 1, 1});
}

TEST_CASE("plain text: comments, commas and a declared joint count") {
  ParseOptions opts;
  opts.plain_joint_count = 2;
  const auto seq = parse_sequence(std::string_view("# header\n1,2,3, 4 5 6\n\n7 8 9 10 11 12\n"),
                                  SequenceFormat::kPlainXyz, opts);
  CHECK(seq.frame_count() == 2);
  CHECK(seq.at(0, 1) == Point3{4, 5, 6});
  CHECK(seq.at(1, 0) == Point3{7, 8, 9});
}

TEST_CASE("wrong joint count is a SHAPE error") {
  std::string text;
  for (int f = 0; f < 2; ++f) {
    const int joints = f == 0 ? 20 : 19;
    for (int k = 0; k < joints; ++k) text += "0 0 1 ";
    text += "\n";
  }
  ParseOptions opts;
  opts.plain_joint_count = 20;
  CHECK(code_of([&] { parse_sequence(std::string_view(text), SequenceFormat::kPlainXyz, opts); }) ==
        ErrorCode::kShape);
}

TEST_CASE("malformed input is a SYNTAX error, NaN is NONFINITE") {
  CHECK(code_of([] { parse_sequence(std::string_view("0 x 1"), SequenceFormat::kPlainXyz); }) ==
        ErrorCode::kSyntax);
  CHECK(code_of([] { parse_sequence(std::string_view("0 nan 1"), SequenceFormat::kPlainXyz); }) ==
        ErrorCode::kNonFinite);
  CHECK(code_of([] {
          parse_sequence(std::string_view("{\"jtm_skeleton\":1"), SequenceFormat::kCanonicalJson);
        }) == ErrorCode::kSyntax);
}

TEST_CASE("canonical round trip of a random 3 x 20 sequence") {
  std::mt19937_64 rng(7);
  auto seq = oracle::random_sequence(rng, 3, 20);
  seq.source_id = "rand";
  for (int k = 0; k < 20; ++k) seq.joint_names.push_back("j" + std::to_string(k));
  const std::string text = write_sequence(seq, SequenceFormat::kCanonicalJson);
  const auto back = parse_sequence(std::string_view(text), SequenceFormat::kCanonicalJson);
  CHECK(back == seq);
  CHECK(write_sequence(back, SequenceFormat::kCanonicalJson) == text);
}

TEST_CASE("plain round trip keeps exact coordinates") {
  std::mt19937_64 rng(8);
  const auto seq = oracle::random_sequence(rng, 4, 3);
  const std::string text = write_sequence(seq, SequenceFormat::kPlainXyz);
  const auto back = parse_sequence(std::string_view(text), SequenceFormat::kPlainXyz);
  CHECK(back.frames == seq.frames);
}

TEST_CASE("0.1 survives a round trip exactly") {
  SkeletonSequence seq;
  seq.joint_count = 1;
  seq.frames = {Frame{{{0.1, -0.1, 0.1 + 0.2}}}};
  const auto back = parse_sequence(
      std::string_view(write_sequence(seq, SequenceFormat::kCanonicalJson)),
      SequenceFormat::kCanonicalJson);
  CHECK(back.at(0, 0).x == 0.1);
  CHECK(back.at(0, 0).z == 0.1 + 0.2);
}

TEST_CASE("one frame of zero joints is a minimal valid document") {
  SkeletonSequence seq;
  seq.frames = {Frame{}};
  CHECK(validate(seq).empty());
  const std::string text = write_sequence(seq, SequenceFormat::kCanonicalJson);
  const auto back = parse_sequence(std::string_view(text), SequenceFormat::kCanonicalJson);
  CHECK(back.frame_count() == 1);
  CHECK(back.joint_count == 0);
  CHECK(write_sequence(back, SequenceFormat::kCanonicalJson) == text);
}

TEST_CASE("validate reports each broken invariant") {
  std::mt19937_64 rng(9);
  auto seq = oracle::random_sequence(rng, 3, 5);
  CHECK(validate(seq).empty());

  auto nan_seq = seq;
  nan_seq.frames[0].joints[3].y = std::numeric_limits<double>::quiet_NaN();
  const auto v = validate(nan_seq);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == Violation{Violation::Kind::kNonFinite, 0, 3});
  CHECK(validate(nan_seq) == v);

  auto ragged = seq;
  ragged.frames[2].joints.pop_back();
  const auto r = validate(ragged);
  REQUIRE(r.size() == 1);
  CHECK(r[0].kind == Violation::Kind::kShape);
  CHECK(r[0].frame == 2);

  SkeletonSequence empty;
  CHECK_FALSE(validate(empty).empty());
}

TEST_CASE("canonical null joints are rejected unless repaired") {
  const std::string text =
      "{\"frame_count\":3,\"joint_count\":1,\"jtm_skeleton\":1}\n"
      "{\"joints\":[[0,0,0]]}\n{\"joints\":[[null,null,null]]}\n{\"joints\":[[2,4,6]]}\n";
  CHECK(code_of([&] { parse_sequence(std::string_view(text), SequenceFormat::kCanonicalJson); }) ==
        ErrorCode::kNonFinite);
  ParseOptions opts;
  opts.repair_missing = true;
  const auto seq = parse_sequence(std::string_view(text), SequenceFormat::kCanonicalJson, opts);
  CHECK(seq.at(1, 0) == Point3{1, 2, 3});
}

TEST_CASE("format follows the extension") {
  CHECK(format_for_path("a/b.jsonl") == SequenceFormat::kCanonicalJson);
  CHECK(format_for_path("a/b.json") == SequenceFormat::kCanonicalJson);
  CHECK(format_for_path("a/b.txt") == SequenceFormat::kPlainXyz);
}

TEST_CASE("bundled sample parses as 50 frames of 20 joints") {
  const auto seq = read_sequence_file(std::string(JTM_DATA_DIR) + "/sample_20x50.jsonl");
  CHECK(seq.frame_count() == 50);
  CHECK(seq.joint_count == 20);
  CHECK(seq.joint_names.size() == 20);
}
