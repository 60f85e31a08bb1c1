#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jtm/types.hpp"

namespace jtm {

/// One skeleton: the m joint positions of a single time step.
struct Frame {
  std::vector<Point3> joints;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// An action sample: n frames of m joints each.
///
/// The struct can hold ragged or non-finite data so that validate() can report
/// it; every parser and pipeline entry point rejects sequences that do not
/// validate.
struct SkeletonSequence {
  std::vector<Frame> frames;
  std::size_t joint_count = 0;
  std::vector<std::string> joint_names;  // empty or exactly joint_count labels
  std::string source_id;

  std::size_t frame_count() const { return frames.size(); }
  const Point3& at(std::size_t frame, std::size_t joint) const {
    return frames[frame].joints[joint];
  }

  friend bool operator==(const SkeletonSequence&, const SkeletonSequence&) = default;
};

enum class SequenceFormat { kCanonicalJson, kPlainXyz };

struct Violation {
  enum class Kind { kEmpty, kShape, kNonFinite, kNames };
  Kind kind;
  std::size_t frame = 0;
  std::size_t joint = 0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string describe(const Violation& v);

/// Lists every broken invariant; an empty result means the sequence is valid.
std::vector<Violation> validate(const SkeletonSequence& seq);

/// Throws Error(kShape / kNonFinite / kSyntax) for the first violation found.
void require_valid(const SkeletonSequence& seq);

struct ParseOptions {
  /// Joints per line for kPlainXyz. Zero means "infer from the first line".
  std::size_t plain_joint_count = 0;
  std::string source_id;
  /// Fill non-finite joints by linear interpolation in time before validating.
  bool repair_missing = false;
};

SkeletonSequence parse_sequence(std::istream& in, SequenceFormat format,
                                const ParseOptions& options = {});
SkeletonSequence parse_sequence(std::string_view text, SequenceFormat format,
                                const ParseOptions& options = {});
SkeletonSequence read_sequence_file(const std::string& path,
                                    std::optional<SequenceFormat> format = std::nullopt,
                                    const ParseOptions& options = {});

std::string write_sequence(const SkeletonSequence& seq, SequenceFormat format);

/// Replaces non-finite joints with values interpolated linearly in time from the
/// nearest finite neighbours of the same joint (held constant past the ends).
/// Joints with no finite sample at all are left untouched.
SkeletonSequence repair_missing(SkeletonSequence seq);

/// Guesses the format from the file extension: .jsonl/.json are canonical,
/// anything else is plain.
SequenceFormat format_for_path(const std::string& path);

}  // namespace jtm
