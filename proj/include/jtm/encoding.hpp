#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "jtm/trajectory.hpp"
#include "jtm/types.hpp"

namespace jtm {

// ---------------------------------------------------------------------------
// Colormaps

enum class ColorMapKind { kJet, kJetReversed, kGrayscale, kCustom };

/// A 256-entry lookup table sampled uniformly on [0, 1].
class ColorMap {
 public:
  static constexpr std::size_t kSize = 256;
  using Table = std::array<Rgb, kSize>;

  /// MATLAB-style jet: per-channel tents r = clamp(1.5 - |4x - 3|),
  /// g = clamp(1.5 - |4x - 2|), b = clamp(1.5 - |4x - 1|).
  static const ColorMap& jet();
  static const ColorMap& jet_reversed();
  /// Linear ramp from light gray (0.8) at index 0 to black at index 255.
  static const ColorMap& grayscale();
  static const ColorMap& named(ColorMapKind kind);
  /// Throws Error(kOutOfRange) if any channel lies outside [0, 1].
  static ColorMap custom(std::string name, const Table& entries);
  /// Parses 256 rows of "r,g,b" (optionally preceded by a header row).
  static ColorMap from_csv(std::string_view text, std::string name = "custom");

  ColorMap reversed() const;

  ColorMapKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Table& entries() const { return entries_; }
  const Rgb& operator[](std::size_t i) const { return entries_[i]; }

  /// Header "index,r,g,b" then one row per entry, shortest round-trip decimals.
  std::string to_csv() const;

 private:
  ColorMap(ColorMapKind kind, std::string name, const Table& entries)
      : kind_(kind), name_(std::move(name)), entries_(entries) {}

  ColorMapKind kind_;
  std::string name_;
  Table entries_;
};

ColorMapKind parse_colormap_kind(std::string_view name);
std::string_view to_string(ColorMapKind kind);

/// Returns entries[round(l * 255)]. Throws Error(kOutOfRange) outside [0, 1].
const Rgb& sample_colormap(const ColorMap& cmap, double l);

/// Index that sample_colormap would read; round half up.
std::size_t colormap_index(double l);

// ---------------------------------------------------------------------------
// Body parts

enum class BodyPart { kLeft, kRight, kMiddle };

std::string_view to_string(BodyPart part);
BodyPart parse_body_part(std::string_view name);

/// Total map from joint index to body part.
class JointPartition {
 public:
  JointPartition() = default;
  explicit JointPartition(std::vector<BodyPart> parts) : parts_(std::move(parts)) {}

  /// Kinect V1 20-joint order: hip center, spine, shoulder center, head, then
  /// left arm (shoulder, elbow, wrist, hand), right arm, left leg (hip, knee,
  /// ankle, foot), right leg.
  static JointPartition kinect_v1();
  static JointPartition uniform(std::size_t joints, BodyPart part);
  /// Joints whose names contain "left"/"right" (any case) go to that side,
  /// everything else is middle.
  static JointPartition from_names(const std::vector<std::string>& names);
  /// Whitespace-separated part labels in joint order; '#' starts a comment.
  static JointPartition parse(std::string_view text);
  /// Picks from_names when names exist, kinect_v1 for 20 joints, otherwise
  /// every joint on the left part (so the hue colormap is used throughout).
  static JointPartition default_for(std::size_t joints, const std::vector<std::string>& names);

  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  BodyPart part_of(std::size_t joint) const;
  const std::vector<BodyPart>& parts() const { return parts_; }

  friend bool operator==(const JointPartition&, const JointPartition&) = default;

 private:
  std::vector<BodyPart> parts_;
};

// ---------------------------------------------------------------------------
// Encoding parameters

/// Cumulative encoding stages: trajectory only, hue, per-part colormaps, then
/// speed-driven saturation and/or brightness.
enum class EncodingLevel { kRaw, kHue, kHueParts, kHuePartsSat, kHuePartsBri, kFull };

inline constexpr std::array<EncodingLevel, 6> kAllLevels = {
    EncodingLevel::kRaw,         EncodingLevel::kHue,         EncodingLevel::kHueParts,
    EncodingLevel::kHuePartsSat, EncodingLevel::kHuePartsBri, EncodingLevel::kFull};

std::string_view to_string(EncodingLevel level);
/// Accepts raw, hue, hue_parts, hue_parts_sat, hue_parts_bri, full (also with '-').
EncodingLevel parse_level(std::string_view name);

bool uses_parts(EncodingLevel level);
bool uses_saturation(EncodingLevel level);
bool uses_brightness(EncodingLevel level);

struct EncodingParams {
  double s_min = 0.0;
  double s_max = 1.0;
  double b_min = 0.0;
  double b_max = 1.0;
  EncodingLevel level = EncodingLevel::kFull;
  /// Empty means JointPartition::default_for the sequence being encoded.
  JointPartition partition;
  /// Colormap for the left part and for plain hue; the right part uses its reverse.
  ColorMapKind hue_map = ColorMapKind::kJet;

  /// Throws Error(kInvalidArgument) unless 0 <= min <= max <= 1 for both ranges.
  void validate() const;
};

/// Temporal position of step q (1-based) in an n-frame sequence: q / (n - 1).
double hue_position(std::size_t q, std::size_t n);

/// Linear map of v / v_max onto [s_min, s_max]; v_max == 0 yields s_min.
double saturation(double v, double v_max, const EncodingParams& params);
/// Linear map of v / v_max onto [b_min, b_max]; v_max == 0 yields b_min.
double brightness(double v, double v_max, const EncodingParams& params);

struct Hsv {
  double h = 0.0;  // degrees in [0, 360)
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(const Rgb& c);
Rgb hsv_to_rgb(const Hsv& c);

inline constexpr Rgb kInk{0.0, 0.0, 0.0};
inline constexpr Rgb kWhite{1.0, 1.0, 1.0};

/// Resolves the three part colormaps once and colors individual segments.
class Colorizer {
 public:
  Colorizer(const EncodingParams& params, std::size_t joint_count,
            const std::vector<std::string>& joint_names = {});

  /// Color of the segment for step q (1-based, 1..n-1) of joint k moving at speed v.
  Rgb color(std::size_t q, std::size_t k, double v, double v_max, std::size_t n) const;

  const EncodingParams& params() const { return params_; }
  const JointPartition& partition() const { return partition_; }
  const ColorMap& map_for(BodyPart part) const;

 private:
  EncodingParams params_;
  JointPartition partition_;
  ColorMap left_;
  ColorMap right_;
};

/// Free-function form of Colorizer::color for one-off use.
Rgb colorize_segment(std::size_t q, std::size_t k, double v, double v_max, std::size_t n,
                     const EncodingParams& params, std::size_t joint_count = 20);

struct ColoredSegment {
  Segment3 segment;
  Rgb rgb;
  std::size_t frame_index = 0;  // q, 1-based
  std::size_t joint_index = 0;  // k, 0-based
};

/// Colors every segment in chronological then joint order.
std::vector<ColoredSegment> colorize_trajectories(const TrajectorySet& trajectories,
                                                  const SpeedField& speeds,
                                                  const Colorizer& colorizer);

}  // namespace jtm
