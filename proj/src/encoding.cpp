#include "jtm/encoding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "jtm/error.hpp"
#include "jtm/numfmt.hpp"

namespace jtm {
namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return out;
}

ColorMap::Table make_jet_table() {
  ColorMap::Table t{};
  for (std::size_t i = 0; i < ColorMap::kSize; ++i) {
    const double x = static_cast<double>(i) / 255.0;
    t[i] = {clamp01(1.5 - std::abs(4.0 * x - 3.0)), clamp01(1.5 - std::abs(4.0 * x - 2.0)),
            clamp01(1.5 - std::abs(4.0 * x - 1.0))};
  }
  return t;
}

ColorMap::Table make_gray_table() {
  ColorMap::Table t{};
  for (std::size_t i = 0; i < ColorMap::kSize; ++i) {
    const double g = 0.8 * (1.0 - static_cast<double>(i) / 255.0);
    t[i] = {g, g, g};
  }
  return t;
}

ColorMap::Table reverse_table(const ColorMap::Table& t) {
  ColorMap::Table out = t;
  std::reverse(out.begin(), out.end());
  return out;
}

// Fraction through the [min, max] range; a static sequence maps to 0.
double speed_ratio(double v, double v_max) {
  if (!(v_max > 0.0)) return 0.0;
  return clamp01(v / v_max);
}

}  // namespace

// ---------------------------------------------------------------------------

const ColorMap& ColorMap::jet() {
  static const ColorMap map(ColorMapKind::kJet, "jet", make_jet_table());
  return map;
}

const ColorMap& ColorMap::jet_reversed() {
  static const ColorMap map(ColorMapKind::kJetReversed, "jet_reversed",
                            reverse_table(make_jet_table()));
  return map;
}

const ColorMap& ColorMap::grayscale() {
  static const ColorMap map(ColorMapKind::kGrayscale, "grayscale", make_gray_table());
  return map;
}

const ColorMap& ColorMap::named(ColorMapKind kind) {
  switch (kind) {
    case ColorMapKind::kJet: return jet();
    case ColorMapKind::kJetReversed: return jet_reversed();
    case ColorMapKind::kGrayscale: return grayscale();
    case ColorMapKind::kCustom: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "custom colormaps have no built-in table");
}

ColorMap ColorMap::custom(std::string name, const Table& entries) {
  for (const auto& c : entries) {
    for (double ch : {c.r, c.g, c.b}) {
      if (!(ch >= 0.0 && ch <= 1.0)) {
        throw Error(ErrorCode::kOutOfRange, "colormap channel outside [0, 1]");
      }
    }
  }
  return ColorMap(ColorMapKind::kCustom, std::move(name), entries);
}

ColorMap ColorMap::from_csv(std::string_view text, std::string name) {
  Table entries{};
  std::size_t count = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3 && cells.size() != 4) {
      throw Error(ErrorCode::kSyntax, "colormap row needs 3 or 4 columns: " + line);
    }
    const std::size_t off = cells.size() - 3;
    double rgb[3];
    try {
      for (int c = 0; c < 3; ++c) rgb[c] = parse_double(cells[off + c]);
    } catch (const Error&) {
      if (count == 0) continue;  // header row
      throw;
    }
    if (count >= kSize) throw Error(ErrorCode::kSyntax, "colormap has more than 256 rows");
    entries[count++] = {rgb[0], rgb[1], rgb[2]};
  }
  if (count != kSize) {
    throw Error(ErrorCode::kSyntax, "colormap needs 256 rows, got " + std::to_string(count));
  }
  return custom(std::move(name), entries);
}

ColorMap ColorMap::reversed() const {
  ColorMapKind kind = ColorMapKind::kCustom;
  if (kind_ == ColorMapKind::kJet) kind = ColorMapKind::kJetReversed;
  if (kind_ == ColorMapKind::kJetReversed) kind = ColorMapKind::kJet;
  return ColorMap(kind, name_ + "_reversed", reverse_table(entries_));
}

std::string ColorMap::to_csv() const {
  std::string out = "index,r,g,b\n";
  for (std::size_t i = 0; i < kSize; ++i) {
    out += std::to_string(i) + "," + format_double(entries_[i].r) + "," +
           format_double(entries_[i].g) + "," + format_double(entries_[i].b) + "\n";
  }
  return out;
}

ColorMapKind parse_colormap_kind(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "jet") return ColorMapKind::kJet;
  if (s == "jet_reversed") return ColorMapKind::kJetReversed;
  if (s == "grayscale" || s == "gray") return ColorMapKind::kGrayscale;
  throw Error(ErrorCode::kInvalidArgument, "unknown colormap '" + std::string(name) + "'");
}

std::string_view to_string(ColorMapKind kind) {
  switch (kind) {
    case ColorMapKind::kJet: return "jet";
    case ColorMapKind::kJetReversed: return "jet_reversed";
    case ColorMapKind::kGrayscale: return "grayscale";
    case ColorMapKind::kCustom: return "custom";
  }
  return "custom";
}

std::size_t colormap_index(double l) {
  if (!(l >= 0.0 && l <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "colormap position must lie in [0, 1]");
  }
  return static_cast<std::size_t>(std::floor(l * 255.0 + 0.5));
}

const Rgb& sample_colormap(const ColorMap& cmap, double l) { return cmap[colormap_index(l)]; }

// ---------------------------------------------------------------------------

std::string_view to_string(BodyPart part) {
  switch (part) {
    case BodyPart::kLeft: return "left";
    case BodyPart::kRight: return "right";
    case BodyPart::kMiddle: return "middle";
  }
  return "middle";
}

BodyPart parse_body_part(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "left" || s == "l") return BodyPart::kLeft;
  if (s == "right" || s == "r") return BodyPart::kRight;
  if (s == "middle" || s == "m") return BodyPart::kMiddle;
  throw Error(ErrorCode::kSyntax, "unknown body part '" + std::string(name) + "'");
}

JointPartition JointPartition::kinect_v1() {
  using P = BodyPart;
  return JointPartition({P::kMiddle, P::kMiddle, P::kMiddle, P::kMiddle,  // hip c, spine, shoulder c, head
                         P::kLeft,   P::kLeft,   P::kLeft,   P::kLeft,    // left arm
                         P::kRight,  P::kRight,  P::kRight,  P::kRight,   // right arm
                         P::kLeft,   P::kLeft,   P::kLeft,   P::kLeft,    // left leg
                         P::kRight,  P::kRight,  P::kRight,  P::kRight});  // right leg
}

JointPartition JointPartition::uniform(std::size_t joints, BodyPart part) {
  return JointPartition(std::vector<BodyPart>(joints, part));
}

JointPartition JointPartition::from_names(const std::vector<std::string>& names) {
  std::vector<BodyPart> parts;
  parts.reserve(names.size());
  for (const auto& name : names) {
    const std::string s = lowercase(name);
    if (s.find("left") != std::string::npos) {
      parts.push_back(BodyPart::kLeft);
    } else if (s.find("right") != std::string::npos) {
      parts.push_back(BodyPart::kRight);
    } else {
      parts.push_back(BodyPart::kMiddle);
    }
  }
  return JointPartition(std::move(parts));
}

JointPartition JointPartition::parse(std::string_view text) {
  std::vector<BodyPart> parts;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) parts.push_back(parse_body_part(word));
  }
  if (parts.empty()) throw Error(ErrorCode::kSyntax, "partition lists no joints");
  return JointPartition(std::move(parts));
}

JointPartition JointPartition::default_for(std::size_t joints,
                                           const std::vector<std::string>& names) {
  if (!names.empty() && names.size() == joints) return from_names(names);
  if (joints == 20) return kinect_v1();
  return uniform(joints, BodyPart::kLeft);
}

BodyPart JointPartition::part_of(std::size_t joint) const {
  if (joint >= parts_.size()) {
    throw Error(ErrorCode::kOutOfRange, "joint " + std::to_string(joint) +
                                            " is not covered by the partition");
  }
  return parts_[joint];
}

// ---------------------------------------------------------------------------

std::string_view to_string(EncodingLevel level) {
  switch (level) {
    case EncodingLevel::kRaw: return "raw";
    case EncodingLevel::kHue: return "hue";
    case EncodingLevel::kHueParts: return "hue_parts";
    case EncodingLevel::kHuePartsSat: return "hue_parts_sat";
    case EncodingLevel::kHuePartsBri: return "hue_parts_bri";
    case EncodingLevel::kFull: return "full";
  }
  return "full";
}

EncodingLevel parse_level(std::string_view name) {
  const std::string s = lowercase(name);
  for (EncodingLevel level : kAllLevels) {
    if (s == to_string(level)) return level;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown encoding level '" + std::string(name) + "'");
}

bool uses_parts(EncodingLevel level) {
  return level != EncodingLevel::kRaw && level != EncodingLevel::kHue;
}
bool uses_saturation(EncodingLevel level) {
  return level == EncodingLevel::kHuePartsSat || level == EncodingLevel::kFull;
}
bool uses_brightness(EncodingLevel level) {
  return level == EncodingLevel::kHuePartsBri || level == EncodingLevel::kFull;
}

void EncodingParams::validate() const {
  auto check = [](double lo, double hi, const char* what) {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " range must satisfy 0 <= min <= max <= 1");
    }
  };
  check(s_min, s_max, "saturation");
  check(b_min, b_max, "brightness");
  if (hue_map == ColorMapKind::kCustom) {
    throw Error(ErrorCode::kInvalidArgument, "hue_map must be a built-in colormap");
  }
}

double hue_position(std::size_t q, std::size_t n) {
  if (n < 2 || q < 1 || q > n - 1) {
    throw Error(ErrorCode::kOutOfRange, "step " + std::to_string(q) + " outside 1.." +
                                            std::to_string(n < 1 ? 0 : n - 1));
  }
  return static_cast<double>(q) / static_cast<double>(n - 1);
}

// std::lerp is exact at both ends, so v == v_max gives max and v == 0 gives min.
double saturation(double v, double v_max, const EncodingParams& params) {
  return std::lerp(params.s_min, params.s_max, speed_ratio(v, v_max));
}

double brightness(double v, double v_max, const EncodingParams& params) {
  return std::lerp(params.b_min, params.b_max, speed_ratio(v, v_max));
}

Hsv rgb_to_hsv(const Rgb& c) {
  const double hi = std::max({c.r, c.g, c.b});
  const double lo = std::min({c.r, c.g, c.b});
  const double delta = hi - lo;
  Hsv out;
  out.v = hi;
  out.s = hi > 0.0 ? delta / hi : 0.0;
  if (delta <= 0.0) return out;
  double h;
  if (hi == c.r) {
    h = (c.g - c.b) / delta;
  } else if (hi == c.g) {
    h = (c.b - c.r) / delta + 2.0;
  } else {
    h = (c.r - c.g) / delta + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  out.h = h;
  return out;
}

Rgb hsv_to_rgb(const Hsv& c) {
  const double chroma = c.v * c.s;
  const double hp = std::fmod(c.h, 360.0) / 60.0;
  const double x = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  const double m = c.v - chroma;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  return {clamp01(r + m), clamp01(g + m), clamp01(b + m)};
}

// ---------------------------------------------------------------------------

Colorizer::Colorizer(const EncodingParams& params, std::size_t joint_count,
                     const std::vector<std::string>& joint_names)
    : params_(params),
      partition_(params.partition.empty() ? JointPartition::default_for(joint_count, joint_names)
                                          : params.partition),
      left_(ColorMap::named(params.hue_map)),
      right_(ColorMap::named(params.hue_map).reversed()) {
  params_.validate();
  if (uses_parts(params_.level) && partition_.size() != joint_count) {
    throw Error(ErrorCode::kShape, "partition covers " + std::to_string(partition_.size()) +
                                       " joints, sequence has " + std::to_string(joint_count));
  }
}

const ColorMap& Colorizer::map_for(BodyPart part) const {
  switch (part) {
    case BodyPart::kLeft: return left_;
    case BodyPart::kRight: return right_;
    case BodyPart::kMiddle: return ColorMap::grayscale();
  }
  return left_;
}

Rgb Colorizer::color(std::size_t q, std::size_t k, double v, double v_max, std::size_t n) const {
  const EncodingLevel level = params_.level;
  if (level == EncodingLevel::kRaw) return kInk;
  const double l = hue_position(q, n);
  if (level == EncodingLevel::kHue) return sample_colormap(left_, l);

  const Rgb base = sample_colormap(map_for(partition_.part_of(k)), l);
  const bool sat = uses_saturation(level);
  const bool bri = uses_brightness(level);
  if (!sat && !bri) return base;

  Hsv hsv = rgb_to_hsv(base);
  // Achromatic entries (the gray map) have no hue to saturate.
  const bool chromatic = std::max({base.r, base.g, base.b}) > std::min({base.r, base.g, base.b});
  if (sat && chromatic) hsv.s = saturation(v, v_max, params_);
  if (bri) hsv.v = brightness(v, v_max, params_);
  return hsv_to_rgb(hsv);
}

Rgb colorize_segment(std::size_t q, std::size_t k, double v, double v_max, std::size_t n,
                     const EncodingParams& params, std::size_t joint_count) {
  return Colorizer(params, joint_count).color(q, k, v, v_max, n);
}

std::vector<ColoredSegment> colorize_trajectories(const TrajectorySet& trajectories,
                                                  const SpeedField& speeds,
                                                  const Colorizer& colorizer) {
  const std::size_t n = trajectories.steps() + 1;
  std::vector<ColoredSegment> out;
  out.reserve(trajectories.segments().size());
  for (std::size_t i = 0; i < trajectories.steps(); ++i) {
    for (std::size_t k = 0; k < trajectories.joints(); ++k) {
      out.push_back({trajectories.at(i, k),
                     colorizer.color(i + 1, k, speeds.at(i, k), speeds.max(), n), i + 1, k});
    }
  }
  return out;
}

}  // namespace jtm
