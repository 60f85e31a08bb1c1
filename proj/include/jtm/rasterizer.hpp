#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "jtm/encoding.hpp"
#include "jtm/geometry.hpp"
#include "jtm/skeleton_io.hpp"

namespace jtm {

struct Rgb8 {
  std::uint8_t r = 255;
  std::uint8_t g = 255;
  std::uint8_t b = 255;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

/// Channel to byte: round half up on c * 255. The product is first snapped to a
/// 2^-20 grid so that last-ulp noise never flips a rounding decision.
std::uint8_t quantize_channel(double c);
Rgb8 quantize(const Rgb& c);

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// One joint trajectory map: an 8-bit RGB image, row-major, origin top-left.
class JtmCanvas {
 public:
  JtmCanvas(int width, int height, Plane plane = Plane::kFront, Rgb8 background = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Plane plane() const { return plane_; }
  Rgb8 background() const { return background_; }

  bool contains(PixelCoord p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  const Rgb8& at(PixelCoord p) const { return pixels_[index(p)]; }
  void set(PixelCoord p, Rgb8 c) { pixels_[index(p)] = c; }
  /// Channel values scaled back to [0, 1].
  Rgb unit(PixelCoord p) const;

  const std::vector<Rgb8>& pixels() const { return pixels_; }
  /// Interleaved RGB bytes, width * height * 3.
  std::span<const std::uint8_t> bytes() const;

  friend bool operator==(const JtmCanvas&, const JtmCanvas&) = default;

 private:
  std::size_t index(PixelCoord p) const {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.x);
  }

  int width_;
  int height_;
  Plane plane_;
  Rgb8 background_;
  std::vector<Rgb8> pixels_;
};

static_assert(sizeof(Rgb8) == 3, "canvas bytes() relies on packed RGB triples");

/// Bounds of the projected joint positions, with the margin kept on each side.
struct NormalizationBox {
  double min_u = 0.0;
  double min_v = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
  double margin = 0.05;

  /// Smallest extent used for the fit; keeps a static sequence well defined.
  static constexpr double kMinExtent = 1e-6;

  static NormalizationBox around(std::span<const Point2> points, double margin = 0.05);
};

/// Aspect-preserving, centered fit of the box into the canvas minus margins;
/// image y points down, so larger world v is nearer the top row.
PixelCoord world_to_pixel(const Point2& p, const NormalizationBox& box, int width, int height);

/// Paints the Bresenham line from a to b with `rgb`, overwriting. The pixel set
/// depends only on the unordered endpoint pair: along the major axis every
/// station takes the minor coordinate of the exact line rounded half up.
/// Thickness > 1 stamps a square brush on every line pixel, clipped to the canvas.
void draw_segment(JtmCanvas& canvas, PixelCoord a, PixelCoord b, Rgb8 rgb, int thickness = 1);
void draw_segment(JtmCanvas& canvas, PixelCoord a, PixelCoord b, const Rgb& rgb,
                  int thickness = 1);

struct RenderOptions {
  int width = 256;
  int height = 256;
  double margin = 0.05;
  int thickness = 1;

  /// Throws Error(kInvalidArgument) for non-positive sizes or a margin outside [0, 0.5).
  void validate() const;
};

/// Rotate, extract trajectories and speeds, color, project, fit and draw in
/// chronological order (steps ascending, joints ascending within a step).
JtmCanvas render_jtm(const SkeletonSequence& seq, Plane plane, const ViewAngles& angles,
                     const EncodingParams& params, const RenderOptions& options = {});

/// The three planes of one view; they share a single colorization pass.
std::array<JtmCanvas, 3> render_view(const SkeletonSequence& seq, const ViewAngles& angles,
                                     const EncodingParams& params,
                                     const RenderOptions& options = {});

struct ViewRender {
  ViewAngles view;
  std::array<JtmCanvas, 3> planes;  // indexed like kAllPlanes

  const JtmCanvas& plane(Plane p) const { return planes[static_cast<std::size_t>(p)]; }
};

/// Renders every view of the grid, in grid order. `threads` = 0 picks the default
/// worker count (see resolve_threads); results do not depend on it.
std::vector<ViewRender> render_all(const SkeletonSequence& seq, const ViewGrid& grid,
                                   const EncodingParams& params,
                                   const RenderOptions& options = {}, unsigned threads = 0);

/// Sorted coordinates of every pixel that differs from the background.
std::vector<PixelCoord> footprint(const JtmCanvas& canvas);

}  // namespace jtm
