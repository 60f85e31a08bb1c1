#include "jtm/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "jtm/error.hpp"
#include "jtm/parallel.hpp"
#include "jtm/trajectory.hpp"

namespace jtm {
namespace {

constexpr double kSnap = 1048576.0;  // 2^20

double snap(double x) { return std::round(x * kSnap) / kSnap; }

int round_half_up(double x) { return static_cast<int>(std::floor(snap(x) + 0.5)); }

template <typename Plot>
void bresenham(PixelCoord a, PixelCoord b, Plot&& plot) {
  const bool x_major = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
  int a_major = x_major ? a.x : a.y;
  int a_minor = x_major ? a.y : a.x;
  int b_major = x_major ? b.x : b.y;
  int b_minor = x_major ? b.y : b.x;
  if (b_major < a_major) {
    std::swap(a_major, b_major);
    std::swap(a_minor, b_minor);
  }
  const long long span = b_major - a_major;
  if (span == 0) {
    plot(a);
    return;
  }
  // Minor offset at station i is floor((2*dv*i + span) / (2*span)); `rem` tracks
  // the numerator modulo 2*span.
  const long long dv = b_minor - a_minor;
  const long long two_span = 2 * span;
  long long rem = span;
  int offset = 0;
  for (long long i = 0; i <= span; ++i) {
    const int major = a_major + static_cast<int>(i);
    const int minor = a_minor + offset;
    plot(x_major ? PixelCoord{major, minor} : PixelCoord{minor, major});
    rem += 2 * dv;
    if (rem >= two_span) {
      rem -= two_span;
      ++offset;
    } else if (rem < 0) {
      rem += two_span;
      --offset;
    }
  }
}

struct ProjectedSegment {
  Point2 from;
  Point2 to;
  Rgb8 color;
};

struct ColoredView {
  SkeletonSequence rotated;
  std::vector<Rgb8> colors;  // one per segment, chronological then joint order
};

ColoredView colorize_view(const SkeletonSequence& seq, const ViewAngles& angles,
                          const EncodingParams& params) {
  ColoredView out;
  out.rotated = rotate_sequence(seq, angles);
  const TrajectorySet trajectories = compute_trajectories(out.rotated);
  const SpeedField speeds = compute_speeds(trajectories);
  const Colorizer colorizer(params, seq.joint_count, seq.joint_names);
  const std::size_t n = seq.frame_count();
  out.colors.reserve(trajectories.segments().size());
  for (std::size_t i = 0; i < trajectories.steps(); ++i) {
    for (std::size_t k = 0; k < trajectories.joints(); ++k) {
      out.colors.push_back(quantize(colorizer.color(i + 1, k, speeds.at(i, k), speeds.max(), n)));
    }
  }
  return out;
}

JtmCanvas draw_plane(const ColoredView& view, Plane plane, const RenderOptions& options) {
  const SkeletonSequence& seq = view.rotated;
  const std::size_t n = seq.frame_count();
  const std::size_t m = seq.joint_count;

  std::vector<Point2> projected;
  projected.reserve(n * m);
  for (const auto& frame : seq.frames) {
    for (const auto& joint : frame.joints) projected.push_back(project(joint, plane));
  }
  const NormalizationBox box = NormalizationBox::around(projected, options.margin);

  std::vector<PixelCoord> pixels;
  pixels.reserve(projected.size());
  for (const auto& p : projected) {
    pixels.push_back(world_to_pixel(p, box, options.width, options.height));
  }

  JtmCanvas canvas(options.width, options.height, plane);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      draw_segment(canvas, pixels[i * m + k], pixels[(i + 1) * m + k], view.colors[i * m + k],
                   options.thickness);
    }
  }
  return canvas;
}

}  // namespace

std::uint8_t quantize_channel(double c) {
  const double scaled = snap(std::clamp(c, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(scaled + 0.5)));
}

Rgb8 quantize(const Rgb& c) {
  return {quantize_channel(c.r), quantize_channel(c.g), quantize_channel(c.b)};
}

JtmCanvas::JtmCanvas(int width, int height, Plane plane, Rgb8 background)
    : width_(width), height_(height), plane_(plane), background_(background) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "canvas dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), background);
}

Rgb JtmCanvas::unit(PixelCoord p) const {
  const Rgb8& c = at(p);
  return {c.r / 255.0, c.g / 255.0, c.b / 255.0};
}

std::span<const std::uint8_t> JtmCanvas::bytes() const {
  return {reinterpret_cast<const std::uint8_t*>(pixels_.data()), pixels_.size() * 3};
}

NormalizationBox NormalizationBox::around(std::span<const Point2> points, double margin) {
  NormalizationBox box;
  box.margin = margin;
  if (points.empty()) return box;
  box.min_u = box.max_u = points.front().u;
  box.min_v = box.max_v = points.front().v;
  for (const auto& p : points) {
    box.min_u = std::min(box.min_u, p.u);
    box.max_u = std::max(box.max_u, p.u);
    box.min_v = std::min(box.min_v, p.v);
    box.max_v = std::max(box.max_v, p.v);
  }
  return box;
}

PixelCoord world_to_pixel(const Point2& p, const NormalizationBox& box, int width, int height) {
  const double span_x = static_cast<double>(width - 1);
  const double span_y = static_cast<double>(height - 1);
  const double avail_x = span_x * (1.0 - 2.0 * box.margin);
  const double avail_y = span_y * (1.0 - 2.0 * box.margin);
  const double extent_u = std::max(box.max_u - box.min_u, NormalizationBox::kMinExtent);
  const double extent_v = std::max(box.max_v - box.min_v, NormalizationBox::kMinExtent);
  const double scale = std::min(avail_x / extent_u, avail_y / extent_v);
  const double center_u = 0.5 * (box.min_u + box.max_u);
  const double center_v = 0.5 * (box.min_v + box.max_v);

  const double px = 0.5 * span_x + scale * (p.u - center_u);
  const double py = 0.5 * span_y - scale * (p.v - center_v);
  return {std::clamp(round_half_up(px), 0, width - 1),
          std::clamp(round_half_up(py), 0, height - 1)};
}

void draw_segment(JtmCanvas& canvas, PixelCoord a, PixelCoord b, Rgb8 rgb, int thickness) {
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  bresenham(a, b, [&](PixelCoord p) {
    if (thickness <= 1) {
      if (canvas.contains(p)) canvas.set(p, rgb);
      return;
    }
    for (int dy = lo; dy <= hi; ++dy) {
      for (int dx = lo; dx <= hi; ++dx) {
        const PixelCoord q{p.x + dx, p.y + dy};
        if (canvas.contains(q)) canvas.set(q, rgb);
      }
    }
  });
}

void draw_segment(JtmCanvas& canvas, PixelCoord a, PixelCoord b, const Rgb& rgb, int thickness) {
  draw_segment(canvas, a, b, quantize(rgb), thickness);
}

void RenderOptions::validate() const {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "canvas size must be positive");
  }
  if (!(margin >= 0.0 && margin < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "margin must lie in [0, 0.5)");
  }
  if (thickness < 1) throw Error(ErrorCode::kInvalidArgument, "line thickness must be >= 1");
}

JtmCanvas render_jtm(const SkeletonSequence& seq, Plane plane, const ViewAngles& angles,
                     const EncodingParams& params, const RenderOptions& options) {
  options.validate();
  return draw_plane(colorize_view(seq, angles, params), plane, options);
}

std::array<JtmCanvas, 3> render_view(const SkeletonSequence& seq, const ViewAngles& angles,
                                     const EncodingParams& params, const RenderOptions& options) {
  options.validate();
  const ColoredView view = colorize_view(seq, angles, params);
  return {draw_plane(view, Plane::kFront, options), draw_plane(view, Plane::kTop, options),
          draw_plane(view, Plane::kSide, options)};
}

std::vector<ViewRender> render_all(const SkeletonSequence& seq, const ViewGrid& grid,
                                   const EncodingParams& params, const RenderOptions& options,
                                   unsigned threads) {
  options.validate();
  // Fail fast on bad input before spawning work.
  compute_trajectories(seq);
  std::vector<std::optional<ViewRender>> slots(grid.size());
  parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t i) {
    slots[i] = ViewRender{grid[i], render_view(seq, grid[i], params, options)};
  });
  std::vector<ViewRender> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<PixelCoord> footprint(const JtmCanvas& canvas) {
  std::vector<PixelCoord> out;
  const Rgb8 bg = canvas.background();
  for (int y = 0; y < canvas.height(); ++y) {
    for (int x = 0; x < canvas.width(); ++x) {
      if (!(canvas.at({x, y}) == bg)) out.push_back({x, y});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace jtm
