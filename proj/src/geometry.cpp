#include "jtm/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "jtm/error.hpp"

namespace jtm {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Number of inclusive grid stations in [lo, hi]; tolerant of hi landing a few
// ulps short of the last station.
std::size_t station_count(const AngleRange& range, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must be positive");
  }
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "grid range must be finite");
  }
  if (range.hi < range.lo) {
    throw Error(ErrorCode::kEmptyGrid, "range [" + std::to_string(range.lo) + ", " +
                                           std::to_string(range.hi) + "] contains no values");
  }
  const double span = (range.hi - range.lo) / step;
  return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

}  // namespace

ViewGrid::ViewGrid(std::vector<ViewAngles> views) : views_(std::move(views)) {
  if (views_.empty()) throw Error(ErrorCode::kEmptyGrid, "view grid has no views");
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (!std::isfinite(views_[i].theta) || !std::isfinite(views_[i].psi)) {
      throw Error(ErrorCode::kInvalidArgument, "view angles must be finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (views_[i] == views_[j]) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate view in grid");
      }
    }
  }
}

ViewGrid ViewGrid::identity() { return ViewGrid({ViewAngles{0.0, 0.0}}); }

ViewGrid enumerate_views(AngleRange theta, double theta_step, AngleRange psi, double psi_step) {
  const std::size_t nt = station_count(theta, theta_step);
  const std::size_t np = station_count(psi, psi_step);
  std::vector<ViewAngles> views;
  views.reserve(nt * np);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = theta.lo + static_cast<double>(i) * theta_step;
    for (std::size_t j = 0; j < np; ++j) {
      views.push_back({t, psi.lo + static_cast<double>(j) * psi_step});
    }
  }
  return ViewGrid(std::move(views));
}

ViewGrid default_view_grid() { return enumerate_views({0.0, 45.0}, 15.0, {-45.0, 45.0}, 15.0); }

ViewGrid orthogonal_view_grid() {
  return enumerate_views({-45.0, 45.0}, 22.5, {-45.0, 45.0}, 22.5);
}

RotationTransform rotation_transform(const ViewAngles& angles, double z_for_x, double z_for_y) {
  const double t = angles.theta * kDegToRad;
  const double s = angles.psi * kDegToRad;
  const double ct = std::cos(t), st = std::sin(t);
  const double cs = std::cos(s), ss = std::sin(s);

  RotationTransform out;
  // Labelled "about y" after its angle psi; the 3x3 block is the one printed
  // for R_y(psi).
  out.about_y = {{{1.0, 0.0, 0.0, 0.0},
                  {0.0, cs, -ss, z_for_y * ss},
                  {0.0, ss, cs, z_for_y * (1.0 - cs)},
                  {0.0, 0.0, 0.0, 1.0}}};
  out.about_x = {{{ct, 0.0, st, -z_for_x * st},
                  {0.0, 1.0, 0.0, 0.0},
                  {-st, 0.0, ct, z_for_x * (1.0 - ct)},
                  {0.0, 0.0, 0.0, 1.0}}};
  return out;
}

Point3 rotate_point(const Point3& p, const ViewAngles& angles) {
  const double t = angles.theta * kDegToRad;
  const double s = angles.psi * kDegToRad;
  const double ct = std::cos(t), st = std::sin(t);
  const double cs = std::cos(s), ss = std::sin(s);

  // x-axis transform, translation bound to the input z.
  const double x1 = ct * p.x + st * p.z - p.z * st;
  const double y1 = p.y;
  const double z1 = -st * p.x + ct * p.z + p.z * (1.0 - ct);

  // y-axis transform, translation bound to the intermediate z.
  const double x2 = x1;
  const double y2 = cs * y1 - ss * z1 + z1 * ss;
  const double z2 = ss * y1 + cs * z1 + z1 * (1.0 - cs);
  return {x2, y2, z2};
}

SkeletonSequence rotate_sequence(const SkeletonSequence& seq, const ViewAngles& angles) {
  SkeletonSequence out = seq;
  if (angles.theta == 0.0 && angles.psi == 0.0) return out;
  for (auto& frame : out.frames) {
    for (auto& joint : frame.joints) joint = rotate_point(joint, angles);
  }
  return out;
}

std::string_view to_string(Plane plane) {
  switch (plane) {
    case Plane::kFront: return "front";
    case Plane::kTop: return "top";
    case Plane::kSide: return "side";
  }
  return "front";
}

Plane parse_plane(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "front") return Plane::kFront;
  if (lower == "top") return Plane::kTop;
  if (lower == "side") return Plane::kSide;
  throw Error(ErrorCode::kInvalidArgument, "unknown plane '" + std::string(name) + "'");
}

}  // namespace jtm
