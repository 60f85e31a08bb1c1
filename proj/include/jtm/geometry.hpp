#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "jtm/skeleton_io.hpp"
#include "jtm/types.hpp"

namespace jtm {

/// Camera view expressed as polar angle theta and azimuthal angle psi, in degrees.
struct ViewAngles {
  double theta = 0.0;
  double psi = 0.0;

  friend bool operator==(const ViewAngles&, const ViewAngles&) = default;
};

/// Ordered, duplicate-free list of views.
class ViewGrid {
 public:
  /// Throws Error(kEmptyGrid) for an empty list and kInvalidArgument on duplicates
  /// or non-finite angles.
  explicit ViewGrid(std::vector<ViewAngles> views);

  /// The single identity view (0, 0).
  static ViewGrid identity();

  const std::vector<ViewAngles>& views() const { return views_; }
  std::size_t size() const { return views_.size(); }
  const ViewAngles& operator[](std::size_t i) const { return views_[i]; }
  auto begin() const { return views_.begin(); }
  auto end() const { return views_.end(); }

 private:
  std::vector<ViewAngles> views_;
};

struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Inclusive Cartesian grid, theta outer and psi inner. Values are lo + i * step,
/// so long ranges do not accumulate drift.
ViewGrid enumerate_views(AngleRange theta, double theta_step, AngleRange psi, double psi_step);

/// theta in [0, 45], psi in [-45, 45], both with a 15 degree step: 28 views.
ViewGrid default_view_grid();

/// Both angles in [-45, 45] with a 22.5 degree step: 25 views.
ViewGrid orthogonal_view_grid();

/// The two 4x4 homogeneous transforms applied to a point. Row-major.
struct RotationTransform {
  using Mat4 = std::array<std::array<double, 4>, 4>;
  Mat4 about_y;  // R_y(psi) block with its z-scaled translation column
  Mat4 about_x;  // R_x(theta) block with its z-scaled translation column
};

/// Builds both transforms for the z coordinate each one is applied to. The
/// translation columns scale with z, so the matrices depend on the point.
RotationTransform rotation_transform(const ViewAngles& angles, double z_for_x, double z_for_y);

/// Applies the x-axis transform to (x, y, z, 1) using the input z in its
/// translation column, then the y-axis transform using the intermediate z.
Point3 rotate_point(const Point3& p, const ViewAngles& angles);

SkeletonSequence rotate_sequence(const SkeletonSequence& seq, const ViewAngles& angles);

enum class Plane { kFront, kTop, kSide };

inline constexpr std::array<Plane, 3> kAllPlanes = {Plane::kFront, Plane::kTop, Plane::kSide};

std::string_view to_string(Plane plane);
/// Accepts "front", "top", "side" (case-insensitive). Throws Error(kInvalidArgument).
Plane parse_plane(std::string_view name);

/// FRONT drops z -> (x, y); TOP drops y -> (x, z); SIDE drops x -> (z, y).
constexpr Point2 project(const Point3& p, Plane plane) {
  switch (plane) {
    case Plane::kFront: return {p.x, p.y};
    case Plane::kTop: return {p.x, p.z};
    case Plane::kSide: return {p.z, p.y};
  }
  return {p.x, p.y};
}

}  // namespace jtm
