#include "jtm/trajectory.hpp"

#include <algorithm>

#include "jtm/error.hpp"

namespace jtm {
namespace {

void require_motion(const SkeletonSequence& seq) {
  if (seq.frame_count() < 2) {
    throw Error(ErrorCode::kTooShort, "need at least 2 frames, got " +
                                          std::to_string(seq.frame_count()));
  }
  require_valid(seq);
}

}  // namespace

SpeedField::SpeedField(std::size_t steps, std::size_t joints, std::vector<double> speeds)
    : steps_(steps), joints_(joints), speeds_(std::move(speeds)) {
  for (double v : speeds_) max_ = std::max(max_, v);
}

TrajectorySet compute_trajectories(const SkeletonSequence& seq) {
  require_motion(seq);
  const std::size_t steps = seq.frame_count() - 1;
  const std::size_t m = seq.joint_count;
  std::vector<Segment3> segments;
  segments.reserve(steps * m);
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const Point3& a = seq.at(i, k);
      const Point3& b = seq.at(i + 1, k);
      segments.push_back({a, b, b - a});
    }
  }
  return TrajectorySet(steps, m, std::move(segments));
}

SpeedField compute_speeds(const TrajectorySet& trajectories) {
  std::vector<double> speeds;
  speeds.reserve(trajectories.segments().size());
  for (const auto& s : trajectories.segments()) speeds.push_back(s.displacement.norm());
  return SpeedField(trajectories.steps(), trajectories.joints(), std::move(speeds));
}

SpeedField compute_speeds(const SkeletonSequence& seq) {
  return compute_speeds(compute_trajectories(seq));
}

SkeletonSequence reverse_in_time(SkeletonSequence seq) {
  std::reverse(seq.frames.begin(), seq.frames.end());
  return seq;
}

}  // namespace jtm
