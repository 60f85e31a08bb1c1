#pragma once

#include <cstddef>
#include <vector>

#include "jtm/skeleton_io.hpp"
#include "jtm/types.hpp"

namespace jtm {

struct Segment3 {
  Point3 from;
  Point3 to;
  Point3 displacement;  // exactly to - from
};

/// Per-joint motion between consecutive frames: (n - 1) x m segments, where
/// segment (i, k) runs from joint k in frame i to joint k in frame i + 1.
class TrajectorySet {
 public:
  TrajectorySet() = default;
  TrajectorySet(std::size_t steps, std::size_t joints, std::vector<Segment3> segments)
      : steps_(steps), joints_(joints), segments_(std::move(segments)) {}

  std::size_t steps() const { return steps_; }
  std::size_t joints() const { return joints_; }
  const Segment3& at(std::size_t step, std::size_t joint) const {
    return segments_[step * joints_ + joint];
  }
  const std::vector<Segment3>& segments() const { return segments_; }

 private:
  std::size_t steps_ = 0;
  std::size_t joints_ = 0;
  std::vector<Segment3> segments_;
};

/// Euclidean joint speed per step, plus the sequence-wide maximum.
class SpeedField {
 public:
  SpeedField() = default;
  SpeedField(std::size_t steps, std::size_t joints, std::vector<double> speeds);

  std::size_t steps() const { return steps_; }
  std::size_t joints() const { return joints_; }
  double at(std::size_t step, std::size_t joint) const { return speeds_[step * joints_ + joint]; }
  double max() const { return max_; }
  const std::vector<double>& values() const { return speeds_; }

 private:
  std::size_t steps_ = 0;
  std::size_t joints_ = 0;
  std::vector<double> speeds_;
  double max_ = 0.0;
};

/// Throws Error(kTooShort) when the sequence has fewer than two frames.
TrajectorySet compute_trajectories(const SkeletonSequence& seq);
SpeedField compute_speeds(const SkeletonSequence& seq);
SpeedField compute_speeds(const TrajectorySet& trajectories);

SkeletonSequence reverse_in_time(SkeletonSequence seq);

}  // namespace jtm
