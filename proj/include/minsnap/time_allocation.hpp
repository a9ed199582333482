#pragma once

#include <Eigen/Core>

namespace minsnap {

// Knot times of a spline together with the per-segment half-durations
// delta_i = (tau_i - tau_{i-1}) / 2. Whichever representation a factory
// receives is stored as given and the other derived from it, so
// round-tripping through the factories is exact.
class TimeAllocation {
 public:
  TimeAllocation() = default;

  // Build from knot times; requires strictly increasing times.
  static TimeAllocation from_knots(const Eigen::VectorXd& knots);

  // Build from half-durations and a start time; requires all deltas > 0.
  // Knot i is tau0 + 2 * (delta_1 + ... + delta_i).
  static TimeAllocation from_durations(const Eigen::VectorXd& half_durations,
                                       double tau0);

  int segment_count() const { return static_cast<int>(half_durations_.size()); }
  const Eigen::VectorXd& knots() const { return knots_; }
  const Eigen::VectorXd& half_durations() const { return half_durations_; }

  double start_time() const { return knots_(0); }
  double end_time() const { return knots_(knots_.size() - 1); }
  double delta(int segment) const { return half_durations_(segment); }  // 0-based
  double midpoint(int segment) const {
    return 0.5 * (knots_(segment) + knots_(segment + 1));
  }

  // Index of the segment covering tau, 0-based; a tau equal to an interior
  // knot belongs to the earlier segment. Throws std::domain_error outside
  // [start_time, end_time].
  int locate_segment(double tau) const;

 private:
  Eigen::VectorXd knots_;           // length l+1
  Eigen::VectorXd half_durations_;  // length l
};

// Cumulative map from half-durations to knot times (t_i = tau0 + 2*sum d_j).
TimeAllocation durations_to_times(const Eigen::VectorXd& half_durations,
                                  double tau0);

// Inverse of durations_to_times; exact because TimeAllocation stores d.
Eigen::VectorXd times_to_durations(const TimeAllocation& times);

}  // namespace minsnap
