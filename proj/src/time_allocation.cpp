#include "minsnap/time_allocation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace minsnap {

TimeAllocation TimeAllocation::from_knots(const Eigen::VectorXd& knots) {
  if (knots.size() < 2) {
    throw std::invalid_argument("TimeAllocation: need at least two knot times");
  }
  TimeAllocation t;
  t.knots_ = knots;
  t.half_durations_.resize(knots.size() - 1);
  for (Eigen::Index i = 0; i + 1 < knots.size(); ++i) {
    const double d = 0.5 * (knots(i + 1) - knots(i));
    if (!(d > 0.0)) {
      throw std::invalid_argument("TimeAllocation: knot times must be strictly increasing (violated at knot " +
                                  std::to_string(i + 1) + ")");
    }
    t.half_durations_(i) = d;
  }
  return t;
}

TimeAllocation TimeAllocation::from_durations(const Eigen::VectorXd& half_durations,
                                              double tau0) {
  if (half_durations.size() < 1) {
    throw std::invalid_argument("TimeAllocation: need at least one segment");
  }
  TimeAllocation t;
  t.half_durations_ = half_durations;
  t.knots_.resize(half_durations.size() + 1);
  t.knots_(0) = tau0;
  double acc = tau0;
  for (Eigen::Index i = 0; i < half_durations.size(); ++i) {
    const double d = half_durations(i);
    if (!(d > 0.0)) {
      throw std::invalid_argument("TimeAllocation: half-durations must be positive (violated at segment " +
                                  std::to_string(i + 1) + ")");
    }
    acc += 2.0 * d;
    t.knots_(i + 1) = acc;
  }
  return t;
}

int TimeAllocation::locate_segment(double tau) const {
  const double t0 = start_time();
  const double tl = end_time();
  if (!(tau >= t0 && tau <= tl)) {
    throw std::domain_error("TimeAllocation: query time outside spline domain");
  }
  // First knot >= tau among knots 1..l; ties at interior knots resolve left.
  const double* begin = knots_.data() + 1;
  const double* end = knots_.data() + knots_.size();
  const double* it = std::lower_bound(begin, end, tau);
  int seg = static_cast<int>(it - begin);
  if (seg >= segment_count()) seg = segment_count() - 1;
  return seg;
}

TimeAllocation durations_to_times(const Eigen::VectorXd& half_durations, double tau0) {
  return TimeAllocation::from_durations(half_durations, tau0);
}

Eigen::VectorXd times_to_durations(const TimeAllocation& times) {
  return times.half_durations();
}

}  // namespace minsnap
