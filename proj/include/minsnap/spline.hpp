#pragma once

#include <vector>

#include <Eigen/Core>

#include "minsnap/time_allocation.hpp"

namespace minsnap {

// Piecewise polynomial with 2k monomial coefficients per segment, stored on
// the normalized domain rho in [-1, 1]. Absolute-time coefficients are never
// materialized; evaluation rescales through the chain rule instead, which
// keeps long and far-from-origin schedules well conditioned.
class Spline {
 public:
  Spline() = default;
  Spline(int k, TimeAllocation times, std::vector<Eigen::VectorXd> normalized_coeffs);

  int order() const { return k_; }
  int segment_count() const { return times_.segment_count(); }
  const TimeAllocation& times() const { return times_; }
  const std::vector<Eigen::VectorXd>& coefficients() const { return coeffs_; }

  // qth absolute-time derivative at tau. Ties at interior knots evaluate the
  // earlier segment. Throws std::domain_error outside the knot span and
  // std::invalid_argument for q < 0; orders beyond the polynomial degree
  // return zero.
  double eval(double tau, int q = 0) const;

  // Derivative values of segment `segment` at one of its endpoints, orders
  // 0..k-1, in absolute time.
  Eigen::VectorXd endpoint_derivatives(int segment, bool right) const;

 private:
  int k_ = 0;
  TimeAllocation times_;
  std::vector<Eigen::VectorXd> coeffs_;  // each of size 2k
};

}  // namespace minsnap
