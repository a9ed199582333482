#pragma once

#include <vector>

#include <Eigen/Core>

namespace minsnap {

// Interpolation constraint: derivative `deriv` of the spline equals `value`
// at knot `knot`. Knots are indexed 0..l, derivative orders 0..k-1.
struct Pin {
  int knot = 0;
  int deriv = 0;
  double value = 0.0;
};

using PinSet = std::vector<Pin>;

// Throws std::invalid_argument on out-of-range indices or duplicate
// (knot, deriv) pairs.
void validate_pins(const PinSet& pins, int segment_count, int k);

// Per-segment view of a pin set. A segment's derivative stack has 2k
// positions: orders 0..k-1 at its left knot, then orders 0..k-1 at its
// right knot. A pin at an interior knot lands on both adjacent segments
// with the same value, so continuity and pins never conflict and the
// pinned position sets of facing segment sides always match.
struct PinExpansion {
  int k = 0;
  int segment_count = 0;
  // pinned value at each position, zero at free positions (f-bar)
  std::vector<Eigen::VectorXd> pinned_values;
  // sorted free position indices per segment; the implicit selector matrix
  // Z_i has one standard basis column per entry, in this order
  std::vector<std::vector<int>> free_positions;
  std::vector<int> mu_minus;  // pinned count on the left side of segment i
  std::vector<int> mu_plus;   // pinned count on the right side

  int free_count(int segment) const {
    return static_cast<int>(free_positions[segment].size());
  }
  // Dense selector Z_i, mostly for verification code.
  Eigen::MatrixXd selector(int segment) const;
};

PinExpansion expand_pins(const PinSet& pins, int segment_count, int k);

}  // namespace minsnap
