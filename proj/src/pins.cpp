#include "minsnap/pins.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace minsnap {

void validate_pins(const PinSet& pins, int segment_count, int k) {
  std::set<std::pair<int, int>> seen;
  for (const Pin& p : pins) {
    if (p.knot < 0 || p.knot > segment_count) {
      throw std::invalid_argument("pin knot " + std::to_string(p.knot) +
                                  " out of range 0.." + std::to_string(segment_count));
    }
    if (p.deriv < 0 || p.deriv >= k) {
      throw std::invalid_argument("pin derivative order " + std::to_string(p.deriv) +
                                  " out of range 0.." + std::to_string(k - 1));
    }
    if (!seen.insert({p.knot, p.deriv}).second) {
      throw std::invalid_argument("duplicate pin at knot " + std::to_string(p.knot) +
                                  ", derivative " + std::to_string(p.deriv));
    }
  }
}

Eigen::MatrixXd PinExpansion::selector(int segment) const {
  const auto& free = free_positions[segment];
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2 * k, static_cast<int>(free.size()));
  for (int c = 0; c < static_cast<int>(free.size()); ++c) z(free[c], c) = 1.0;
  return z;
}

PinExpansion expand_pins(const PinSet& pins, int segment_count, int k) {
  validate_pins(pins, segment_count, k);
  PinExpansion e;
  e.k = k;
  e.segment_count = segment_count;
  e.pinned_values.assign(segment_count, Eigen::VectorXd::Zero(2 * k));
  e.mu_minus.assign(segment_count, 0);
  e.mu_plus.assign(segment_count, 0);

  std::vector<std::vector<bool>> pinned(segment_count, std::vector<bool>(2 * k, false));
  for (const Pin& p : pins) {
    if (p.knot < segment_count) {  // left endpoint of segment p.knot
      pinned[p.knot][p.deriv] = true;
      e.pinned_values[p.knot](p.deriv) = p.value;
      e.mu_minus[p.knot] += 1;
    }
    if (p.knot > 0) {  // right endpoint of segment p.knot - 1
      pinned[p.knot - 1][k + p.deriv] = true;
      e.pinned_values[p.knot - 1](k + p.deriv) = p.value;
      e.mu_plus[p.knot - 1] += 1;
    }
  }

  e.free_positions.resize(segment_count);
  for (int i = 0; i < segment_count; ++i) {
    for (int pos = 0; pos < 2 * k; ++pos) {
      if (!pinned[i][pos]) e.free_positions[i].push_back(pos);
    }
  }
  return e;
}

}  // namespace minsnap
