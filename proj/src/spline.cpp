#include "minsnap/spline.hpp"

#include <stdexcept>

#include "minsnap/basis.hpp"

namespace minsnap {

namespace {

// qth derivative of the polynomial with coefficients c (monomials in rho),
// evaluated at rho, via Horner on the differentiated coefficients.
double poly_derivative(const Eigen::VectorXd& c, double rho, int q) {
  const int n = static_cast<int>(c.size());
  if (q >= n) return 0.0;
  double acc = 0.0;
  for (int j = n - 1; j >= q; --j) {
    double coef = c(j);
    for (int s = 0; s < q; ++s) coef *= static_cast<double>(j - s);
    acc = acc * rho + coef;
  }
  return acc;
}

}  // namespace

Spline::Spline(int k, TimeAllocation times, std::vector<Eigen::VectorXd> normalized_coeffs)
    : k_(k), times_(std::move(times)), coeffs_(std::move(normalized_coeffs)) {
  if (k_ < 1) throw std::invalid_argument("Spline: order k must be >= 1");
  if (static_cast<int>(coeffs_.size()) != times_.segment_count()) {
    throw std::invalid_argument("Spline: coefficient count does not match segment count");
  }
  for (const auto& c : coeffs_) {
    if (c.size() != 2 * k_) {
      throw std::invalid_argument("Spline: each segment needs 2k coefficients");
    }
  }
}

double Spline::eval(double tau, int q) const {
  if (q < 0) throw std::invalid_argument("Spline::eval: negative derivative order");
  const int seg = times_.locate_segment(tau);
  const double delta = times_.delta(seg);
  const double rho = (tau - times_.midpoint(seg)) / delta;
  double v = poly_derivative(coeffs_[seg], rho, q);
  for (int s = 0; s < q; ++s) v /= delta;
  return v;
}

Eigen::VectorXd Spline::endpoint_derivatives(int segment, bool right) const {
  const double rho = right ? 1.0 : -1.0;
  const double delta = times_.delta(segment);
  Eigen::VectorXd out(k_);
  double scale = 1.0;
  for (int q = 0; q < k_; ++q) {
    out(q) = poly_derivative(coeffs_[segment], rho, q) * scale;
    scale /= delta;
  }
  return out;
}

}  // namespace minsnap
