#include "minsnap/basis.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

namespace minsnap {

namespace {

void check_order(int k) {
  if (k < 1) throw std::invalid_argument("basis: order k must be >= 1");
}

}  // namespace

Eigen::MatrixXd basis_derivative_matrix(double rho, int k) {
  check_order(k);
  const int n = 2 * k;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, n);
  for (int q = 0; q < k; ++q) {        // derivative order
    for (int j = q; j < n; ++j) {      // monomial rho^j
      double coef = 1.0;
      for (int s = 0; s < q; ++s) coef *= static_cast<double>(j - s);
      double pw = 1.0;
      for (int s = 0; s < j - q; ++s) pw *= rho;
      w(q, j) = coef * pw;
    }
  }
  return w;
}

Eigen::MatrixXd endpoint_map(int k) {
  check_order(k);
  Eigen::MatrixXd v(2 * k, 2 * k);
  v.topRows(k) = basis_derivative_matrix(-1.0, k);
  v.bottomRows(k) = basis_derivative_matrix(1.0, k);
  return v;
}

Eigen::MatrixXd cost_gram(int k) {
  check_order(k);
  const int n = 2 * k;
  // d^{k-1}/drho^{k-1} rho^{j-1} = c_j rho^{j-k} with c_j = (j-1)!/(j-k)!.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int j = k; j <= n; ++j) {
    double coef = 1.0;
    for (int s = j - k + 1; s <= j - 1; ++s) coef *= static_cast<double>(s);
    c(j - 1) = coef;
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = k; i <= n; ++i) {
    for (int j = k; j <= n; ++j) {
      const int p = i + j - 2 * k;  // power of rho in the product
      if (p % 2 == 0) h(i - 1, j - 1) = c(i - 1) * c(j - 1) * 2.0 / (p + 1);
    }
  }
  return h;
}

Eigen::VectorXd scaling_block(double delta, int k) {
  check_order(k);
  if (!(delta > 0.0)) throw std::invalid_argument("scaling_block: delta must be positive");
  Eigen::VectorXd g(2 * k);
  double inv = 1.0;
  for (int q = 0; q < k; ++q) {
    g(q) = inv;
    g(k + q) = inv;
    inv /= delta;
  }
  return g;
}

const BasisConstants& basis_constants(int k) {
  check_order(k);
  static std::mutex mutex;
  static std::map<int, BasisConstants> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(k);
  if (it == cache.end()) {
    BasisConstants c;
    c.k = k;
    c.endpoint = endpoint_map(k);
    c.endpoint_inv = c.endpoint.partialPivLu().inverse();
    c.gram = cost_gram(k);
    c.kernel = c.endpoint_inv.transpose() * c.gram * c.endpoint_inv;
    // Symmetrize away the last-bit asymmetry from the inversion.
    c.kernel = 0.5 * (c.kernel + c.kernel.transpose()).eval();
    it = cache.emplace(k, std::move(c)).first;
  }
  return it->second;
}

}  // namespace minsnap
