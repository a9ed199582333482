#pragma once

#include <Eigen/Core>

namespace minsnap {

// All per-segment math runs on the normalized domain rho in [-1, 1] with
// monomial basis z(rho) = [1, rho, ..., rho^{2k-1}]. A segment of duration
// 2*delta maps to the normalized domain through tau = delta*rho + midpoint,
// so the qth absolute-time derivative picks up a factor delta^{-q}.

// k x 2k matrix whose row q (1-based) holds the (q-1)th derivative of each
// monomial rho^{j-1} evaluated at rho.
Eigen::MatrixXd basis_derivative_matrix(double rho, int k);

// 2k x 2k map from monomial coefficients to the stacked derivative values
// (orders 0..k-1) at rho = -1 over rho = +1. Invertible for all k >= 1.
Eigen::MatrixXd endpoint_map(int k);

// Gram matrix of the (k-1)th monomial derivatives on [-1, 1]:
// entry (i, j) = integral of d^{k-1}/drho^{k-1} rho^{i-1} times the same for
// rho^{j-1}. Symmetric positive semidefinite; rows/cols below k are zero.
Eigen::MatrixXd cost_gram(int k);

// Diagonal of the 2k x 2k block that converts normalized-domain derivative
// stacks to absolute-time ones: diag{delta^0, ..., delta^{-(k-1)}} twice.
Eigen::VectorXd scaling_block(double delta, int k);

// Constants shared by every segment of a given order. Computed once per k
// and cached behind a mutex; the returned reference stays valid for the
// process lifetime and is safe to read concurrently.
struct BasisConstants {
  int k = 0;
  Eigen::MatrixXd endpoint;      // endpoint_map(k)
  Eigen::MatrixXd endpoint_inv;  // its inverse
  Eigen::MatrixXd gram;          // cost_gram(k)
  Eigen::MatrixXd kernel;        // endpoint_inv^T * gram * endpoint_inv
};

const BasisConstants& basis_constants(int k);

}  // namespace minsnap
