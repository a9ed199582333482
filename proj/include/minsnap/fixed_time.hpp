#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "minsnap/pins.hpp"
#include "minsnap/spline.hpp"
#include "minsnap/time_allocation.hpp"

namespace minsnap {

// Fixed-time interpolation problem: minimize the integral of the squared
// (k-1)th derivative over the knot span, subject to continuity of orders
// 0..k-1 at interior knots and the given pins.
struct FixedTimeProblem {
  int k = 0;
  TimeAllocation times;
  PinSet pins;
};

// Power of the half-duration in the per-segment cost. Substituting
// tau = delta*rho + mid into the cost integral gives delta^{-2(k-1)} from the
// chain rule and delta^{+1} from the measure, hence 3 - 2k.
inline constexpr int cost_duration_exponent(int k) { return 3 - 2 * k; }

// Cost of one segment as a quadratic form on its absolute-time derivative
// stack f in R^{2k}: f^T M f equals the integral over the segment of the
// squared (k-1)th derivative of the unique interpolating polynomial.
Eigen::MatrixXd segment_cost_matrix(double delta, int k);
// Variant with an explicit duration exponent, for scaling experiments.
Eigen::MatrixXd segment_cost_matrix(double delta, int k, int exponent);

// One segment's contribution to the reduced problem in the free derivative
// values g_i = (g_i^-, g_i^+). The reduced objective per segment reads
// g^T [A B; B^T C] g - 2 g^T (c^-; c^+) + const, i.e. c carries the negated
// linear term so the elimination recursions below hold verbatim.
struct SegmentBlocks {
  int free_minus = 0;  // k - mu_i^-
  int free_plus = 0;   // k - mu_i^+
  Eigen::MatrixXd A, B, C;
  Eigen::VectorXd c_minus, c_plus;
  // forward-elimination state
  Eigen::MatrixXd A_bar;
  Eigen::VectorXd c_bar_minus;
  Eigen::LLT<Eigen::MatrixXd> A_bar_llt;
};

SegmentBlocks assemble_segment_blocks(const Eigen::MatrixXd& cost_matrix,
                                      const PinExpansion& expansion, int segment);

// Forward sweep of the block elimination:
//   A_bar_1 = A_1,  A_bar_i = A_i + C_{i-1} - B_{i-1}^T A_bar_{i-1}^{-1} B_{i-1}
//   c_bar_1 = c_1^-, c_bar_i = c_i^- + c_{i-1}^+ - B_{i-1}^T A_bar_{i-1}^{-1} c_bar_{i-1}
// Every A_bar_i is a Cholesky pivot of the reduced Hessian, so positive
// definiteness is exactly well-posedness; a failed factorization throws
// NumericalError naming the segment.
void forward_elimination(std::vector<SegmentBlocks>& blocks);

struct BackwardResult {
  std::vector<Eigen::VectorXd> free_values;  // g_i = (g_i^-, g_i^+) per segment
  std::vector<Eigen::VectorXd> multipliers;  // lambda_i per interior knot
};

// Back substitution:
//   g_l^+ = (C_l - B_l^T A_bar_l^{-1} B_l)^{-1} (c_l^+ - B_l^T A_bar_l^{-1} c_bar_l)
//   g_i^- = A_bar_i^{-1} (c_bar_i - B_i g_i^+),  g_i^+ = g_{i+1}^-
//   lambda_i = B_i^T g_i^- + C_i g_i^+ - c_i^+
BackwardResult backward_substitution(const std::vector<SegmentBlocks>& blocks);

struct FixedTimeSolution {
  Spline spline;
  std::vector<Eigen::VectorXd> endpoint_stacks;  // f_i per segment
  std::vector<Eigen::VectorXd> free_values;      // g_i per segment
  std::vector<Eigen::VectorXd> multipliers;      // per interior knot
  double cost = 0.0;
};

// Chain solve in O(k^3 l): expand pins, assemble per-segment blocks, forward
// elimination, back substitution, then recover coefficients segment by
// segment from the endpoint map.
FixedTimeSolution solve_fixed_time(const FixedTimeProblem& problem);

// Ground-truth path: assembles the reduced KKT system over all free values
// and continuity multipliers and solves it densely. Same contract as
// solve_fixed_time; intended for verification, guarded to modest sizes.
FixedTimeSolution solve_dense_oracle(const FixedTimeProblem& problem);

// Reduced KKT system over the free derivative values and the continuity
// multipliers, for an arbitrary per-segment quadratic form on the derivative
// stacks. Rows/columns 0..n_free-1 are the per-segment free blocks, the rest
// the interior-knot continuity rows g_{i+1}^- - g_i^+ = 0.
struct ReducedKkt {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<int> offset;  // start of each segment's free block
  int n_free = 0;
};

ReducedKkt assemble_reduced_kkt(const PinExpansion& expansion,
                                const std::vector<Eigen::MatrixXd>& cost_matrices);

}  // namespace minsnap
