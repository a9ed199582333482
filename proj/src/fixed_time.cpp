#include "minsnap/fixed_time.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "minsnap/basis.hpp"
#include "minsnap/errors.hpp"

namespace minsnap {

namespace {

void validate_problem(const FixedTimeProblem& problem) {
  if (problem.k < 1) throw std::invalid_argument("fixed-time problem: k must be >= 1");
  if (problem.times.segment_count() < 1) {
    throw std::invalid_argument("fixed-time problem: no segments");
  }
  if (problem.pins.empty()) {
    throw std::invalid_argument("fixed-time problem: at least one pin is required");
  }
  validate_pins(problem.pins, problem.times.segment_count(), problem.k);
}

// Diagonal converting absolute-time derivative stacks to normalized-domain
// ones: entry q is delta^{q mod k}. Inverse of scaling_block(delta, k).
Eigen::VectorXd normalizing_diagonal(double delta, int k) {
  Eigen::VectorXd d(2 * k);
  double p = 1.0;
  for (int q = 0; q < k; ++q) {
    d(q) = p;
    d(k + q) = p;
    p *= delta;
  }
  return d;
}

// Shared tail of both solve paths: recover f, coefficients and the cost from
// the free values.
FixedTimeSolution finish_solution(const FixedTimeProblem& problem,
                                  const PinExpansion& expansion,
                                  const std::vector<Eigen::MatrixXd>& cost_matrices,
                                  BackwardResult&& reduced) {
  const int l = problem.times.segment_count();
  const int k = problem.k;
  const BasisConstants& constants = basis_constants(k);

  FixedTimeSolution sol;
  sol.free_values = std::move(reduced.free_values);
  sol.multipliers = std::move(reduced.multipliers);
  sol.endpoint_stacks.resize(l);

  std::vector<Eigen::VectorXd> coeffs(l);
  double cost = 0.0;
  double magnitude = 0.0;
  for (int i = 0; i < l; ++i) {
    Eigen::VectorXd f = expansion.pinned_values[i];
    const auto& free = expansion.free_positions[i];
    for (int c = 0; c < static_cast<int>(free.size()); ++c) {
      f(free[c]) += sol.free_values[i](c);
    }
    sol.endpoint_stacks[i] = f;
    const double term = f.dot(cost_matrices[i] * f);
    cost += term;
    magnitude += std::abs(term);

    const Eigen::VectorXd normalized =
        normalizing_diagonal(problem.times.delta(i), k).cwiseProduct(f);
    coeffs[i] = constants.endpoint_inv * normalized;
  }
  // The quadratic form is nonnegative in exact arithmetic; a visibly negative
  // total means the conditioning of the duration mix exceeded double
  // precision, and the result would be meaningless.
  if (!std::isfinite(cost) || cost < -1e-9 * magnitude) {
    throw NumericalError("fixed-time solve: cost form lost positivity (duration ratios too extreme)");
  }
  sol.cost = std::max(cost, 0.0);
  sol.spline = Spline(k, problem.times, std::move(coeffs));
  return sol;
}

}  // namespace

Eigen::MatrixXd segment_cost_matrix(double delta, int k) {
  return segment_cost_matrix(delta, k, cost_duration_exponent(k));
}

Eigen::MatrixXd segment_cost_matrix(double delta, int k, int exponent) {
  if (!(delta > 0.0)) throw std::invalid_argument("segment_cost_matrix: delta must be positive");
  const BasisConstants& constants = basis_constants(k);
  const Eigen::VectorXd d = normalizing_diagonal(delta, k);
  const double scale = std::pow(delta, exponent);
  return scale * (d.asDiagonal() * constants.kernel * d.asDiagonal());
}

SegmentBlocks assemble_segment_blocks(const Eigen::MatrixXd& cost_matrix,
                                      const PinExpansion& expansion, int segment) {
  const int k = expansion.k;
  const auto& free = expansion.free_positions[segment];
  const int nf = static_cast<int>(free.size());

  SegmentBlocks blocks;
  blocks.free_minus = k - expansion.mu_minus[segment];
  blocks.free_plus = k - expansion.mu_plus[segment];

  Eigen::MatrixXd reduced(nf, nf);
  Eigen::VectorXd linear(nf);
  const Eigen::VectorXd mf = cost_matrix * expansion.pinned_values[segment];
  for (int r = 0; r < nf; ++r) {
    linear(r) = -mf(free[r]);
    for (int c = 0; c < nf; ++c) reduced(r, c) = cost_matrix(free[r], free[c]);
  }

  const int nm = blocks.free_minus;
  const int np = blocks.free_plus;
  blocks.A = reduced.topLeftCorner(nm, nm);
  blocks.B = reduced.topRightCorner(nm, np);
  blocks.C = reduced.bottomRightCorner(np, np);
  blocks.c_minus = linear.head(nm);
  blocks.c_plus = linear.tail(np);
  return blocks;
}

namespace {

void factor_pivot(SegmentBlocks& blocks, int segment) {
  if (blocks.A_bar.rows() == 0) return;
  if (!blocks.A_bar.allFinite()) {
    throw NumericalError("forward elimination produced non-finite pivot at segment " +
                         std::to_string(segment + 1));
  }
  blocks.A_bar_llt.compute(blocks.A_bar);
  if (blocks.A_bar_llt.info() != Eigen::Success) {
    throw NumericalError("insufficiently pinned problem: elimination pivot not positive definite at segment " +
                         std::to_string(segment + 1));
  }
}

}  // namespace

void forward_elimination(std::vector<SegmentBlocks>& blocks) {
  const int l = static_cast<int>(blocks.size());
  for (int i = 0; i < l; ++i) {
    SegmentBlocks& cur = blocks[i];
    if (i == 0) {
      cur.A_bar = cur.A;
      cur.c_bar_minus = cur.c_minus;
    } else {
      const SegmentBlocks& prev = blocks[i - 1];
      if (prev.A_bar.rows() > 0) {
        const Eigen::MatrixXd ainv_b = prev.A_bar_llt.solve(prev.B);
        cur.A_bar = cur.A + prev.C - prev.B.transpose() * ainv_b;
        cur.c_bar_minus = cur.c_minus + prev.c_plus -
                          prev.B.transpose() * prev.A_bar_llt.solve(prev.c_bar_minus);
      } else {
        cur.A_bar = cur.A + prev.C;
        cur.c_bar_minus = cur.c_minus + prev.c_plus;
      }
    }
    factor_pivot(cur, i);
  }
}

BackwardResult backward_substitution(const std::vector<SegmentBlocks>& blocks) {
  const int l = static_cast<int>(blocks.size());
  const SegmentBlocks& last = blocks[l - 1];

  // Terminal Schur complement in the rightmost free block.
  Eigen::MatrixXd schur = last.C;
  Eigen::VectorXd rhs = last.c_plus;
  if (last.A_bar.rows() > 0) {
    schur -= last.B.transpose() * last.A_bar_llt.solve(last.B);
    rhs -= last.B.transpose() * last.A_bar_llt.solve(last.c_bar_minus);
  }
  Eigen::VectorXd g_plus(last.free_plus);
  if (schur.rows() > 0) {
    if (!schur.allFinite()) throw NumericalError("back substitution: non-finite terminal pivot");
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("insufficiently pinned problem: terminal pivot not positive definite");
    }
    g_plus = llt.solve(rhs);
  }

  BackwardResult out;
  out.free_values.resize(l);
  for (int i = l - 1; i >= 0; --i) {
    const SegmentBlocks& cur = blocks[i];
    Eigen::VectorXd g_minus(cur.free_minus);
    if (cur.A_bar.rows() > 0) {
      g_minus = cur.A_bar_llt.solve(cur.c_bar_minus - cur.B * g_plus);
    }
    Eigen::VectorXd g(cur.free_minus + cur.free_plus);
    g << g_minus, g_plus;
    out.free_values[i] = std::move(g);
    g_plus = std::move(g_minus);  // continuity: g_{i-1}^+ = g_i^-
  }

  out.multipliers.resize(l > 1 ? l - 1 : 0);
  for (int i = 0; i + 1 < l; ++i) {
    const SegmentBlocks& cur = blocks[i];
    const Eigen::VectorXd g_minus = out.free_values[i].head(cur.free_minus);
    const Eigen::VectorXd g_plus_i = out.free_values[i].tail(cur.free_plus);
    out.multipliers[i] = cur.B.transpose() * g_minus + cur.C * g_plus_i - cur.c_plus;
  }
  return out;
}

FixedTimeSolution solve_fixed_time(const FixedTimeProblem& problem) {
  validate_problem(problem);
  const int l = problem.times.segment_count();
  const PinExpansion expansion = expand_pins(problem.pins, l, problem.k);

  std::vector<Eigen::MatrixXd> cost_matrices(l);
  std::vector<SegmentBlocks> blocks(l);
  for (int i = 0; i < l; ++i) {
    cost_matrices[i] = segment_cost_matrix(problem.times.delta(i), problem.k);
    blocks[i] = assemble_segment_blocks(cost_matrices[i], expansion, i);
  }

  forward_elimination(blocks);
  BackwardResult reduced = backward_substitution(blocks);
  return finish_solution(problem, expansion, cost_matrices, std::move(reduced));
}

ReducedKkt assemble_reduced_kkt(const PinExpansion& expansion,
                                const std::vector<Eigen::MatrixXd>& cost_matrices) {
  const int l = expansion.segment_count;
  std::vector<SegmentBlocks> blocks(l);
  ReducedKkt out;
  out.offset.assign(l, 0);
  for (int i = 0; i < l; ++i) {
    blocks[i] = assemble_segment_blocks(cost_matrices[i], expansion, i);
    out.offset[i] = out.n_free;
    out.n_free += blocks[i].free_minus + blocks[i].free_plus;
  }
  int n_mult = 0;
  for (int i = 0; i + 1 < l; ++i) n_mult += blocks[i].free_plus;

  const int dim = out.n_free + n_mult;
  out.matrix = Eigen::MatrixXd::Zero(dim, dim);
  out.rhs = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < l; ++i) {
    const SegmentBlocks& b = blocks[i];
    const int nm = b.free_minus;
    const int np = b.free_plus;
    out.matrix.block(out.offset[i], out.offset[i], nm, nm) = b.A;
    out.matrix.block(out.offset[i], out.offset[i] + nm, nm, np) = b.B;
    out.matrix.block(out.offset[i] + nm, out.offset[i], np, nm) = b.B.transpose();
    out.matrix.block(out.offset[i] + nm, out.offset[i] + nm, np, np) = b.C;
    out.rhs.segment(out.offset[i], nm) = b.c_minus;
    out.rhs.segment(out.offset[i] + nm, np) = b.c_plus;
  }
  // Continuity rows g_{i+1}^- - g_i^+ = 0, one per free derivative order at
  // each interior knot; facing free sets match by construction.
  int row = out.n_free;
  for (int i = 0; i + 1 < l; ++i) {
    const int np = blocks[i].free_plus;
    for (int r = 0; r < np; ++r) {
      out.matrix(row, out.offset[i + 1] + r) = 1.0;
      out.matrix(row, out.offset[i] + blocks[i].free_minus + r) = -1.0;
      out.matrix(out.offset[i + 1] + r, row) = 1.0;
      out.matrix(out.offset[i] + blocks[i].free_minus + r, row) = -1.0;
      ++row;
    }
  }
  return out;
}

FixedTimeSolution solve_dense_oracle(const FixedTimeProblem& problem) {
  validate_problem(problem);
  const int l = problem.times.segment_count();
  const int k = problem.k;
  if (l * k > 2000) {
    throw std::invalid_argument("solve_dense_oracle: problem too large for the dense path (l*k > 2000)");
  }
  const PinExpansion expansion = expand_pins(problem.pins, l, k);

  std::vector<Eigen::MatrixXd> cost_matrices(l);
  std::vector<SegmentBlocks> blocks(l);
  for (int i = 0; i < l; ++i) {
    cost_matrices[i] = segment_cost_matrix(problem.times.delta(i), k);
    blocks[i] = assemble_segment_blocks(cost_matrices[i], expansion, i);
  }
  const ReducedKkt sys = assemble_reduced_kkt(expansion, cost_matrices);
  const Eigen::MatrixXd& kkt = sys.matrix;
  const Eigen::VectorXd& rhs = sys.rhs;
  const std::vector<int>& offset = sys.offset;
  const int n_free = sys.n_free;
  const int dim = static_cast<int>(kkt.rows());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  if (dim > 0) {
    if (dim <= 1500) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(kkt);
      if (qr.rank() < dim) {
        throw NumericalError("dense oracle: reduced KKT system is singular");
      }
      x = qr.solve(rhs);
    } else {
      x = Eigen::PartialPivLU<Eigen::MatrixXd>(kkt).solve(rhs);
    }
    const double scale = 1.0 + rhs.norm();
    if (!x.allFinite() || (kkt * x - rhs).norm() > 1e-6 * scale) {
      throw NumericalError("dense oracle: reduced KKT system is singular");
    }
  }

  BackwardResult reduced;
  reduced.free_values.resize(l);
  for (int i = 0; i < l; ++i) {
    reduced.free_values[i] = x.segment(offset[i], blocks[i].free_minus + blocks[i].free_plus);
  }
  reduced.multipliers.resize(l > 1 ? l - 1 : 0);
  int row = n_free;
  for (int i = 0; i + 1 < l; ++i) {
    reduced.multipliers[i] = x.segment(row, blocks[i].free_plus);
    row += blocks[i].free_plus;
  }
  return finish_solution(problem, expansion, cost_matrices, std::move(reduced));
}

}  // namespace minsnap
