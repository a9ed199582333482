#pragma once

// Benchmark and diagnostic machinery behind the command-line harness: the
// absolute-time monomial formulation (kept out of the core library on
// purpose; it exists to demonstrate why the normalized form is used), the
// solver scaling study and the descent-method evaluation-count study.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "minsnap/fixed_time.hpp"
#include "minsnap/time_opt.hpp"

namespace minsnap::bench {

// Fixed-time interpolation posed directly on absolute-time monomials
// (coefficients of tau^j instead of the per-segment normalized domain).
// Mathematically equivalent; numerically it degrades quickly with segment
// count and with knots far from the origin.
struct AbsoluteFormResult {
  bool solved = false;
  double cost = 0.0;
  std::vector<Eigen::VectorXd> coefficients;     // absolute-time monomials
  std::vector<Eigen::VectorXd> endpoint_stacks;  // f_i
};

// Per-segment cost matrix on the derivative stack in the absolute-time form:
// V_i^{-T} H_i V_i^{-1} with V_i stacking monomial derivative rows at the two
// knot times and H_i the Gram matrix of the (k-1)th monomial derivatives over
// the segment.
Eigen::MatrixXd absolute_segment_cost_matrix(double tau_left, double tau_right, int k);

AbsoluteFormResult solve_absolute_form(const FixedTimeProblem& problem);

struct ConditioningReport {
  double cond_conditioned = 0.0;  // reduced KKT, normalized-domain form
  double cond_absolute = 0.0;     // reduced KKT, absolute-time form
  bool absolute_solved = false;
  double cost_conditioned = 0.0;
  double cost_absolute = 0.0;
  double cost_gap = 0.0;          // |difference|, when both solve
  double continuity_residual = 0.0;  // conditioned form, worst interior-knot mismatch
  double mapping_error = 0.0;  // worst pointwise gap between the two coefficient forms
};

// Solves the same problem in both formulations and reports condition numbers
// of the two reduced KKT matrices plus cross-checks of the solutions.
ConditioningReport compare_formulations(const FixedTimeProblem& problem);

// Worst absolute mismatch of derivative orders 0..k-1 across interior knots,
// evaluated from the recovered per-segment coefficients.
double continuity_residual(const FixedTimeSolution& solution);

// Random well-posed waypoint instance used by the timing and evaluation
// benches: a value pin at every knot, derivative orders 1..k-1 pinned to zero
// at both ends.
FixedTimeProblem waypoint_instance(int k, int l, std::uint64_t seed,
                                   double delta_lo = 0.5, double delta_hi = 1.5,
                                   double value_span = 5.0);

struct ScalingPoint {
  int segments = 0;
  double median_ms = 0.0;
  int reps = 0;
};

// Times solve_fixed_time over a geometric grid of segment counts.
std::vector<ScalingPoint> run_scaling(int k, int l_min, int l_max, int reps,
                                      std::uint64_t seed);

// Least-squares slope of log(median_ms) against log(segments).
double fitted_loglog_slope(const std::vector<ScalingPoint>& points);

struct JevalsRow {
  int segments = 0;
  DescentMethod method = DescentMethod::kExactGradient;
  double mean_evaluations = 0.0;
};

// Mean number of cost evaluations each descent method needs on seeded random
// instances with matched termination settings.
std::vector<JevalsRow> run_jevals(const std::vector<int>& segment_counts, int trials,
                                  std::uint64_t seed);

}  // namespace minsnap::bench
