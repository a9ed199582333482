#include "minsnap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "minsnap/basis.hpp"
#include "minsnap/errors.hpp"
#include "minsnap/rng.hpp"

namespace minsnap::bench {

namespace {

double condition_number(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

double eval_monomials(const Eigen::VectorXd& coeffs, double x) {
  double acc = 0.0;
  for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) acc = acc * x + coeffs(j);
  return acc;
}

}  // namespace

Eigen::MatrixXd absolute_segment_cost_matrix(double tau_left, double tau_right, int k) {
  if (!(tau_right > tau_left)) {
    throw std::invalid_argument("absolute form: segment times must increase");
  }
  const int n = 2 * k;
  Eigen::MatrixXd v(n, n);
  v.topRows(k) = basis_derivative_matrix(tau_left, k);
  v.bottomRows(k) = basis_derivative_matrix(tau_right, k);

  // Gram matrix of the (k-1)th monomial derivatives over [tau_left, tau_right]
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int j = k; j <= n; ++j) {
    double coef = 1.0;
    for (int s = j - k + 1; s <= j - 1; ++s) coef *= static_cast<double>(s);
    c(j - 1) = coef;
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = k; i <= n; ++i) {
    for (int j = k; j <= n; ++j) {
      const int p = i + j - 2 * k;
      const double integral =
          (std::pow(tau_right, p + 1) - std::pow(tau_left, p + 1)) / (p + 1);
      h(i - 1, j - 1) = c(i - 1) * c(j - 1) * integral;
    }
  }
  const Eigen::MatrixXd vinv = v.partialPivLu().inverse();
  Eigen::MatrixXd m = vinv.transpose() * h * vinv;
  return 0.5 * (m + m.transpose());
}

AbsoluteFormResult solve_absolute_form(const FixedTimeProblem& problem) {
  const int l = problem.times.segment_count();
  const int k = problem.k;
  const PinExpansion expansion = expand_pins(problem.pins, l, k);

  std::vector<Eigen::MatrixXd> m(l);
  for (int i = 0; i < l; ++i) {
    m[i] = absolute_segment_cost_matrix(problem.times.knots()(i),
                                        problem.times.knots()(i + 1), k);
  }
  const ReducedKkt sys = assemble_reduced_kkt(expansion, m);

  AbsoluteFormResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.matrix.rows());
  if (sys.matrix.rows() > 0) {
    x = Eigen::PartialPivLU<Eigen::MatrixXd>(sys.matrix).solve(sys.rhs);
    if (!x.allFinite()) return out;
  }
  out.solved = true;
  out.endpoint_stacks.resize(l);
  out.coefficients.resize(l);
  double cost = 0.0;
  for (int i = 0; i < l; ++i) {
    Eigen::VectorXd f = expansion.pinned_values[i];
    const auto& free = expansion.free_positions[i];
    for (int cidx = 0; cidx < static_cast<int>(free.size()); ++cidx) {
      f(free[cidx]) += x(sys.offset[i] + cidx);
    }
    out.endpoint_stacks[i] = f;
    cost += f.dot(m[i] * f);

    Eigen::MatrixXd v(2 * k, 2 * k);
    v.topRows(k) = basis_derivative_matrix(problem.times.knots()(i), k);
    v.bottomRows(k) = basis_derivative_matrix(problem.times.knots()(i + 1), k);
    out.coefficients[i] = v.partialPivLu().solve(f);
  }
  out.cost = cost;
  return out;
}

double continuity_residual(const FixedTimeSolution& solution) {
  const Spline& s = solution.spline;
  const int k = s.order();
  double worst = 0.0;
  for (int i = 0; i + 1 < s.segment_count(); ++i) {
    const Eigen::VectorXd right = s.endpoint_derivatives(i, true);
    const Eigen::VectorXd left = s.endpoint_derivatives(i + 1, false);
    for (int q = 0; q < k; ++q) worst = std::max(worst, std::abs(right(q) - left(q)));
  }
  return worst;
}

ConditioningReport compare_formulations(const FixedTimeProblem& problem) {
  const int l = problem.times.segment_count();
  const int k = problem.k;
  const PinExpansion expansion = expand_pins(problem.pins, l, k);

  std::vector<Eigen::MatrixXd> conditioned(l), absolute(l);
  for (int i = 0; i < l; ++i) {
    conditioned[i] = segment_cost_matrix(problem.times.delta(i), k);
    absolute[i] = absolute_segment_cost_matrix(problem.times.knots()(i),
                                               problem.times.knots()(i + 1), k);
  }

  ConditioningReport report;
  report.cond_conditioned = condition_number(assemble_reduced_kkt(expansion, conditioned).matrix);
  report.cond_absolute = condition_number(assemble_reduced_kkt(expansion, absolute).matrix);

  const FixedTimeSolution sol = solve_fixed_time(problem);
  report.cost_conditioned = sol.cost;
  report.continuity_residual = continuity_residual(sol);

  const AbsoluteFormResult abs_result = solve_absolute_form(problem);
  report.absolute_solved = abs_result.solved;
  if (abs_result.solved) {
    report.cost_absolute = abs_result.cost;
    report.cost_gap = std::abs(report.cost_conditioned - report.cost_absolute);
    double worst = 0.0;
    for (int i = 0; i < l; ++i) {
      const double delta = problem.times.delta(i);
      const double mid = problem.times.midpoint(i);
      for (int p = 0; p <= 10; ++p) {
        const double rho = -1.0 + 0.2 * p;
        const double from_normalized = eval_monomials(sol.spline.coefficients()[i], rho);
        const double from_absolute = eval_monomials(abs_result.coefficients[i], delta * rho + mid);
        worst = std::max(worst, std::abs(from_normalized - from_absolute));
      }
    }
    report.mapping_error = worst;
  }
  return report;
}

FixedTimeProblem waypoint_instance(int k, int l, std::uint64_t seed, double delta_lo,
                                   double delta_hi, double value_span) {
  Rng rng(seed);
  Eigen::VectorXd d(l);
  for (int i = 0; i < l; ++i) d(i) = rng.uniform(delta_lo, delta_hi);
  FixedTimeProblem p;
  p.k = k;
  p.times = durations_to_times(d, 0.0);
  for (int j = 0; j <= l; ++j) p.pins.push_back({j, 0, rng.uniform(-value_span, value_span)});
  for (int q = 1; q < k; ++q) {
    p.pins.push_back({0, q, 0.0});
    p.pins.push_back({l, q, 0.0});
  }
  return p;
}

std::vector<ScalingPoint> run_scaling(int k, int l_min, int l_max, int reps,
                                      std::uint64_t seed) {
  if (reps < 3) throw std::invalid_argument("run_scaling: need at least 3 repetitions");
  if (l_min < 1 || l_max < l_min) throw std::invalid_argument("run_scaling: bad segment range");
  std::vector<ScalingPoint> points;
  for (int l = l_min; l <= l_max; l *= 2) {
    const FixedTimeProblem problem = waypoint_instance(k, l, seed + l);
    volatile double sink = solve_fixed_time(problem).cost;  // warm caches
    (void)sink;
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const FixedTimeSolution sol = solve_fixed_time(problem);
      const auto t1 = std::chrono::steady_clock::now();
      sink = sol.cost;
      samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    points.push_back({l, samples[samples.size() / 2], reps});
  }
  return points;
}

double fitted_loglog_slope(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2) throw std::invalid_argument("fitted_loglog_slope: need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    const double x = std::log(static_cast<double>(p.segments));
    const double y = std::log(std::max(p.median_ms, 1e-9));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<JevalsRow> run_jevals(const std::vector<int>& segment_counts, int trials,
                                  std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("run_jevals: need at least one trial");
  std::vector<JevalsRow> rows;
  for (int l : segment_counts) {
    double sums[3] = {0.0, 0.0, 0.0};
    const DescentMethod methods[3] = {DescentMethod::kExactGradient,
                                      DescentMethod::kFiniteDifference,
                                      DescentMethod::kRandomSearch};
    for (int trial = 0; trial < trials; ++trial) {
      // mild duration spread and waypoint span keep every method convergent
      // inside the iteration budget on most draws
      const FixedTimeProblem instance =
          waypoint_instance(5, l, seed + 7919ull * trial + 104729ull * l, 0.8, 1.2, 2.0);
      VariableTimeProblem problem;
      problem.k = instance.k;
      problem.pins = instance.pins;
      problem.initial_half_durations = instance.times.half_durations();
      problem.tau0 = 0.0;

      OptimizerConfig config;
      config.mode = OptimizerMode::kFixedTotalTime;
      config.total_time = 2.0 * problem.initial_half_durations.sum();
      config.tol = 1e-4 * (1.0 + problem.initial_half_durations.sum());
      config.max_iters = 500;
      config.seed = seed + trial;

      for (int m = 0; m < 3; ++m) {
        const VariableTimeResult r = solve_variable_time(problem, config, methods[m]);
        sums[m] += static_cast<double>(r.trace.back().cost_evaluations);
      }
    }
    for (int m = 0; m < 3; ++m) {
      rows.push_back({l, methods[m], sums[m] / trials});
    }
  }
  return rows;
}

}  // namespace minsnap::bench
