#include "minsnap/time_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "minsnap/errors.hpp"

namespace minsnap {

namespace {

constexpr int kMaxHalvings = 60;
constexpr double kRandomProbeStep = 1e-6;  // zeta of the directional difference

double clamp_alpha(double a) { return std::clamp(a, 1e-12, 1e6); }

void validate_config(const OptimizerConfig& config) {
  if (!(config.d_min > 0.0)) throw std::invalid_argument("optimizer: d_min must be positive");
  if (!(config.armijo_c > 0.0 && config.armijo_c < 1.0)) {
    throw std::invalid_argument("optimizer: armijo_c must lie in (0,1)");
  }
  if (!(config.shrink > 0.0 && config.shrink < 1.0)) {
    throw std::invalid_argument("optimizer: shrink must lie in (0,1)");
  }
  if (!(config.alpha_init > 0.0)) throw std::invalid_argument("optimizer: alpha_init must be positive");
  if (config.kappa < 0.0) throw std::invalid_argument("optimizer: kappa must be nonnegative");
  if (config.max_iters < 0) throw std::invalid_argument("optimizer: max_iters must be nonnegative");
}

}  // namespace

Eigen::VectorXd project_feasible(const Eigen::VectorXd& d, const OptimizerConfig& config) {
  const int n = static_cast<int>(d.size());
  if (config.mode == OptimizerMode::kTimePenalty) {
    return d.cwiseMax(config.d_min);
  }
  const double target = 0.5 * config.total_time;
  if (!(target > n * config.d_min)) {
    throw std::invalid_argument("project_feasible: total_time too small for the duration floor");
  }
  // Feasible points pass through untouched, which also makes the projection
  // idempotent at the bit level.
  if ((d.array() >= config.d_min).all() && d.sum() == target) return d;

  // Euclidean projection of y = d - d_min onto {y >= 0, sum y = s}.
  const double s = target - n * config.d_min;
  Eigen::VectorXd y = d.array() - config.d_min;
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (int j = 0; j < n; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - s) / (j + 1);
    // the first candidate is always admissible (s > 0); testing it in floating
    // point cancels catastrophically when u[0] dwarfs s
    if (j == 0 || u[j] - candidate > 0.0) {
      theta = candidate;
    } else {
      break;
    }
  }
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::max(y(i) - theta, 0.0) + config.d_min;
  // restore the sum exactly on the largest component
  for (int pass = 0; pass < 8; ++pass) {
    const double err = target - x.sum();
    if (err == 0.0) break;
    int arg = 0;
    x.maxCoeff(&arg);
    x(arg) += err;
  }
  return x;
}

Eigen::VectorXd cost_gradient(int k, const Eigen::VectorXd& half_durations,
                              const std::vector<Eigen::VectorXd>& endpoint_stacks) {
  const int l = static_cast<int>(half_durations.size());
  if (static_cast<int>(endpoint_stacks.size()) != l) {
    throw std::invalid_argument("cost_gradient: stack count does not match segment count");
  }
  const int e = cost_duration_exponent(k);
  Eigen::VectorXd grad(l);
  for (int i = 0; i < l; ++i) {
    const double delta = half_durations(i);
    if (!(delta > 0.0)) throw std::invalid_argument("cost_gradient: durations must be positive");
    const Eigen::VectorXd& f = endpoint_stacks[i];
    const Eigen::VectorXd y = segment_cost_matrix(delta, k) * f;
    const double quad = f.dot(y);
    double weighted = 0.0;
    for (int q = 0; q < 2 * k; ++q) weighted += static_cast<double>(q % k) * f(q) * y(q);
    grad(i) = (e * quad + 2.0 * weighted) / delta;
  }
  return grad;
}

SplineCostObjective::SplineCostObjective(std::vector<Entry> entries, double tau0)
    : entries_(std::move(entries)), tau0_(tau0) {
  if (entries_.empty()) throw std::invalid_argument("objective: needs at least one spline");
}

double SplineCostObjective::solve_at(const Eigen::VectorXd& d) {
  if (have_cache_ && cached_d_.size() == d.size() && cached_d_ == d) {
    return cached_cost_;
  }
  const TimeAllocation times = durations_to_times(d, tau0_);
  double total = 0.0;
  cached_solutions_.clear();
  cached_solutions_.reserve(entries_.size());
  for (const Entry& e : entries_) {
    FixedTimeProblem p;
    p.k = e.k;
    p.times = times;
    p.pins = e.pins;
    try {
      cached_solutions_.push_back(solve_fixed_time(p));
    } catch (const NumericalError& err) {
      if (e.label.empty()) throw;
      throw NumericalError(e.label + ": " + err.what());
    } catch (const std::invalid_argument& err) {
      if (e.label.empty()) throw;
      throw std::invalid_argument(e.label + ": " + err.what());
    }
    total += cached_solutions_.back().cost;
  }
  ++evals_;
  cached_d_ = d;
  cached_cost_ = total;
  have_cache_ = true;
  return total;
}

double SplineCostObjective::cost(const Eigen::VectorXd& d) { return solve_at(d); }

double SplineCostObjective::cost_and_gradient(const Eigen::VectorXd& d,
                                              Eigen::VectorXd* gradient) {
  const double total = solve_at(d);
  if (gradient != nullptr) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d.size());
    for (size_t i = 0; i < entries_.size(); ++i) {
      g += cost_gradient(entries_[i].k, d, cached_solutions_[i].endpoint_stacks);
    }
    *gradient = g;
  }
  return total;
}

TimeAllocationOptimizer::TimeAllocationOptimizer(VariableTimeObjective& objective,
                                                 const OptimizerConfig& config)
    : objective_(objective), config_(config), rng_(config.seed) {
  validate_config(config_);
}

double TimeAllocationOptimizer::augmented(double cost, const Eigen::VectorXd& d) const {
  if (config_.mode == OptimizerMode::kTimePenalty) {
    return cost + 2.0 * config_.kappa * d.sum();
  }
  return cost;
}

StepResult TimeAllocationOptimizer::armijo_step(const Eigen::VectorXd& d,
                                                const Eigen::VectorXd& gradient,
                                                double objective_at_d) {
  const double grad_sq = gradient.squaredNorm();
  double alpha = alpha_;
  for (int halving = 0; halving < kMaxHalvings; ++halving) {
    const Eigen::VectorXd trial = project_feasible(d - alpha * gradient, config_);
    double value = std::numeric_limits<double>::infinity();
    try {
      value = augmented(objective_.cost(trial), trial);
    } catch (const NumericalError&) {
      // unevaluable trial point, e.g. a duration mix beyond double precision;
      // treat as infinitely bad and keep backtracking
    }
    if (value <= objective_at_d - config_.armijo_c * alpha * grad_sq) {
      alpha_ = clamp_alpha(alpha);
      return {trial, value, alpha, false};
    }
    alpha *= config_.shrink;
  }
  return {d, objective_at_d, 0.0, true};
}

namespace {

double seed_alpha(const OptimizerConfig& config, const Eigen::VectorXd& d,
                  const Eigen::VectorXd& gradient) {
  const double gnorm = gradient.lpNorm<Eigen::Infinity>();
  const double dnorm = d.lpNorm<Eigen::Infinity>();
  return clamp_alpha(config.alpha_init * (1.0 + dnorm) / (1.0 + gnorm));
}

}  // namespace

StepResult TimeAllocationOptimizer::step_exact(const Eigen::VectorXd& d) {
  Eigen::VectorXd grad_cost;
  const double cost = objective_.cost_and_gradient(d, &grad_cost);
  Eigen::VectorXd gradient = grad_cost;
  if (config_.mode == OptimizerMode::kTimePenalty) {
    gradient.array() += 2.0 * config_.kappa;
  }
  if (have_previous_) {
    const Eigen::VectorXd s = d - prev_d_;
    const Eigen::VectorXd y = gradient - prev_gradient_;
    const double sy = s.dot(y);
    alpha_ = sy > 0.0 ? clamp_alpha(s.squaredNorm() / sy) : clamp_alpha(alpha_ * 2.0);
  } else {
    alpha_ = seed_alpha(config_, d, gradient);
  }
  prev_d_ = d;
  prev_gradient_ = gradient;
  have_previous_ = true;
  return armijo_step(d, gradient, augmented(cost, d));
}

StepResult TimeAllocationOptimizer::step_finite_difference(const Eigen::VectorXd& d) {
  const int l = static_cast<int>(d.size());
  const double cost = objective_.cost(d);
  Eigen::VectorXd gradient(l);
  for (int j = 0; j < l; ++j) {
    const double gamma = config_.fd_step * std::max(d(j), 1.0);
    Eigen::VectorXd probe = d;
    probe(j) += gamma;
    double probe_cost;
    try {
      probe_cost = objective_.cost(probe);
    } catch (const NumericalError&) {
      probe_cost = cost + 1e6 * (1.0 + std::abs(cost)) * gamma;  // steeply uphill
    }
    gradient(j) = (probe_cost - cost) / gamma;
  }
  if (config_.mode == OptimizerMode::kTimePenalty) {
    gradient.array() += 2.0 * config_.kappa;
  }
  if (have_previous_) {
    const Eigen::VectorXd s = d - prev_d_;
    const Eigen::VectorXd y = gradient - prev_gradient_;
    const double sy = s.dot(y);
    alpha_ = sy > 0.0 ? clamp_alpha(s.squaredNorm() / sy) : clamp_alpha(alpha_ * 2.0);
  } else {
    alpha_ = seed_alpha(config_, d, gradient);
  }
  prev_d_ = d;
  prev_gradient_ = gradient;
  have_previous_ = true;
  return armijo_step(d, gradient, augmented(cost, d));
}

StepResult TimeAllocationOptimizer::step_random(const Eigen::VectorXd& d, int iteration) {
  Eigen::VectorXd direction(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) direction(i) = rng_.gaussian();
  return step_random_along(d, iteration, direction);
}

StepResult TimeAllocationOptimizer::step_random_along(const Eigen::VectorXd& d, int iteration,
                                                      const Eigen::VectorXd& direction) {
  if (iteration < 1) throw std::invalid_argument("step_random: iteration index starts at 1");
  const double cost = objective_.cost(d);
  double directional = 0.0;
  const double dir_max = direction.lpNorm<Eigen::Infinity>();
  if (dir_max > 0.0) {
    // keep the probe point strictly positive
    double zeta = kRandomProbeStep;
    const double dmin = d.minCoeff();
    if (zeta * dir_max > 0.45 * dmin) zeta = 0.45 * dmin / dir_max;
    const Eigen::VectorXd probe = d + zeta * direction;
    try {
      directional = (objective_.cost(probe) - cost) / zeta;
    } catch (const NumericalError&) {
      return {d, augmented(cost, d), 0.0, false};
    }
  }
  if (config_.mode == OptimizerMode::kTimePenalty) {
    directional += 2.0 * config_.kappa * direction.sum();
  }
  if (!std::isfinite(directional)) {
    return {d, augmented(cost, d), 0.0, false};
  }
  const double eps = config_.random_step0 / std::sqrt(static_cast<double>(iteration));
  Eigen::VectorXd move = (eps * directional) * direction;
  // keep single moves small against the iterate scale; an unclamped
  // directional difference can be orders of magnitude too large on steep
  // instances and turns the iteration into a corner-hopping walk
  const double cap = 0.05 * (1.0 + d.lpNorm<Eigen::Infinity>());
  const double move_norm = move.lpNorm<Eigen::Infinity>();
  if (move_norm > cap) move *= cap / move_norm;
  const Eigen::VectorXd next = project_feasible(d - move, config_);
  try {
    const double value = augmented(objective_.cost(next), next);
    return {next, value, eps, false};
  } catch (const NumericalError&) {
    return {d, augmented(cost, d), 0.0, false};
  }
}

TimeAllocationOptimizer::RunResult TimeAllocationOptimizer::run(DescentMethod method,
                                                                const Eigen::VectorXd& d_init) {
  Eigen::VectorXd d = project_feasible(d_init, config_);
  const double tol =
      config_.tol >= 0.0 ? config_.tol : 1e-8 * (1.0 + d.sum());

  RunResult out;
  const double phi0 = augmented(objective_.cost(d), d);
  out.trace.push_back({d, phi0, 0.0, objective_.evaluation_count()});

  // A single sub-tolerance move certifies stationarity for the deterministic
  // methods; the stochastic iteration must repeat it before we believe it.
  const int needed_small = method == DescentMethod::kRandomSearch ? 5 : 1;
  int consecutive_small = 0;
  for (int iter = 1; iter <= config_.max_iters; ++iter) {
    StepResult step;
    switch (method) {
      case DescentMethod::kExactGradient:
        step = step_exact(d);
        break;
      case DescentMethod::kFiniteDifference:
        step = step_finite_difference(d);
        break;
      case DescentMethod::kRandomSearch:
        step = step_random(d, iter);
        break;
    }
    if (step.stagnated) {
      out.stagnated = true;
      break;
    }
    const double step_norm = (step.d - d).lpNorm<Eigen::Infinity>();
    if (step_norm > 0.0) {
      out.trace.push_back({step.d, step.objective, step.step_size, objective_.evaluation_count()});
    }
    d = step.d;
    consecutive_small = step_norm < tol ? consecutive_small + 1 : 0;
    if (consecutive_small >= needed_small) break;
  }
  out.d_star = d;
  return out;
}

VariableTimeResult solve_variable_time(const VariableTimeProblem& problem,
                                       const OptimizerConfig& config, DescentMethod method) {
  if (problem.k < 1) throw std::invalid_argument("variable-time problem: k must be >= 1");
  if (problem.initial_half_durations.size() < 1) {
    throw std::invalid_argument("variable-time problem: needs at least one segment");
  }
  SplineCostObjective objective({{problem.k, problem.pins}}, problem.tau0);
  TimeAllocationOptimizer optimizer(objective, config);
  auto run = optimizer.run(method, problem.initial_half_durations);

  FixedTimeProblem fixed;
  fixed.k = problem.k;
  fixed.times = durations_to_times(run.d_star, problem.tau0);
  fixed.pins = problem.pins;

  VariableTimeResult out;
  out.solution = solve_fixed_time(fixed);
  out.d_star = run.d_star;
  out.trace = std::move(run.trace);
  out.stagnated = run.stagnated;
  return out;
}

}  // namespace minsnap
