#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "minsnap/fixed_time.hpp"
#include "minsnap/rng.hpp"

namespace minsnap {

// How the open constraint "all durations positive" is turned into a closed,
// bounded feasible set. Without one of these the cost can be driven toward
// zero by letting durations grow without bound whenever all derivative pins
// are zero.
enum class OptimizerMode {
  kFixedTotalTime,  // sum of durations fixed; iterates live on a simplex
  kTimePenalty,     // minimize J + kappa * total duration
};

enum class DescentMethod {
  kExactGradient,
  kFiniteDifference,
  kRandomSearch,
};

struct OptimizerConfig {
  OptimizerMode mode = OptimizerMode::kFixedTotalTime;
  double total_time = 0.0;  // full duration 2*sum(delta), fixed-total mode
  double kappa = 0.0;       // penalty weight per second of duration
  double d_min = 1e-6;      // lower bound on half-durations
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double alpha_init = 1.0;  // scale multiplier for the first trial step
  int max_iters = 500;
  double tol = -1.0;  // projected-step norm; negative selects 1e-8*(1+sum d)
  std::uint64_t seed = 0;
  double fd_step = 1e-6;      // forward-difference scale gamma
  double random_step0 = 1e-3; // epsilon_0 of the decaying random-search step
};

struct TraceEntry {
  Eigen::VectorXd d;
  double objective = 0.0;       // mode-augmented value at d
  double step_size = 0.0;       // accepted alpha (or epsilon_i), 0 for entry 0
  long cost_evaluations = 0;    // cumulative fixed-time solves so far
};
using OptimizerTrace = std::vector<TraceEntry>;

// Projection onto the feasible half-durations. Time-penalty mode clamps
// componentwise to d_min; fixed-total mode is the Euclidean projection onto
// {d >= d_min, sum d = total_time/2} (sorted-threshold algorithm), with the
// sum restored exactly after rounding.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& d, const OptimizerConfig& config);

// Gradient of the fixed-time cost with respect to the half-durations,
// evaluated at the optimizer f of the fixed-time problem. The feasible set
// of the reduced problem does not depend on the durations, so the derivative
// of the optimal value is the partial derivative of the objective:
//   dJ/ddelta_i = f_i^T dM_i/ddelta_i f_i
//               = (e/delta_i) f_i^T M_i f_i + 2 f_i^T Fhat_i M_i f_i,
// with e = 3-2k and Fhat = delta^{-1} diag{0..k-1, 0..k-1}. Mode terms
// (penalty weight) are added by the caller, not here.
Eigen::VectorXd cost_gradient(int k, const Eigen::VectorXd& half_durations,
                              const std::vector<Eigen::VectorXd>& endpoint_stacks);

// Evaluation interface the descent loop drives. Implementations cache the
// most recent solve so that asking for the gradient at the point just
// evaluated costs nothing extra.
class VariableTimeObjective {
 public:
  virtual ~VariableTimeObjective() = default;
  // Solve the fixed-time problem(s) at d and return the (un-augmented) cost.
  virtual double cost(const Eigen::VectorXd& d) = 0;
  // Cost and its duration gradient at d, reusing the cached solve when d
  // matches the previous cost() call.
  virtual double cost_and_gradient(const Eigen::VectorXd& d, Eigen::VectorXd* gradient) = 0;
  virtual long evaluation_count() const = 0;
};

// Sum of fixed-time costs of one or more splines sharing the knot schedule.
// One evaluation solves every spline once at the given durations; the counter
// tracks evaluations of the summed objective. Solver failures are rethrown
// with the entry's label when one is set.
class SplineCostObjective : public VariableTimeObjective {
 public:
  struct Entry {
    int k = 0;
    PinSet pins;
    std::string label;
  };
  SplineCostObjective(std::vector<Entry> entries, double tau0);

  double cost(const Eigen::VectorXd& d) override;
  double cost_and_gradient(const Eigen::VectorXd& d, Eigen::VectorXd* gradient) override;
  long evaluation_count() const override { return evals_; }
  // Per-entry solutions at the most recently evaluated durations.
  const std::vector<FixedTimeSolution>& last_solutions() const { return cached_solutions_; }

 private:
  double solve_at(const Eigen::VectorXd& d);

  std::vector<Entry> entries_;
  double tau0_ = 0.0;
  long evals_ = 0;
  bool have_cache_ = false;
  Eigen::VectorXd cached_d_;
  double cached_cost_ = 0.0;
  std::vector<FixedTimeSolution> cached_solutions_;
};

// Single spline over variable times.
struct VariableTimeProblem {
  int k = 0;
  PinSet pins;
  Eigen::VectorXd initial_half_durations;
  double tau0 = 0.0;
};

struct StepResult {
  Eigen::VectorXd d;
  double objective = 0.0;
  double step_size = 0.0;
  bool stagnated = false;  // line search exhausted without sufficient decrease
};

// Projected descent over half-durations. One instance drives one
// optimization run; the objective's evaluation counter persists across steps.
class TimeAllocationOptimizer {
 public:
  TimeAllocationOptimizer(VariableTimeObjective& objective, const OptimizerConfig& config);

  // One Armijo-backtracked projected gradient step with the analytic
  // gradient (a single solve per iteration in the cached regime).
  StepResult step_exact(const Eigen::VectorXd& d);
  // Same projected step, gradient estimated by forward differences
  // (one solve per coordinate).
  StepResult step_finite_difference(const Eigen::VectorXd& d);
  // One directional-difference step along a Gaussian direction with a
  // decaying step epsilon_0/sqrt(i); no line search.
  StepResult step_random(const Eigen::VectorXd& d, int iteration);
  StepResult step_random_along(const Eigen::VectorXd& d, int iteration,
                               const Eigen::VectorXd& direction);

  struct RunResult {
    Eigen::VectorXd d_star;
    OptimizerTrace trace;
    bool stagnated = false;
  };
  RunResult run(DescentMethod method, const Eigen::VectorXd& d_init);

 private:
  double augmented(double cost, const Eigen::VectorXd& d) const;
  StepResult armijo_step(const Eigen::VectorXd& d, const Eigen::VectorXd& gradient,
                         double objective_at_d);

  VariableTimeObjective& objective_;
  OptimizerConfig config_;
  Rng rng_;
  // Barzilai-Borwein memory
  bool have_previous_ = false;
  Eigen::VectorXd prev_d_;
  Eigen::VectorXd prev_gradient_;
  double alpha_ = -1.0;
};

struct VariableTimeResult {
  FixedTimeSolution solution;
  Eigen::VectorXd d_star;
  OptimizerTrace trace;
  bool stagnated = false;
};

// Full variable-time solve: descend from the initial durations until the
// projected step drops below tolerance or the iteration budget runs out,
// then solve the fixed-time problem at the optimized times.
VariableTimeResult solve_variable_time(const VariableTimeProblem& problem,
                                       const OptimizerConfig& config, DescentMethod method);

}  // namespace minsnap
