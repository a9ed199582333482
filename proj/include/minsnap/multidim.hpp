#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "minsnap/spline.hpp"
#include "minsnap/time_opt.hpp"

namespace minsnap {

// One flat-output channel: its own order and pins, sharing the knot schedule
// with every other channel. The quadrotor configuration is position x, y at
// k = 5 (snap) and z, yaw at k = 3 (acceleration), but any mix is accepted.
struct DimensionSpec {
  std::string name;
  int k = 0;
  PinSet pins;
};

struct MultiDimProblem {
  std::vector<DimensionSpec> dimensions;
  Eigen::VectorXd initial_half_durations;
  double tau0 = 0.0;
  OptimizerConfig config;
};

// Splines over a common knot vector, one per named dimension.
struct FlatTrajectory {
  std::vector<std::string> names;
  std::vector<Spline> splines;

  const Spline& spline(const std::string& name) const;
  const TimeAllocation& times() const { return splines.front().times(); }
};

// Total cost and its duration gradient at d. The objective separates across
// dimensions at shared times, so both are plain sums of per-dimension
// quantities; summation runs in name order so the result does not depend on
// the order the dimensions were listed in. One call solves each dimension's
// fixed-time problem once. Failures carry the dimension name.
std::pair<double, Eigen::VectorXd> multidim_cost_and_grad(const MultiDimProblem& problem,
                                                          const Eigen::VectorXd& d);

struct MultiDimResult {
  FlatTrajectory trajectory;
  Eigen::VectorXd d_star;
  OptimizerTrace trace;
  bool stagnated = false;
  std::vector<double> dimension_costs;  // in the order the dimensions were given
  double total_cost = 0.0;
};

// Descend over the shared durations, then solve every dimension at the
// optimized times.
MultiDimResult solve_multidim(const MultiDimProblem& problem,
                              DescentMethod method = DescentMethod::kExactGradient);

// Uniform sampling of a trajectory for controller-facing export. Row count is
// floor((end - start) * rate) + 1; sample times never exceed the knot span.
struct FlatOutputTable {
  std::vector<std::string> names;
  int max_deriv = 0;
  Eigen::VectorXd times;                // one entry per row
  std::vector<Eigen::MatrixXd> values;  // per dimension: rows x (max_deriv+1)
};

FlatOutputTable sample_flat_outputs(const FlatTrajectory& trajectory, double rate_hz,
                                    int max_deriv);

}  // namespace minsnap
