#include "minsnap/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace minsnap {

namespace {

void validate_dimensions(const std::vector<DimensionSpec>& dims) {
  if (dims.empty()) throw std::invalid_argument("multidim: needs at least one dimension");
  std::set<std::string> names;
  for (const auto& d : dims) {
    if (d.name.empty()) throw std::invalid_argument("multidim: dimension names must be nonempty");
    if (!names.insert(d.name).second) {
      throw std::invalid_argument("multidim: duplicate dimension name '" + d.name + "'");
    }
    if (d.k < 1) throw std::invalid_argument("multidim: dimension '" + d.name + "' has k < 1");
  }
}

// Indices of the dimensions in name order; evaluation always runs in this
// order so listing order cannot perturb any iterate.
std::vector<int> name_order(const std::vector<DimensionSpec>& dims) {
  std::vector<int> order(dims.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return dims[a].name < dims[b].name; });
  return order;
}

std::vector<SplineCostObjective::Entry> sorted_entries(const MultiDimProblem& problem,
                                                       const std::vector<int>& order) {
  std::vector<SplineCostObjective::Entry> entries;
  entries.reserve(order.size());
  for (int idx : order) {
    const DimensionSpec& dim = problem.dimensions[idx];
    entries.push_back({dim.k, dim.pins, dim.name});
  }
  return entries;
}

}  // namespace

const Spline& FlatTrajectory::spline(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return splines[i];
  }
  throw std::invalid_argument("FlatTrajectory: no dimension named '" + name + "'");
}

std::pair<double, Eigen::VectorXd> multidim_cost_and_grad(const MultiDimProblem& problem,
                                                          const Eigen::VectorXd& d) {
  validate_dimensions(problem.dimensions);
  SplineCostObjective objective(sorted_entries(problem, name_order(problem.dimensions)),
                                problem.tau0);
  Eigen::VectorXd gradient;
  const double total = objective.cost_and_gradient(d, &gradient);
  return {total, gradient};
}

MultiDimResult solve_multidim(const MultiDimProblem& problem, DescentMethod method) {
  validate_dimensions(problem.dimensions);
  if (problem.initial_half_durations.size() < 1) {
    throw std::invalid_argument("multidim: needs at least one segment");
  }
  const std::vector<int> order = name_order(problem.dimensions);
  SplineCostObjective objective(sorted_entries(problem, order), problem.tau0);
  TimeAllocationOptimizer optimizer(objective, problem.config);
  auto run = optimizer.run(method, problem.initial_half_durations);

  MultiDimResult out;
  out.d_star = run.d_star;
  out.trace = std::move(run.trace);
  out.stagnated = run.stagnated;

  const TimeAllocation times = durations_to_times(out.d_star, problem.tau0);
  out.trajectory.names.reserve(problem.dimensions.size());
  out.trajectory.splines.resize(problem.dimensions.size());
  out.dimension_costs.resize(problem.dimensions.size());
  for (const auto& dim : problem.dimensions) out.trajectory.names.push_back(dim.name);
  for (size_t i = 0; i < problem.dimensions.size(); ++i) {
    FixedTimeProblem p;
    p.k = problem.dimensions[i].k;
    p.times = times;
    p.pins = problem.dimensions[i].pins;
    FixedTimeSolution sol = solve_fixed_time(p);
    out.dimension_costs[i] = sol.cost;
    out.trajectory.splines[i] = std::move(sol.spline);
  }
  // total accumulated in name order, matching the optimizer's objective
  double total = 0.0;
  for (int idx : order) total += out.dimension_costs[idx];
  out.total_cost = total;
  return out;
}

FlatOutputTable sample_flat_outputs(const FlatTrajectory& trajectory, double rate_hz,
                                    int max_deriv) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("sample_flat_outputs: rate must be positive");
  if (max_deriv < 0) throw std::invalid_argument("sample_flat_outputs: max_deriv must be >= 0");
  if (trajectory.splines.empty()) {
    throw std::invalid_argument("sample_flat_outputs: empty trajectory");
  }
  const TimeAllocation& times = trajectory.times();
  for (const Spline& s : trajectory.splines) {
    if ((s.times().knots() - times.knots()).norm() != 0.0) {
      throw std::invalid_argument("sample_flat_outputs: dimensions disagree on knot times");
    }
  }
  const double start = times.start_time();
  const double end = times.end_time();
  const long rows = static_cast<long>(std::floor((end - start) * rate_hz)) + 1;

  FlatOutputTable table;
  table.names = trajectory.names;
  table.max_deriv = max_deriv;
  table.times.resize(rows);
  table.values.assign(trajectory.splines.size(), Eigen::MatrixXd(rows, max_deriv + 1));
  for (long r = 0; r < rows; ++r) {
    const double tau = std::min(start + static_cast<double>(r) / rate_hz, end);
    table.times(r) = tau;
    for (size_t dim = 0; dim < trajectory.splines.size(); ++dim) {
      for (int q = 0; q <= max_deriv; ++q) {
        table.values[dim](r, q) = trajectory.splines[dim].eval(tau, q);
      }
    }
  }
  return table;
}

}  // namespace minsnap
