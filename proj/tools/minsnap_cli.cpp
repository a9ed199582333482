// Command-line front end: single solves, variable-time optimization, the
// planner, and the benchmark harness, all emitting plain CSV.

#include <chrono>
#include <filesystem>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "minsnap/bench.hpp"
#include "minsnap/errors.hpp"
#include "minsnap/io.hpp"
#include "minsnap/multidim.hpp"
#include "minsnap/rrt_star.hpp"
#include "minsnap/time_opt.hpp"

namespace {

using namespace minsnap;

constexpr int kExitInvalidInput = 1;
constexpr int kExitNumericalFailure = 2;

DescentMethod parse_method(const std::string& name) {
  if (name == "exact") return DescentMethod::kExactGradient;
  if (name == "findiff") return DescentMethod::kFiniteDifference;
  if (name == "random") return DescentMethod::kRandomSearch;
  throw std::invalid_argument("unknown method '" + name + "' (expected exact|findiff|random)");
}

const char* method_name(DescentMethod m) {
  switch (m) {
    case DescentMethod::kExactGradient: return "exact";
    case DescentMethod::kFiniteDifference: return "findiff";
    case DescentMethod::kRandomSearch: return "random";
  }
  return "?";
}

struct FixedArgs {
  std::string problem_path;
  std::string out = "trajectory.csv";
  int samples = 101;
  bool oracle = false;
};

int cmd_fixed(const FixedArgs& args) {
  const io::ProblemFile parsed = io::parse_problem_file(args.problem_path);
  const auto* fixed = std::get_if<io::FixedProblemFile>(&parsed);
  if (fixed == nullptr) {
    throw std::invalid_argument("'fixed' expects a problem file with 'times'");
  }

  std::vector<Spline> splines;
  std::vector<FixedTimeSolution> solutions;
  double total = 0.0;
  for (const auto& dim : fixed->dims.dimensions) {
    FixedTimeProblem p;
    p.k = dim.k;
    p.times = fixed->times;
    p.pins = dim.pins;
    solutions.push_back(solve_fixed_time(p));
    splines.push_back(solutions.back().spline);
    total += solutions.back().cost;
    if (fixed->dims.named) {
      std::printf("J[%s] = %s\n", dim.name.c_str(), io::format_float(solutions.back().cost).c_str());
    }
  }
  if (fixed->dims.named) {
    std::printf("J_total = %s\n", io::format_float(total).c_str());
  } else {
    std::printf("J = %s\n", io::format_float(total).c_str());
  }

  if (args.oracle) {
    double deviation = 0.0;
    for (size_t i = 0; i < fixed->dims.dimensions.size(); ++i) {
      FixedTimeProblem p;
      p.k = fixed->dims.dimensions[i].k;
      p.times = fixed->times;
      p.pins = fixed->dims.dimensions[i].pins;
      const FixedTimeSolution dense = solve_dense_oracle(p);
      for (size_t s = 0; s < dense.endpoint_stacks.size(); ++s) {
        deviation = std::max(deviation,
                             (dense.endpoint_stacks[s] - solutions[i].endpoint_stacks[s])
                                 .lpNorm<Eigen::Infinity>());
      }
      deviation = std::max(deviation, std::abs(dense.cost - solutions[i].cost) /
                                          (1.0 + dense.cost));
    }
    std::printf("oracle max deviation = %s\n", io::format_float(deviation).c_str());
  }

  io::write_trajectory_csv(io::resolve_output_path(args.out), fixed->dims, splines, args.samples);
  return 0;
}

struct VariableArgs {
  std::string problem_path;
  std::string out = "trajectory.csv";
  std::string trace_path;
  std::string method = "exact";
  int samples = 101;
  std::uint64_t seed = 0;
};

void write_trace_csv(const std::string& path, const OptimizerTrace& trace) {
  std::ostringstream out;
  out << "iter,J,step,cumulative_J_evals\n";
  for (size_t i = 0; i < trace.size(); ++i) {
    out << i << "," << io::format_float(trace[i].objective) << ","
        << io::format_float(trace[i].step_size) << "," << trace[i].cost_evaluations << "\n";
  }
  io::write_text_file(path, out.str());
}

int cmd_variable(const VariableArgs& args) {
  const io::ProblemFile parsed = io::parse_problem_file(args.problem_path);
  const auto* variable = std::get_if<io::VariableProblemFile>(&parsed);
  if (variable == nullptr) {
    throw std::invalid_argument("'variable' expects a problem file with 'initial_deltas'");
  }
  const DescentMethod method = parse_method(args.method);

  MultiDimProblem problem;
  problem.dimensions = variable->dims.dimensions;
  problem.initial_half_durations = variable->initial_deltas;
  problem.tau0 = 0.0;
  problem.config.mode = variable->mode;
  problem.config.total_time = variable->total_time;
  problem.config.kappa = variable->kappa;
  problem.config.seed = args.seed;

  const MultiDimResult result = solve_multidim(problem, method);
  for (size_t i = 0; i < problem.dimensions.size(); ++i) {
    if (variable->dims.named) {
      std::printf("J[%s] = %s\n", problem.dimensions[i].name.c_str(),
                  io::format_float(result.dimension_costs[i]).c_str());
    }
  }
  std::printf("%s = %s\n", variable->dims.named ? "J_total" : "J",
              io::format_float(result.total_cost).c_str());
  std::ostringstream dline;
  for (Eigen::Index i = 0; i < result.d_star.size(); ++i) {
    if (i) dline << ",";
    dline << io::format_float(result.d_star(i));
  }
  std::printf("d_star = %s\n", dline.str().c_str());
  if (result.stagnated) std::printf("note: line search stagnated before the tolerance\n");

  if (!args.trace_path.empty()) {
    write_trace_csv(io::resolve_output_path(args.trace_path), result.trace);
  }
  io::write_trajectory_csv(io::resolve_output_path(args.out), variable->dims,
                           result.trajectory.splines, args.samples);
  return 0;
}

struct RrtArgs {
  std::string world_path;
  std::string out_dir = ".";
  bool baseline = false;
  int trials = 1;
  int samples = 200;
};

int cmd_rrt(const RrtArgs& args) {
  const io::WorldFile world = io::parse_world_file(args.world_path);
  if (args.trials < 1) throw std::invalid_argument("'--trials' must be at least 1");

  const std::string dir = io::resolve_output_path(args.out_dir);
  if (!dir.empty() && dir != ".") std::filesystem::create_directories(dir);
  const auto join = [&dir](const std::string& name) {
    return dir.empty() || dir == "." ? name : dir + "/" + name;
  };

  std::ostringstream metrics;
  metrics << "trial,method,total_snap,wall_ms\n";
  for (int trial = 0; trial < args.trials; ++trial) {
    PlannerConfig cfg = world.config;
    cfg.seed = world.config.seed + static_cast<std::uint64_t>(trial);
    const auto t0 = std::chrono::steady_clock::now();
    const PlanResult result = args.baseline ? plan_euclidean_baseline(world.workspace, world.start, cfg)
                                            : plan(world.workspace, world.start, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double snap = result.best_trajectory.ok
                            ? result.best_trajectory.snap
                            : std::numeric_limits<double>::quiet_NaN();
    metrics << trial << "," << (args.baseline ? "euclidean" : "minsnap") << ","
            << io::format_float(snap) << "," << io::format_float(wall_ms) << "\n";

    if (trial == 0) {
      std::ostringstream edges;
      edges << "vertex,parent,x,y,cost\n";
      for (int v = 0; v < result.framework.size(); ++v) {
        edges << v << "," << result.framework.parent[v] << ","
              << io::format_float(result.framework.points[v].x()) << ","
              << io::format_float(result.framework.points[v].y()) << ","
              << io::format_float(result.framework.path_cost[v]) << "\n";
      }
      io::write_text_file(join("edges.csv"), edges.str());
      if (result.best_trajectory.ok) {
        io::ProblemDimensions dims;
        dims.named = true;
        dims.dimensions = {{"x", 5, {}}, {"y", 5, {}}};
        io::write_trajectory_csv(join("trajectory.csv"), dims,
                                 {result.best_trajectory.x, result.best_trajectory.y},
                                 args.samples);
      }
      std::printf("tree vertices: %d, goal %s\n", result.framework.size(),
                  result.goal_reached ? "reached" : "not reached");
    }
  }
  io::write_text_file(join("metrics.csv"), metrics.str());
  return 0;
}

struct ScalingArgs {
  int k = 5;
  int lmin = 64;
  int lmax = 8192;
  int reps = 5;
  std::uint64_t seed = 1;
  std::string out = "scaling.csv";
};

int cmd_bench_scaling(const ScalingArgs& args) {
  const auto points = bench::run_scaling(args.k, args.lmin, args.lmax, args.reps, args.seed);
  std::ostringstream out;
  out << "l,median_ms,reps\n";
  for (const auto& p : points) {
    out << p.segments << "," << io::format_float(p.median_ms) << "," << p.reps << "\n";
  }
  io::write_text_file(io::resolve_output_path(args.out), out.str());
  std::printf("fitted log-log slope = %.4f\n", bench::fitted_loglog_slope(points));
  return 0;
}

struct JevalsArgs {
  std::vector<int> ls;
  int trials = 100;
  std::uint64_t seed = 2026;
  std::string out = "jevals.csv";
};

int cmd_bench_jevals(const JevalsArgs& args) {
  const std::vector<int> ls = args.ls.empty() ? std::vector<int>{6, 8, 10} : args.ls;
  const auto rows = bench::run_jevals(ls, args.trials, args.seed);
  std::ostringstream out;
  out << "l,method,mean_J_evals\n";
  for (const auto& row : rows) {
    out << row.segments << "," << method_name(row.method) << ","
        << io::format_float(row.mean_evaluations) << "\n";
    std::printf("l=%d %s mean J evaluations = %.2f\n", row.segments, method_name(row.method),
                row.mean_evaluations);
  }
  io::write_text_file(io::resolve_output_path(args.out), out.str());
  return 0;
}

struct ConditioningArgs {
  int k = 5;
  int l = 50;
  double shift = 100.0;
  std::uint64_t seed = 7;
  std::string out = "conditioning.csv";
};

int cmd_bench_conditioning(const ConditioningArgs& args) {
  FixedTimeProblem base = bench::waypoint_instance(args.k, args.l, args.seed);
  FixedTimeProblem problem;
  problem.k = base.k;
  problem.pins = base.pins;
  problem.times = durations_to_times(base.times.half_durations(), args.shift);
  const bench::ConditioningReport report = bench::compare_formulations(problem);

  std::ostringstream out;
  out << "l,shift,cond_conditioned,cond_absolute,cond_ratio,cost_conditioned,cost_absolute,"
         "cost_gap,continuity_residual,mapping_error\n";
  out << args.l << "," << io::format_float(args.shift) << ","
      << io::format_float(report.cond_conditioned) << ","
      << io::format_float(report.cond_absolute) << ","
      << io::format_float(report.cond_absolute / report.cond_conditioned) << ","
      << io::format_float(report.cost_conditioned) << ","
      << io::format_float(report.absolute_solved ? report.cost_absolute
                                                 : std::numeric_limits<double>::quiet_NaN())
      << "," << io::format_float(report.cost_gap) << ","
      << io::format_float(report.continuity_residual) << ","
      << io::format_float(report.mapping_error) << "\n";
  io::write_text_file(io::resolve_output_path(args.out), out.str());

  std::printf("condition number (conditioned form) = %s\n",
              io::format_float(report.cond_conditioned).c_str());
  std::printf("condition number (absolute form)    = %s\n",
              io::format_float(report.cond_absolute).c_str());
  std::printf("continuity residual                 = %s\n",
              io::format_float(report.continuity_residual).c_str());
  if (report.absolute_solved) {
    std::printf("cost gap between formulations       = %s\n",
                io::format_float(report.cost_gap).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spline trajectory optimization toolkit"};
  app.require_subcommand(1);

  FixedArgs fixed_args;
  auto* fixed = app.add_subcommand("fixed", "solve an interpolation problem at fixed times");
  fixed->add_option("problem", fixed_args.problem_path, "problem JSON file")->required();
  fixed->add_option("--out", fixed_args.out, "trajectory CSV path");
  fixed->add_option("--samples", fixed_args.samples, "number of samples")->check(CLI::Range(2, 1 << 22));
  fixed->add_flag("--oracle", fixed_args.oracle, "cross-check against the dense solver");

  VariableArgs variable_args;
  auto* variable = app.add_subcommand("variable", "optimize segment durations, then solve");
  variable->add_option("problem", variable_args.problem_path, "problem JSON file")->required();
  variable->add_option("--out", variable_args.out, "trajectory CSV path");
  variable->add_option("--samples", variable_args.samples, "number of samples")->check(CLI::Range(2, 1 << 22));
  variable->add_option("--method", variable_args.method, "exact|findiff|random");
  variable->add_option("--trace", variable_args.trace_path, "iteration trace CSV path");
  variable->add_option("--seed", variable_args.seed, "seed for the random method");

  RrtArgs rrt_args;
  auto* rrt = app.add_subcommand("rrt", "plan through a 2D world");
  rrt->add_option("world", rrt_args.world_path, "world JSON file")->required();
  rrt->add_option("--out-dir", rrt_args.out_dir, "output directory");
  rrt->add_flag("--baseline", rrt_args.baseline, "run the straight-line-cost baseline");
  rrt->add_option("--trials", rrt_args.trials, "number of seeded trials");
  rrt->add_option("--samples", rrt_args.samples, "trajectory CSV samples");

  ScalingArgs scaling_args;
  auto* scaling = app.add_subcommand("bench-scaling", "time the fixed-time solver over segment counts");
  scaling->add_option("--k", scaling_args.k, "spline order");
  scaling->add_option("--lmin", scaling_args.lmin, "smallest segment count");
  scaling->add_option("--lmax", scaling_args.lmax, "largest segment count");
  scaling->add_option("--reps", scaling_args.reps, "repetitions per size");
  scaling->add_option("--seed", scaling_args.seed, "instance seed");
  scaling->add_option("--out", scaling_args.out, "CSV output path");

  JevalsArgs jevals_args;
  auto* jevals = app.add_subcommand("bench-jevals", "compare descent methods by cost evaluations");
  jevals->add_option("--l", jevals_args.ls, "segment counts (repeatable)");
  jevals->add_option("--trials", jevals_args.trials, "trials per segment count");
  jevals->add_option("--seed", jevals_args.seed, "base seed");
  jevals->add_option("--out", jevals_args.out, "CSV output path");

  ConditioningArgs conditioning_args;
  auto* conditioning =
      app.add_subcommand("bench-conditioning", "compare the two problem formulations");
  conditioning->add_option("--k", conditioning_args.k, "spline order");
  conditioning->add_option("--l", conditioning_args.l, "segment count");
  conditioning->add_option("--shift", conditioning_args.shift, "start time of the schedule");
  conditioning->add_option("--seed", conditioning_args.seed, "instance seed");
  conditioning->add_option("--out", conditioning_args.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  try {
    if (fixed->parsed()) return cmd_fixed(fixed_args);
    if (variable->parsed()) return cmd_variable(variable_args);
    if (rrt->parsed()) return cmd_rrt(rrt_args);
    if (scaling->parsed()) return cmd_bench_scaling(scaling_args);
    if (jevals->parsed()) return cmd_bench_jevals(jevals_args);
    if (conditioning->parsed()) return cmd_bench_conditioning(conditioning_args);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return 0;
}
