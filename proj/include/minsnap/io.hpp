#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "minsnap/multidim.hpp"
#include "minsnap/rrt_star.hpp"
#include "minsnap/time_allocation.hpp"

namespace minsnap::io {

// Parsed problem document. The single-spline form ("k" + "pins") carries one
// anonymous dimension; the multi-spline form names each dimension.
struct ProblemDimensions {
  std::vector<DimensionSpec> dimensions;
  bool named = false;
};

struct FixedProblemFile {
  ProblemDimensions dims;
  TimeAllocation times;
};

struct VariableProblemFile {
  ProblemDimensions dims;
  Eigen::VectorXd initial_deltas;
  OptimizerMode mode = OptimizerMode::kFixedTotalTime;
  double total_time = 0.0;
  double kappa = 0.0;
};

using ProblemFile = std::variant<FixedProblemFile, VariableProblemFile>;

// Strict parsing: unknown fields, type mismatches and inconsistent field
// combinations all raise std::invalid_argument. Malformed JSON reports the
// byte offset of the failure.
ProblemFile parse_problem_text(const std::string& text);
ProblemFile parse_problem_file(const std::string& path);

struct WorldFile {
  Workspace workspace;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  PlannerConfig config;
};

WorldFile parse_world_text(const std::string& text);
WorldFile parse_world_file(const std::string& path);

// 17 significant digits, enough to round-trip any double.
std::string format_float(double value);

// Output paths: relative paths are placed under $MINSNAP_OUT_DIR when that
// variable is set, otherwise used as-is.
extern const char* const kOutputDirEnvVar;
std::string resolve_output_path(const std::string& path);

// Trajectory table with a time column and derivative columns 0..k_dim-1 per
// dimension, sampled at `samples` equally spaced times across the knot span.
// Named dimensions use columns "<name>_d<q>"; the anonymous single-spline
// form uses "deriv<q>".
void write_trajectory_csv(const std::string& path, const ProblemDimensions& dims,
                          const std::vector<Spline>& splines, int samples);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace minsnap::io
