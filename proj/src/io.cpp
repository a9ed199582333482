#include "minsnap/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace minsnap::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      fail(where + ": unknown field '" + item.key() + "'");
    }
  }
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

Eigen::VectorXd number_array(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + ": expected a nonempty array of numbers");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(where + ": expected a number at index " + std::to_string(i));
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

PinSet parse_pins(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": 'pins' must be an array");
  PinSet pins;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string ctx = where + ": pin " + std::to_string(i);
    require_keys(v[i], {"knot", "deriv", "value"}, ctx);
    Pin p;
    p.knot = require_int(v[i], "knot", ctx);
    p.deriv = require_int(v[i], "deriv", ctx);
    p.value = require_number(v[i], "value", ctx);
    pins.push_back(p);
  }
  return pins;
}

ProblemDimensions parse_dimensions(const json& root) {
  ProblemDimensions out;
  const bool has_k = root.contains("k");
  const bool has_dims = root.contains("dimensions");
  if (has_k == has_dims) {
    fail("problem file: provide either 'k' (with 'pins') or 'dimensions', not both or neither");
  }
  if (has_k) {
    if (!root.contains("pins")) fail("problem file: the 'k' form requires 'pins'");
    DimensionSpec dim;
    dim.name = "sigma";
    dim.k = require_int(root, "k", "problem file");
    dim.pins = parse_pins(root.at("pins"), "problem file");
    if (dim.k < 1) fail("problem file: 'k' must be at least 1");
    out.dimensions.push_back(std::move(dim));
    out.named = false;
    return out;
  }
  if (root.contains("pins")) {
    fail("problem file: top-level 'pins' is only valid with the 'k' form");
  }
  const json& dims = root.at("dimensions");
  if (!dims.is_array() || dims.empty()) {
    fail("problem file: 'dimensions' must be a nonempty array");
  }
  std::set<std::string> names;
  for (size_t i = 0; i < dims.size(); ++i) {
    const std::string ctx = "problem file: dimension " + std::to_string(i);
    require_keys(dims[i], {"name", "k", "pins"}, ctx);
    DimensionSpec dim;
    if (!dims[i].contains("name") || !dims[i].at("name").is_string()) {
      fail(ctx + ": missing string field 'name'");
    }
    dim.name = dims[i].at("name").get<std::string>();
    dim.k = require_int(dims[i], "k", ctx);
    if (dim.k < 1) fail(ctx + ": 'k' must be at least 1");
    dim.pins = parse_pins(dims[i].at("pins"), ctx);
    if (dim.name.empty() || !names.insert(dim.name).second) {
      fail(ctx + ": dimension names must be unique and nonempty");
    }
    out.dimensions.push_back(std::move(dim));
  }
  out.named = true;
  return out;
}

ProblemFile parse_problem(const json& root) {
  require_keys(root,
               {"k", "pins", "dimensions", "times", "initial_deltas", "mode", "total_time",
                "kappa"},
               "problem file");
  ProblemDimensions dims = parse_dimensions(root);

  const bool has_times = root.contains("times");
  const bool has_deltas = root.contains("initial_deltas");
  if (has_times == has_deltas) {
    fail("problem file: provide exactly one of 'times' or 'initial_deltas'");
  }

  if (has_times) {
    for (const char* key : {"mode", "total_time", "kappa"}) {
      if (root.contains(key)) {
        fail(std::string("problem file: '") + key + "' is only valid with 'initial_deltas'");
      }
    }
    FixedProblemFile fixed;
    fixed.times = TimeAllocation::from_knots(number_array(root.at("times"), "problem file: 'times'"));
    const int l = fixed.times.segment_count();
    for (const auto& dim : dims.dimensions) validate_pins(dim.pins, l, dim.k);
    fixed.dims = std::move(dims);
    return fixed;
  }

  VariableProblemFile variable;
  variable.initial_deltas =
      number_array(root.at("initial_deltas"), "problem file: 'initial_deltas'");
  for (Eigen::Index i = 0; i < variable.initial_deltas.size(); ++i) {
    if (!(variable.initial_deltas(i) > 0.0)) {
      fail("problem file: 'initial_deltas' must all be positive");
    }
  }
  if (!root.contains("mode") || !root.at("mode").is_string()) {
    fail("problem file: 'initial_deltas' requires a string 'mode'");
  }
  const std::string mode = root.at("mode").get<std::string>();
  if (mode == "fixed_total") {
    variable.mode = OptimizerMode::kFixedTotalTime;
    variable.total_time = require_number(root, "total_time", "problem file");
    if (!(variable.total_time > 0.0)) fail("problem file: 'total_time' must be positive");
    if (root.contains("kappa")) fail("problem file: 'kappa' is only valid in penalty mode");
  } else if (mode == "penalty") {
    variable.mode = OptimizerMode::kTimePenalty;
    variable.kappa = require_number(root, "kappa", "problem file");
    if (variable.kappa < 0.0) fail("problem file: 'kappa' must be nonnegative");
    if (root.contains("total_time")) {
      fail("problem file: 'total_time' is only valid in fixed_total mode");
    }
  } else {
    fail("problem file: 'mode' must be 'fixed_total' or 'penalty'");
  }
  const int l = static_cast<int>(variable.initial_deltas.size());
  for (const auto& dim : dims.dimensions) validate_pins(dim.pins, l, dim.k);
  variable.dims = std::move(dims);
  return variable;
}

Box2 parse_box(const json& v, const std::string& where) {
  require_keys(v, {"min", "max"}, where);
  const Eigen::VectorXd lo = number_array(v.at("min"), where + ": 'min'");
  const Eigen::VectorXd hi = number_array(v.at("max"), where + ": 'max'");
  if (lo.size() != 2 || hi.size() != 2) fail(where + ": corners must have two coordinates");
  Box2 box;
  box.lo = lo.head<2>();
  box.hi = hi.head<2>();
  return box;
}

WorldFile parse_world(const json& root) {
  require_keys(root, {"bounds", "obstacles", "start", "goal", "config"}, "world file");
  WorldFile out;

  if (!root.contains("bounds")) fail("world file: missing 'bounds'");
  const json& bounds = root.at("bounds");
  if (!bounds.is_array() || bounds.size() != 2) {
    fail("world file: 'bounds' must be [[xmin,xmax],[ymin,ymax]]");
  }
  const Eigen::VectorXd bx = number_array(bounds[0], "world file: 'bounds[0]'");
  const Eigen::VectorXd by = number_array(bounds[1], "world file: 'bounds[1]'");
  if (bx.size() != 2 || by.size() != 2) fail("world file: each bounds entry needs two numbers");
  out.workspace.bounds.lo = {bx(0), by(0)};
  out.workspace.bounds.hi = {bx(1), by(1)};

  if (root.contains("obstacles")) {
    const json& obs = root.at("obstacles");
    if (!obs.is_array()) fail("world file: 'obstacles' must be an array");
    for (size_t i = 0; i < obs.size(); ++i) {
      out.workspace.obstacles.push_back(
          parse_box(obs[i], "world file: obstacle " + std::to_string(i)));
    }
  }

  if (!root.contains("start")) fail("world file: missing 'start'");
  const Eigen::VectorXd start = number_array(root.at("start"), "world file: 'start'");
  if (start.size() != 2) fail("world file: 'start' needs two coordinates");
  out.start = start.head<2>();

  if (root.contains("goal")) {
    out.config.goal = parse_box(root.at("goal"), "world file: 'goal'");
    out.config.has_goal = true;
  }

  if (root.contains("config")) {
    const json& cfg = root.at("config");
    require_keys(cfg,
                 {"near_radius", "max_iters", "collision_dt", "seed", "speed",
                  "min_total_time", "subproblem_max_iters", "subproblem_tol"},
                 "world file: config");
    if (cfg.contains("near_radius")) out.config.near_radius = require_number(cfg, "near_radius", "config");
    if (cfg.contains("max_iters")) out.config.max_iters = require_int(cfg, "max_iters", "config");
    if (cfg.contains("collision_dt")) out.config.collision_dt = require_number(cfg, "collision_dt", "config");
    if (cfg.contains("seed")) out.config.seed = static_cast<std::uint64_t>(require_int(cfg, "seed", "config"));
    if (cfg.contains("speed")) out.config.speed = require_number(cfg, "speed", "config");
    if (cfg.contains("min_total_time")) out.config.min_total_time = require_number(cfg, "min_total_time", "config");
    if (cfg.contains("subproblem_max_iters")) out.config.subproblem_max_iters = require_int(cfg, "subproblem_max_iters", "config");
    if (cfg.contains("subproblem_tol")) out.config.subproblem_tol = require_number(cfg, "subproblem_tol", "config");
  }

  validate_workspace(out.workspace);
  return out;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text) {
  return parse_problem(parse_json_text(text));
}

ProblemFile parse_problem_file(const std::string& path) {
  return parse_problem_text(read_file(path));
}

WorldFile parse_world_text(const std::string& text) { return parse_world(parse_json_text(text)); }

WorldFile parse_world_file(const std::string& path) { return parse_world_text(read_file(path)); }

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

const char* const kOutputDirEnvVar = "MINSNAP_OUT_DIR";

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* base = std::getenv(kOutputDirEnvVar);
  if (base == nullptr || base[0] == '\0') return path;
  std::string joined(base);
  if (joined.back() != '/') joined.push_back('/');
  return joined + path;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write file: " + path);
  out << contents;
}

void write_trajectory_csv(const std::string& path, const ProblemDimensions& dims,
                          const std::vector<Spline>& splines, int samples) {
  if (samples < 2) fail("trajectory export: need at least two samples");
  if (splines.size() != dims.dimensions.size()) {
    fail("trajectory export: dimension/spline mismatch");
  }
  std::ostringstream out;
  out << "t";
  for (size_t i = 0; i < splines.size(); ++i) {
    for (int q = 0; q < dims.dimensions[i].k; ++q) {
      if (dims.named) {
        out << "," << dims.dimensions[i].name << "_d" << q;
      } else {
        out << ",deriv" << q;
      }
    }
  }
  out << "\n";

  const double start = splines.front().times().start_time();
  const double end = splines.front().times().end_time();
  for (int s = 0; s < samples; ++s) {
    const double tau =
        s + 1 == samples ? end : start + (end - start) * s / (samples - 1);
    out << format_float(tau);
    for (size_t i = 0; i < splines.size(); ++i) {
      for (int q = 0; q < dims.dimensions[i].k; ++q) {
        out << "," << format_float(splines[i].eval(std::min(tau, end), q));
      }
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace minsnap::io
