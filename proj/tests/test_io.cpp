#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include "minsnap/io.hpp"

using minsnap::io::parse_problem_text;
using minsnap::io::parse_world_text;

namespace {

const char* kFixedDoc = R"({
  "k": 2,
  "times": [0.0, 1.0, 2.0],
  "pins": [
    {"knot": 0, "deriv": 0, "value": 0.0},
    {"knot": 2, "deriv": 0, "value": 1.0}
  ]
})";

const char* kVariableDoc = R"({
  "dimensions": [
    {"name": "x", "k": 3, "pins": [{"knot": 0, "deriv": 0, "value": 0.0},
                                    {"knot": 2, "deriv": 0, "value": 1.0},
                                    {"knot": 0, "deriv": 1, "value": 0.0},
                                    {"knot": 0, "deriv": 2, "value": 0.0},
                                    {"knot": 2, "deriv": 1, "value": 0.0},
                                    {"knot": 2, "deriv": 2, "value": 0.0}]}
  ],
  "initial_deltas": [0.5, 0.5],
  "mode": "fixed_total",
  "total_time": 2.0
})";

}  // namespace

TEST_CASE("fixed problem document round trip") {
  const auto parsed = parse_problem_text(kFixedDoc);
  const auto* fixed = std::get_if<minsnap::io::FixedProblemFile>(&parsed);
  REQUIRE(fixed != nullptr);
  CHECK(fixed->dims.dimensions.size() == 1);
  CHECK_FALSE(fixed->dims.named);
  CHECK(fixed->dims.dimensions[0].k == 2);
  CHECK(fixed->times.segment_count() == 2);
  CHECK(fixed->dims.dimensions[0].pins.size() == 2);
}

TEST_CASE("variable problem document round trip") {
  const auto parsed = parse_problem_text(kVariableDoc);
  const auto* variable = std::get_if<minsnap::io::VariableProblemFile>(&parsed);
  REQUIRE(variable != nullptr);
  CHECK(variable->dims.named);
  CHECK(variable->mode == minsnap::OptimizerMode::kFixedTotalTime);
  CHECK(variable->total_time == 2.0);
  CHECK(variable->initial_deltas.size() == 2);
}

TEST_CASE("schema violations are rejected with clear messages") {
  CHECK_THROWS_WITH_AS(parse_problem_text(R"({"k": 2, "times": [0,1], "pins": [], "extra": 1})"),
                       doctest::Contains("unknown field 'extra'"), std::invalid_argument);
  CHECK_THROWS_AS(parse_problem_text(R"({"times": [0,1]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_problem_text(R"({"k": 2, "pins": []})"), std::invalid_argument);
  // both times and initial_deltas
  CHECK_THROWS_AS(
      parse_problem_text(
          R"({"k": 2, "pins": [], "times": [0,1], "initial_deltas": [1], "mode": "penalty", "kappa": 1})"),
      std::invalid_argument);
  // variable form without a mode
  CHECK_THROWS_AS(parse_problem_text(R"({"k": 2, "pins": [], "initial_deltas": [1]})"),
                  std::invalid_argument);
  // kappa in fixed_total mode
  CHECK_THROWS_AS(
      parse_problem_text(
          R"({"k": 2, "pins": [], "initial_deltas": [1], "mode": "fixed_total", "total_time": 2, "kappa": 1})"),
      std::invalid_argument);
  // pin outside the schedule
  CHECK_THROWS_AS(parse_problem_text(
                      R"({"k": 2, "times": [0,1], "pins": [{"knot": 5, "deriv": 0, "value": 0}]})"),
                  std::invalid_argument);
  // non-integer knot
  CHECK_THROWS_AS(parse_problem_text(
                      R"({"k": 2, "times": [0,1], "pins": [{"knot": 0.5, "deriv": 0, "value": 0}]})"),
                  std::invalid_argument);
  // unknown pin field
  CHECK_THROWS_WITH_AS(
      parse_problem_text(
          R"({"k": 2, "times": [0,1], "pins": [{"knot": 0, "deriv": 0, "value": 0, "foo": 1}]})"),
      doctest::Contains("unknown field 'foo'"), std::invalid_argument);
}

TEST_CASE("malformed JSON names the byte offset") {
  CHECK_THROWS_WITH_AS(parse_problem_text("{\"k\": 2,, }"), doctest::Contains("byte"),
                       std::invalid_argument);
}

TEST_CASE("world document parsing") {
  const char* doc = R"({
    "bounds": [[0, 10], [0, 5]],
    "obstacles": [{"min": [1, 1], "max": [2, 2]}],
    "start": [0.5, 0.5],
    "goal": {"min": [8, 3], "max": [9, 4]},
    "config": {"max_iters": 10, "seed": 3}
  })";
  const auto world = parse_world_text(doc);
  CHECK(world.workspace.obstacles.size() == 1);
  CHECK(world.start.x() == 0.5);
  CHECK(world.config.has_goal);
  CHECK(world.config.max_iters == 10);
  CHECK(world.config.seed == 3);

  CHECK_THROWS_WITH_AS(parse_world_text(R"({"bounds": [[0,1],[0,1]], "start": [0,0], "bogus": 1})"),
                       doctest::Contains("unknown field 'bogus'"), std::invalid_argument);
  // obstacle outside the bounds
  CHECK_THROWS_AS(parse_world_text(R"({
    "bounds": [[0, 1], [0, 1]],
    "obstacles": [{"min": [0.5, 0.5], "max": [2, 2]}],
    "start": [0.1, 0.1]
  })"),
                  std::invalid_argument);
}

TEST_CASE("float formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 3.0 / 5.0, 1e-17, 6.02e23, -0.0, 123456789.123456789}) {
    const std::string s = minsnap::io::format_float(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("output paths honor the output directory variable") {
  unsetenv(minsnap::io::kOutputDirEnvVar);
  CHECK(minsnap::io::resolve_output_path("a.csv") == "a.csv");
  CHECK(minsnap::io::resolve_output_path("/tmp/a.csv") == "/tmp/a.csv");
  setenv(minsnap::io::kOutputDirEnvVar, "/tmp/outdir", 1);
  CHECK(minsnap::io::resolve_output_path("a.csv") == "/tmp/outdir/a.csv");
  CHECK(minsnap::io::resolve_output_path("/abs/a.csv") == "/abs/a.csv");
  unsetenv(minsnap::io::kOutputDirEnvVar);
}
