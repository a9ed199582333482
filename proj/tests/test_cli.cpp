// End-to-end checks of the command-line tool: exit codes, output files and
// determinism. The binary path and the shipped data directory come in through
// compile definitions.

#include "doctest.h"

#include <cstdio>
#include <limits>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  const std::string out_path = std::string(MINSNAP_TMP_DIR) + "/cli_stdout.txt";
  const std::string err_path = std::string(MINSNAP_TMP_DIR) + "/cli_stderr.txt";
  const std::string cmd =
      std::string(MINSNAP_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ostringstream o, e;
  o << std::ifstream(out_path).rdbuf();
  e << std::ifstream(err_path).rdbuf();
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::string data_file(const std::string& name) {
  return std::string(MINSNAP_DATA_DIR) + "/" + name;
}

std::string tmp_file(const std::string& name) {
  return std::string(MINSNAP_TMP_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  ss << std::ifstream(path).rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> vals;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) vals.push_back(std::strtod(field.c_str(), nullptr));
  return vals;
}

double printed_value(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + " = ");
  REQUIRE(pos != std::string::npos);
  return std::strtod(out.c_str() + pos + key.size() + 3, nullptr);
}

}  // namespace

TEST_CASE("fixed solve reproduces the clamped-cubic case") {
  const std::string out = tmp_file("hermite.csv");
  const auto r = run("fixed " + data_file("hermite.json") + " --out " + out + " --oracle");
  REQUIRE(r.exit_code == 0);
  CHECK(printed_value(r.out, "J") == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(printed_value(r.out, "oracle max deviation") <= 1e-7);

  const auto rows = lines_of(slurp(out));
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0] == "t,deriv0,deriv1");
  const auto first = csv_row(rows[1]);
  const auto last = csv_row(rows.back());
  CHECK(first[0] == -1.0);  // knot rows carry the pinned values
  CHECK(first[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(first[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(last[0] == 1.0);
  CHECK(last[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(last[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exit codes follow the contract") {
  SUBCASE("malformed JSON exits 1 and names the byte") {
    const std::string bad = tmp_file("bad.json");
    spit(bad, "{\"k\": 2,,}");
    const auto r = run("fixed " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("byte") != std::string::npos);
  }
  SUBCASE("schema violation exits 1") {
    const std::string bad = tmp_file("bad2.json");
    spit(bad, R"({"k": 2, "times": [0, 1], "pins": [], "wat": 3})");
    CHECK(run("fixed " + bad).exit_code == 1);
  }
  SUBCASE("under-pinned problem exits 2") {
    const std::string bad = tmp_file("underpinned.json");
    spit(bad, R"({"k": 5, "times": [0, 2],
      "pins": [{"knot": 0, "deriv": 0, "value": 0}, {"knot": 1, "deriv": 0, "value": 1}]})");
    CHECK(run("fixed " + bad).exit_code == 2);
  }
  SUBCASE("missing subcommand exits 1") { CHECK(run("").exit_code == 1); }
  SUBCASE("bench-scaling enforces the repetition floor") {
    CHECK(run("bench-scaling --reps 2 --lmax 128 --out " + tmp_file("s.csv")).exit_code == 1);
  }
}

TEST_CASE("variable solve emits a descent trace") {
  SUBCASE("fully constrained single segment leaves a one-row trace") {
    const std::string problem = tmp_file("single.json");
    spit(problem, R"({"k": 2, "initial_deltas": [0.7], "mode": "fixed_total", "total_time": 3.0,
      "pins": [{"knot": 0, "deriv": 0, "value": 0}, {"knot": 1, "deriv": 0, "value": 1}]})");
    const std::string trace = tmp_file("single_trace.csv");
    const auto r = run("variable " + problem + " --out " + tmp_file("single.csv") + " --trace " + trace);
    REQUIRE(r.exit_code == 0);
    CHECK(lines_of(slurp(trace)).size() == 2);  // header + initial entry
  }
  SUBCASE("trace objective is non-increasing and methods agree") {
    const std::string trace = tmp_file("var_trace.csv");
    const auto exact = run("variable " + data_file("waypoints_var.json") + " --out " +
                           tmp_file("var1.csv") + " --trace " + trace);
    REQUIRE(exact.exit_code == 0);
    const auto rows = lines_of(slurp(trace));
    REQUIRE(rows.size() >= 3);
    double prev = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < rows.size(); ++i) {
      const auto vals = csv_row(rows[i]);
      CHECK(vals[1] <= prev + 1e-12);
      prev = vals[1];
    }
    const auto fd = run("variable " + data_file("waypoints_var.json") + " --out " +
                        tmp_file("var2.csv") + " --method findiff");
    REQUIRE(fd.exit_code == 0);
    const double j_exact = printed_value(exact.out, "J");
    const double j_fd = printed_value(fd.out, "J");
    CHECK(j_exact == doctest::Approx(j_fd).epsilon(1e-4));
  }
}

TEST_CASE("outputs are deterministic") {
  const std::string out1 = tmp_file("det1.csv");
  const std::string out2 = tmp_file("det2.csv");
  REQUIRE(run("fixed " + data_file("hermite.json") + " --out " + out1).exit_code == 0);
  REQUIRE(run("fixed " + data_file("hermite.json") + " --out " + out2).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));

  const std::string world = tmp_file("det_world.json");
  spit(world, R"({
    "bounds": [[0, 10], [0, 10]],
    "obstacles": [{"min": [4, 0], "max": [5, 6]}],
    "start": [1, 1],
    "goal": {"min": [7, 7], "max": [9.5, 9.5]},
    "config": {"max_iters": 40, "seed": 12, "subproblem_max_iters": 8}
  })");
  const std::string d1 = tmp_file("rrt_det1");
  const std::string d2 = tmp_file("rrt_det2");
  REQUIRE(run("rrt " + world + " --out-dir " + d1).exit_code == 0);
  REQUIRE(run("rrt " + world + " --out-dir " + d2).exit_code == 0);
  CHECK(slurp(d1 + "/edges.csv") == slurp(d2 + "/edges.csv"));
  CHECK(slurp(d1 + "/trajectory.csv") == slurp(d2 + "/trajectory.csv"));
  // metrics differ only in the wall-clock column
  const auto m1 = lines_of(slurp(d1 + "/metrics.csv"));
  const auto m2 = lines_of(slurp(d2 + "/metrics.csv"));
  REQUIRE(m1.size() == m2.size());
  for (size_t i = 1; i < m1.size(); ++i) {
    CHECK(m1[i].substr(0, m1[i].rfind(',')) == m2[i].substr(0, m2[i].rfind(',')));
  }
}

TEST_CASE("planner runs in an obstacle-free world with both methods") {
  const std::string world = tmp_file("free_world.json");
  spit(world, R"({
    "bounds": [[0, 6], [0, 6]],
    "start": [1, 1],
    "goal": {"min": [4, 4], "max": [5.5, 5.5]},
    "config": {"max_iters": 30, "seed": 2, "subproblem_max_iters": 8}
  })");
  const auto a = run("rrt " + world + " --out-dir " + tmp_file("free_a"));
  CHECK(a.exit_code == 0);
  const auto b = run("rrt " + world + " --out-dir " + tmp_file("free_b") + " --baseline");
  CHECK(b.exit_code == 0);
}

TEST_CASE("relative outputs land under the output directory variable") {
  const std::string base = tmp_file("envout");
  std::system(("rm -rf " + base + " && mkdir -p " + base).c_str());
  const std::string cmd = std::string("MINSNAP_OUT_DIR=") + base + " " + MINSNAP_CLI_PATH +
                          " fixed " + data_file("hermite.json") + " --out env_traj.csv > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(std::ifstream(base + "/env_traj.csv").good());
}

TEST_CASE("conditioning bench reports the two formulations") {
  const std::string out = tmp_file("cond.csv");
  const auto r = run("bench-conditioning --l 12 --k 4 --shift 50 --out " + out);
  REQUIRE(r.exit_code == 0);
  const auto rows = lines_of(slurp(out));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].find("cond_conditioned") != std::string::npos);
}
