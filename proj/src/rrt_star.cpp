#include "minsnap/rrt_star.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "minsnap/errors.hpp"

namespace minsnap {

bool Workspace::in_free_space(const Eigen::Vector2d& p) const {
  if (!bounds.contains(p)) return false;
  for (const Box2& box : obstacles) {
    if (box.contains(p)) return false;
  }
  return true;
}

void validate_workspace(const Workspace& ws) {
  if (!(ws.bounds.lo.x() < ws.bounds.hi.x() && ws.bounds.lo.y() < ws.bounds.hi.y())) {
    throw std::invalid_argument("workspace: bounds box is empty");
  }
  for (const Box2& box : ws.obstacles) {
    if (!(box.lo.x() <= box.hi.x() && box.lo.y() <= box.hi.y())) {
      throw std::invalid_argument("workspace: obstacle with inverted corners");
    }
    if (!ws.bounds.contains(box.lo) || !ws.bounds.contains(box.hi)) {
      throw std::invalid_argument("workspace: obstacle outside bounds");
    }
  }
}

std::vector<int> Framework::root_path(int vertex) const {
  std::vector<int> path;
  for (int v = vertex; v >= 0; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Eigen::Vector2d sample_free(const Workspace& ws, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Eigen::Vector2d p(rng.uniform(ws.bounds.lo.x(), ws.bounds.hi.x()),
                            rng.uniform(ws.bounds.lo.y(), ws.bounds.hi.y()));
    if (ws.in_free_space(p)) return p;
  }
  throw NumericalError("sample_free: workspace appears to have no reachable free space");
}

int nearest(const Framework& fw, const Eigen::Vector2d& p) {
  if (fw.size() == 0) throw std::invalid_argument("nearest: empty framework");
  int best = 0;
  double best_sq = (fw.points[0] - p).squaredNorm();
  for (int i = 1; i < fw.size(); ++i) {
    const double sq = (fw.points[i] - p).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

bool segment_intersects_box(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Box2& box) {
  double t0 = 0.0, t1 = 1.0;
  const Eigen::Vector2d d = b - a;
  for (int axis = 0; axis < 2; ++axis) {
    if (d(axis) == 0.0) {
      if (a(axis) < box.lo(axis) || a(axis) > box.hi(axis)) return false;
    } else {
      double ta = (box.lo(axis) - a(axis)) / d(axis);
      double tb = (box.hi(axis) - a(axis)) / d(axis);
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

namespace {

constexpr int kOrder = 5;  // snap is the (k-1)th derivative with k = 5

double resolve_near_radius(const Workspace& ws, const PlannerConfig& cfg) {
  if (cfg.near_radius > 0.0) return cfg.near_radius;
  return 0.25 * (ws.bounds.hi - ws.bounds.lo).norm();
}

double resolve_collision_dt(const Workspace& ws, const PlannerConfig& cfg) {
  if (cfg.collision_dt > 0.0) return cfg.collision_dt;
  double min_side = (ws.bounds.hi - ws.bounds.lo).minCoeff();
  for (const Box2& box : ws.obstacles) min_side = std::min(min_side, box.min_side());
  // consecutive samples at most ~5% of the smallest obstacle side apart,
  // assuming peak speeds around twice the average commanded speed
  return 0.05 * min_side / (2.0 * std::max(cfg.speed, 1e-9));
}

struct Candidate {
  SubproblemResult traj;
  bool free = false;
};

std::vector<Eigen::Vector2d> waypoints_through(const Framework& fw, int vertex,
                                               const Eigen::Vector2d& target) {
  std::vector<Eigen::Vector2d> w;
  for (int v : fw.root_path(vertex)) w.push_back(fw.points[v]);
  w.push_back(target);
  return w;
}

SubproblemResult solve_waypoints(const std::vector<Eigen::Vector2d>& w,
                                 const PlannerConfig& cfg) {
  const int l = static_cast<int>(w.size()) - 1;
  SubproblemResult out;
  if (l < 1) return out;

  double path_length = 0.0;
  Eigen::VectorXd chords(l);
  for (int j = 0; j < l; ++j) {
    chords(j) = (w[j + 1] - w[j]).norm();
    path_length += chords(j);
  }
  const double total_time =
      std::max(path_length / std::max(cfg.speed, 1e-9), cfg.min_total_time);

  PinSet pins_x, pins_y;
  for (int j = 0; j <= l; ++j) {
    pins_x.push_back({j, 0, w[j].x()});
    pins_y.push_back({j, 0, w[j].y()});
  }
  for (int q = 1; q < kOrder; ++q) {
    pins_x.push_back({0, q, 0.0});
    pins_x.push_back({l, q, 0.0});
    pins_y.push_back({0, q, 0.0});
    pins_y.push_back({l, q, 0.0});
  }

  MultiDimProblem problem;
  problem.dimensions = {{"x", kOrder, std::move(pins_x)}, {"y", kOrder, std::move(pins_y)}};
  // seed durations from chord lengths, padded so zero-length legs stay open
  Eigen::VectorXd d0 = chords.array() + 0.1 * (path_length / l) + 1e-9;
  d0 *= (0.5 * total_time) / d0.sum();
  problem.initial_half_durations = d0;
  problem.config.mode = OptimizerMode::kFixedTotalTime;
  problem.config.total_time = total_time;
  // a floor well above the default keeps the per-segment cost matrices within
  // double precision even when a leg has near-zero length
  problem.config.d_min = std::max(1e-6, 0.02 * (0.5 * total_time) / l);
  problem.config.max_iters = cfg.subproblem_max_iters;
  problem.config.tol = cfg.subproblem_tol;

  try {
    MultiDimResult r = solve_multidim(problem, DescentMethod::kExactGradient);
    out.ok = true;
    out.snap = r.total_cost;
    out.x = std::move(r.trajectory.splines[0]);
    out.y = std::move(r.trajectory.splines[1]);
  } catch (const NumericalError&) {
    out.ok = false;
  } catch (const std::invalid_argument&) {
    out.ok = false;
  }
  return out;
}

bool trajectory_in_free_space(const Workspace& ws, const SubproblemResult& traj, double dt) {
  const TimeAllocation& times = traj.x.times();
  const double start = times.start_time();
  const double end = times.end_time();
  const long steps = static_cast<long>(std::floor((end - start) / dt));
  for (long s = 0; s <= steps; ++s) {
    const double tau = std::min(start + s * dt, end);
    if (!ws.in_free_space({traj.x.eval(tau), traj.y.eval(tau)})) return false;
  }
  for (long j = 0; j < times.knots().size(); ++j) {
    const double tau = times.knots()(j);
    if (!ws.in_free_space({traj.x.eval(tau), traj.y.eval(tau)})) return false;
  }
  return true;
}

Candidate evaluate_candidate(const Workspace& ws, const Framework& fw, int vertex,
                             const Eigen::Vector2d& target, const PlannerConfig& cfg,
                             double dt) {
  Candidate c;
  c.traj = solve_waypoints(waypoints_through(fw, vertex, target), cfg);
  c.free = c.traj.ok && trajectory_in_free_space(ws, c.traj, dt);
  return c;
}

bool is_ancestor(const Framework& fw, int candidate, int vertex) {
  for (int v = vertex; v >= 0; v = fw.parent[v]) {
    if (v == candidate) return true;
  }
  return false;
}

std::vector<int> descendants_of(const Framework& fw, int vertex) {
  std::vector<int> out;
  std::vector<int> stack{vertex};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u = 0; u < fw.size(); ++u) {
      if (fw.parent[u] == v) {
        out.push_back(u);
        stack.push_back(u);
      }
    }
  }
  return out;
}

void mark_subtree_dirty(Framework& fw, int vertex) {
  std::vector<int> stack{vertex};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    fw.cost_dirty[v] = 1;
    for (int u = 0; u < fw.size(); ++u) {
      if (fw.parent[u] == v) stack.push_back(u);
    }
  }
}

}  // namespace

SubproblemResult min_snap_subproblem(const Workspace& ws, const Framework& fw, int vertex,
                                     const Eigen::Vector2d& target, const PlannerConfig& cfg) {
  (void)ws;
  return solve_waypoints(waypoints_through(fw, vertex, target), cfg);
}

bool collision_free(const Workspace& ws, const Framework& fw, int vertex,
                    const Eigen::Vector2d& target, const PlannerConfig& cfg) {
  const SubproblemResult traj = min_snap_subproblem(ws, fw, vertex, target, cfg);
  if (!traj.ok) return false;
  return trajectory_in_free_space(ws, traj, resolve_collision_dt(ws, cfg));
}

double snap_cost(const Workspace& ws, const Framework& fw, int vertex,
                 const Eigen::Vector2d& target, const PlannerConfig& cfg) {
  const SubproblemResult traj = min_snap_subproblem(ws, fw, vertex, target, cfg);
  return traj.ok ? traj.snap : std::numeric_limits<double>::infinity();
}

namespace {

// Refresh a dirty cached root-path cost by re-solving the vertex's subproblem.
double root_path_snap(const Workspace& ws, Framework& fw, int vertex,
                      const PlannerConfig& cfg) {
  if (vertex == 0) return 0.0;
  if (fw.cost_dirty[vertex]) {
    const SubproblemResult traj =
        min_snap_subproblem(ws, fw, fw.parent[vertex], fw.points[vertex], cfg);
    fw.path_cost[vertex] = traj.ok ? traj.snap : std::numeric_limits<double>::infinity();
    fw.cost_dirty[vertex] = 0;
  }
  return fw.path_cost[vertex];
}

// Select the cheapest goal-region vertex and re-solve its root trajectory.
// When verify_dt > 0, candidates are accepted in cost order only after their
// trajectory clears the workspace at that sampling step.
PlanResult extract_best(const Workspace& ws, Framework& fw, const PlannerConfig& cfg,
                        const std::function<double(Framework&, int)>& cost_of,
                        double verify_dt) {
  PlanResult out;
  if (!cfg.has_goal) {
    out.framework = fw;
    return out;
  }
  std::vector<std::pair<double, int>> candidates;
  for (int v = 1; v < fw.size(); ++v) {
    if (cfg.goal.contains(fw.points[v])) candidates.push_back({cost_of(fw, v), v});
  }
  std::sort(candidates.begin(), candidates.end());

  int best = -1;
  for (const auto& [cost, v] : candidates) {
    SubproblemResult traj = min_snap_subproblem(ws, fw, fw.parent[v], fw.points[v], cfg);
    if (!traj.ok) continue;
    if (verify_dt > 0.0 && !trajectory_in_free_space(ws, traj, verify_dt)) continue;
    best = v;
    out.best_trajectory = std::move(traj);
    break;
  }
  out.goal_reached = best >= 0;
  if (best < 0) {
    // nothing qualified inside the goal region; fall back to the closest
    // approach so callers still get a trajectory to inspect
    double best_dist = std::numeric_limits<double>::infinity();
    for (int v = 0; v < fw.size(); ++v) {
      const double dist = (fw.points[v] - cfg.goal.center()).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = v;
      }
    }
    if (best > 0) {
      out.best_trajectory = min_snap_subproblem(ws, fw, fw.parent[best], fw.points[best], cfg);
    }
  }
  out.best_goal_vertex = best;
  for (int v : fw.root_path(best)) out.best_path.push_back(fw.points[v]);
  out.framework = fw;
  return out;
}

}  // namespace

PlanResult plan(const Workspace& ws, const Eigen::Vector2d& start, const PlannerConfig& cfg) {
  validate_workspace(ws);
  if (!ws.in_free_space(start)) throw std::invalid_argument("plan: start not in free space");
  const double eps = resolve_near_radius(ws, cfg);
  const double dt = resolve_collision_dt(ws, cfg);

  Framework fw;
  fw.points = {start};
  fw.parent = {-1};
  fw.path_cost = {0.0};
  fw.cost_dirty = {0};

  Rng rng(cfg.seed);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::Vector2d v_rand = sample_free(ws, rng);
    const int i_init = nearest(fw, v_rand);
    const Candidate gate = evaluate_candidate(ws, fw, i_init, v_rand, cfg, dt);
    if (!gate.free) continue;

    // near set over the vertices that existed before this sample
    std::vector<int> near;
    for (int v = 0; v < fw.size(); ++v) {
      if ((fw.points[v] - v_rand).norm() < eps) near.push_back(v);
    }

    int i_min = i_init;
    double j_min = gate.traj.snap;
    for (int i_near : near) {
      if (i_near == i_init) continue;
      const Candidate c = evaluate_candidate(ws, fw, i_near, v_rand, cfg, dt);
      if (c.free && c.traj.snap < j_min) {
        i_min = i_near;
        j_min = c.traj.snap;
      }
    }

    const int new_vertex = fw.size();
    fw.points.push_back(v_rand);
    fw.parent.push_back(i_min);
    fw.path_cost.push_back(j_min);
    fw.cost_dirty.push_back(0);

    for (int i_near : near) {
      if (i_near == 0) continue;                       // root keeps no parent edge
      if (is_ancestor(fw, i_near, new_vertex)) continue;  // a cycle otherwise
      const double j_near = root_path_snap(ws, fw, i_near, cfg);
      const Candidate c = evaluate_candidate(ws, fw, new_vertex, fw.points[i_near], cfg, dt);
      if (c.free && c.traj.snap < j_near) {
        // Rewiring shifts the root path of everything below i_near, and the
        // re-optimized knot times reshape those trajectories everywhere, not
        // just on the changed prefix. Commit only if every descendant's
        // re-solved trajectory still clears the obstacles; otherwise the tree
        // would hold vertices whose current trajectory was never checked.
        const int old_parent = fw.parent[i_near];
        fw.parent[i_near] = new_vertex;
        bool subtree_clear = true;
        for (int d : descendants_of(fw, i_near)) {
          const Candidate cd = evaluate_candidate(ws, fw, fw.parent[d], fw.points[d], cfg, dt);
          if (!cd.free) {
            subtree_clear = false;
            break;
          }
        }
        if (subtree_clear) {
          mark_subtree_dirty(fw, i_near);
          fw.path_cost[i_near] = c.traj.snap;
          fw.cost_dirty[i_near] = 0;
        } else {
          fw.parent[i_near] = old_parent;
        }
      }
    }
  }
  // leave every cached cost clean for callers
  for (int v = 1; v < fw.size(); ++v) root_path_snap(ws, fw, v, cfg);
  return extract_best(
      ws, fw, cfg, [&](Framework& f, int v) { return root_path_snap(ws, f, v, cfg); },
      dt / 10.0);
}

PlanResult plan_euclidean_baseline(const Workspace& ws, const Eigen::Vector2d& start,
                                   const PlannerConfig& cfg) {
  validate_workspace(ws);
  if (!ws.in_free_space(start)) throw std::invalid_argument("plan: start not in free space");
  const double eps = resolve_near_radius(ws, cfg);

  const auto edge_free = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    for (const Box2& box : ws.obstacles) {
      if (segment_intersects_box(a, b, box)) return false;
    }
    return true;  // endpoints in bounds and the bounds box is convex
  };

  Framework fw;
  fw.points = {start};
  fw.parent = {-1};
  fw.path_cost = {0.0};  // root-path length for the baseline
  fw.cost_dirty = {0};

  const auto refresh_length = [&](int vertex) {
    // lengths are cheap; recompute the whole root path when dirty
    if (vertex == 0) return 0.0;
    if (fw.cost_dirty[vertex]) {
      double len = 0.0;
      const auto path = fw.root_path(vertex);
      for (size_t i = 1; i < path.size(); ++i) {
        len += (fw.points[path[i]] - fw.points[path[i - 1]]).norm();
      }
      fw.path_cost[vertex] = len;
      fw.cost_dirty[vertex] = 0;
    }
    return fw.path_cost[vertex];
  };

  Rng rng(cfg.seed);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::Vector2d v_rand = sample_free(ws, rng);
    const int i_init = nearest(fw, v_rand);
    if (!edge_free(fw.points[i_init], v_rand)) continue;

    std::vector<int> near;
    for (int v = 0; v < fw.size(); ++v) {
      if ((fw.points[v] - v_rand).norm() < eps) near.push_back(v);
    }

    int i_min = i_init;
    double j_min = refresh_length(i_init) + (fw.points[i_init] - v_rand).norm();
    for (int i_near : near) {
      if (i_near == i_init) continue;
      if (!edge_free(fw.points[i_near], v_rand)) continue;
      const double j = refresh_length(i_near) + (fw.points[i_near] - v_rand).norm();
      if (j < j_min) {
        i_min = i_near;
        j_min = j;
      }
    }

    const int new_vertex = fw.size();
    fw.points.push_back(v_rand);
    fw.parent.push_back(i_min);
    fw.path_cost.push_back(j_min);
    fw.cost_dirty.push_back(0);

    for (int i_near : near) {
      if (i_near == 0) continue;
      if (is_ancestor(fw, i_near, new_vertex)) continue;
      if (!edge_free(v_rand, fw.points[i_near])) continue;
      const double through_new = j_min + (v_rand - fw.points[i_near]).norm();
      if (through_new < refresh_length(i_near)) {
        fw.parent[i_near] = new_vertex;
        mark_subtree_dirty(fw, i_near);
        fw.path_cost[i_near] = through_new;
        fw.cost_dirty[i_near] = 0;
      }
    }
  }
  for (int v = 1; v < fw.size(); ++v) refresh_length(v);
  // by design the baseline's final spline is not collision-checked
  return extract_best(
      ws, fw, cfg, [&](Framework&, int v) { return refresh_length(v); }, 0.0);
}

}  // namespace minsnap
