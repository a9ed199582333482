#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "minsnap/multidim.hpp"
#include "minsnap/rng.hpp"
#include "minsnap/spline.hpp"

namespace minsnap {

struct Box2 {
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();

  bool contains(const Eigen::Vector2d& p) const {  // closed box
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  Eigen::Vector2d center() const { return 0.5 * (lo + hi); }
  double min_side() const { return std::min(hi.x() - lo.x(), hi.y() - lo.y()); }
};

// Planar world: an axis-aligned bounding box minus a union of closed
// axis-aligned rectangles.
struct Workspace {
  Box2 bounds;
  std::vector<Box2> obstacles;

  bool in_free_space(const Eigen::Vector2d& p) const;
};

void validate_workspace(const Workspace& ws);

struct PlannerConfig {
  double near_radius = 0.0;   // <= 0 selects 25% of the workspace diagonal
  int max_iters = 300;
  double collision_dt = 0.0;  // <= 0 derives one from speed and obstacle size
  std::uint64_t seed = 0;
  // subproblem timing: total time = max(path length / speed, min_total_time)
  double speed = 1.0;
  double min_total_time = 1.0;
  bool has_goal = false;
  Box2 goal;
  // inner time-allocation optimizer budget
  int subproblem_max_iters = 25;
  double subproblem_tol = 1e-5;
};

// Tree embedded in the plane. Vertex 0 is the root; every other vertex has
// exactly one parent edge. Root-path costs are cached and refreshed lazily
// after rewiring.
struct Framework {
  std::vector<Eigen::Vector2d> points;
  std::vector<int> parent;           // -1 for the root
  std::vector<double> path_cost;     // snap of the root path, when clean
  std::vector<std::uint8_t> cost_dirty;

  int size() const { return static_cast<int>(points.size()); }
  // vertex indices from the root to `vertex`, inclusive
  std::vector<int> root_path(int vertex) const;
};

// Uniform sample over the bounds, rejecting obstacle hits. Throws
// NumericalError after 10^4 consecutive rejections.
Eigen::Vector2d sample_free(const Workspace& ws, Rng& rng);

// Index of the vertex closest to p in Euclidean distance, smallest index on
// ties. Linear scan.
int nearest(const Framework& fw, const Eigen::Vector2d& p);

struct SubproblemResult {
  bool ok = false;
  Spline x, y;
  double snap = std::numeric_limits<double>::infinity();
};

// Joint x/y minimum-snap trajectory from the root through `vertex` to
// `target`: value pins along the root-path waypoints, rest-to-rest endpoint
// pins, total time tied to path length, durations optimized on the simplex.
// Failures (ill-posed or optimizer breakdown) come back as ok = false.
SubproblemResult min_snap_subproblem(const Workspace& ws, const Framework& fw, int vertex,
                                     const Eigen::Vector2d& target, const PlannerConfig& cfg);

// True when the subproblem trajectory stays in free space at every sampled
// time (step collision_dt plus all knots). Subproblem failure counts as a
// collision.
bool collision_free(const Workspace& ws, const Framework& fw, int vertex,
                    const Eigen::Vector2d& target, const PlannerConfig& cfg);

// Total snap of the subproblem trajectory; +infinity when the subproblem
// fails, so a failed candidate never wins a comparison.
double snap_cost(const Workspace& ws, const Framework& fw, int vertex,
                 const Eigen::Vector2d& target, const PlannerConfig& cfg);

struct PlanResult {
  Framework framework;
  bool goal_reached = false;
  int best_goal_vertex = -1;            // -1 when no goal is configured
  std::vector<Eigen::Vector2d> best_path;
  SubproblemResult best_trajectory;
};

// Sampling loop: draw a free sample, gate it on a collision-free trajectory
// through its nearest vertex, pick the cheapest near parent, then rewire near
// vertices through the new one when that lowers their root-path snap.
PlanResult plan(const Workspace& ws, const Eigen::Vector2d& start, const PlannerConfig& cfg);

// Classic RRT* with straight-line collision checks and Euclidean edge costs;
// the winning waypoint path is handed to the subproblem solver once at the
// end. The resulting spline is not collision-checked.
PlanResult plan_euclidean_baseline(const Workspace& ws, const Eigen::Vector2d& start,
                                   const PlannerConfig& cfg);

// Exact closed-segment vs closed-rectangle intersection test.
bool segment_intersects_box(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Box2& box);

}  // namespace minsnap
