#pragma once

// Stop-by-stop exploration: a wall is accepted after three stops whose wall
// estimates agree, the robot moves parallel to the wall it is checking, and
// the room is complete once the accepted walls enclose the start location.
//
// All planner quantities live in the robot's working frame, whose origin is
// the first stop.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "echomap/rig.hpp"

namespace echomap {

enum class HypothesisStatus { tentative_1, tentative_2, confirmed };

/// 3 degrees.
inline constexpr double kDefaultParallelTol = 0.05235987755982988;

struct WallHypothesis {
  Line2 line;
  std::vector<int> support_stops;
  std::vector<Point2> support_points;  // rig centres where each support was measured
  std::vector<Line2> support_lines;
  std::vector<double> support_weights;  // cluster sizes behind each support line
  HypothesisStatus status = HypothesisStatus::tentative_1;
};

enum class PlannerAction { parallel_move, extension_retry, random_restart, wall_confirmed, room_complete };

std::string_view to_string(PlannerAction action);
std::string_view to_string(HypothesisStatus status);

struct PlannerConfig {
  double angle_tol_deg = 3.0;
  double mag_tol = 0.05;
  double step_dist = 0.5;  // m, at most kMaxArmExtension-sized parallel moves
  double default_extension = 0.4;
  std::vector<double> mitigation_extensions{0.5, 0.35, 0.2, 0.1};
  double cluster_radius = 0.1;
  std::size_t min_support = 0;  // 0 = max(3, orientations / 4)
  int max_steps = 300;
  double restart_radius = 1.0;
  int restart_attempts = 1000;
  SweepConfig sweep;

  void validate() const;
  std::size_t effective_min_support() const;
};

struct PlannerState {
  RigPose current_pose;
  int stop_count = 1;
  std::vector<WallHypothesis> confirmed_walls;
  std::optional<WallHypothesis> active_hypothesis;
  std::uint64_t rng_seed = 0;
  Point2 origin;  // always (0, 0) in the working frame
  std::uint64_t restart_count = 0;

  std::vector<Line2> confirmed_lines() const;
};

/// One row of the per-stop trace.
struct StopRecord {
  int stop = 0;
  RigPose pose;
  PlannerAction action = PlannerAction::parallel_move;
  std::optional<Line2> observed_line;
  std::optional<HypothesisStatus> hypothesis_status;  // after this stop
  std::vector<std::size_t> cluster_sizes;            // qualifying clusters, ranked
  std::size_t candidate_count = 0;
  bool extension_used = false;
  bool guard_restart = false;
  std::size_t confirmed_count = 0;
};

struct StepOutcome {
  PlannerState new_state;
  PlannerAction action = PlannerAction::parallel_move;
  std::optional<Polygon2> room;  // present iff action == room_complete
  StopRecord record;
};

PlannerState initial_state(std::uint64_t rng_seed, const PlannerConfig& cfg = {});

/// Same orientation (mod pi) within angle_tol, perpendicular feet from
/// `origin` pointing the same way, and foot lengths within mag_tol of the
/// larger one. Symmetric and reflexive, not transitive.
bool walls_approximate(const Line2& w1, const Line2& w2, Point2 origin, double angle_tol, double mag_tol);

/// Step of `step_dist` along `hypothesis` from the current centre. Heads away
/// from the stops already supporting the active hypothesis; when that does
/// not decide, towards the side farther from the examined walls (confirmed
/// walls plus the active hypothesis), then along the canonical tangent.
RigPose propose_next_stop(const PlannerState& state, const Line2& hypothesis, double step_dist);

/// Sweep at the current stop (falling back to the extension schedule) and
/// return the wall implied by the best cluster not already confirmed.
std::optional<Line2> observe_and_hypothesize(const PlannerState& state, const SensingOracle& oracle,
                                             const PlannerConfig& cfg = {});

/// Closed room bounded by `walls` around `origin`, vertices counter-clockwise
/// starting at the lowest (then leftmost) corner; nullopt while open. Inward
/// normals must leave no angular gap wider than pi - parallel_tol, so two
/// near-parallel walls do not close a sliver at infinity.
std::optional<Polygon2> room_closure(std::span<const Line2> walls, Point2 origin = {},
                                     double parallel_tol = kDefaultParallelTol);

/// Weighted mean of near-identical lines in (normal angle, offset) form.
Line2 fuse_lines(std::span<const Line2> lines, std::span<const double> weights);

/// One robot stop. Throws MaxStepsExceeded once stop_count passes cfg.max_steps.
StepOutcome advance(const PlannerState& state, const SensingOracle& oracle, const PlannerConfig& cfg = {});

struct PlannerResult {
  Polygon2 room;
  std::vector<WallHypothesis> walls;
  std::vector<StopRecord> trace;
  int stops = 0;
};

/// Runs advance() until the room closes. `on_stop` sees every trace record.
/// Throws MaxStepsExceeded.
PlannerResult run_planner(const SensingOracle& oracle, const PlannerConfig& cfg, std::uint64_t rng_seed,
                          const std::function<void(const StopRecord&)>& on_stop = {});

}  // namespace echomap
