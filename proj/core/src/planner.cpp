#include "echomap/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "echomap/acoustic_sim.hpp"
#include "echomap/errors.hpp"

namespace echomap {

std::string_view to_string(PlannerAction action) {
  switch (action) {
    case PlannerAction::parallel_move: return "parallel_move";
    case PlannerAction::extension_retry: return "extension_retry";
    case PlannerAction::random_restart: return "random_restart";
    case PlannerAction::wall_confirmed: return "wall_confirmed";
    case PlannerAction::room_complete: return "room_complete";
  }
  return "unknown";
}

std::string_view to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::tentative_1: return "tentative_1";
    case HypothesisStatus::tentative_2: return "tentative_2";
    case HypothesisStatus::confirmed: return "confirmed";
  }
  return "unknown";
}

void PlannerConfig::validate() const {
  if (!(angle_tol_deg > 0.0)) throw ConfigError("angle_tol_deg must be positive");
  if (!(mag_tol > 0.0)) throw ConfigError("mag_tol must be positive");
  if (!(step_dist > 0.0 && step_dist <= kMaxArmExtension)) throw ConfigError("step_dist must lie in (0, 0.5] m");
  if (!(default_extension > 0.0 && default_extension <= kMaxArmExtension)) {
    throw ConfigError("default_extension must lie in (0, 0.5] m");
  }
  for (double e : mitigation_extensions) {
    if (!(e > 0.0 && e <= kMaxArmExtension)) throw ConfigError("mitigation extensions must lie in (0, 0.5] m");
  }
  if (!(cluster_radius > 0.0)) throw ConfigError("cluster_radius must be positive");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (!(restart_radius > 0.0)) throw ConfigError("restart_radius must be positive");
  orientation_count(sweep.delta_deg);
  sweep.locate.validate();
}

std::size_t PlannerConfig::effective_min_support() const {
  return min_support > 0 ? min_support : default_min_support(orientation_count(sweep.delta_deg));
}

std::vector<Line2> PlannerState::confirmed_lines() const {
  std::vector<Line2> out;
  out.reserve(confirmed_walls.size());
  for (const auto& w : confirmed_walls) out.push_back(w.line);
  return out;
}

PlannerState initial_state(std::uint64_t rng_seed, const PlannerConfig& cfg) {
  PlannerState s;
  s.current_pose = RigPose::make({0.0, 0.0}, 0.0, cfg.default_extension);
  s.rng_seed = rng_seed;
  return s;
}

bool walls_approximate(const Line2& w1, const Line2& w2, Point2 origin, double angle_tol, double mag_tol) {
  double diff = std::abs(w1.angle() - w2.angle());
  diff = std::min(diff, std::numbers::pi - diff);
  if (diff > angle_tol) return false;
  const Point2 f1 = w1.normal() * -point_side(origin, w1);
  const Point2 f2 = w2.normal() * -point_side(origin, w2);
  if (!(dot(f1, f2) > 0.0)) return false;
  const double m1 = norm(f1);
  const double m2 = norm(f2);
  return std::abs(m1 - m2) <= mag_tol * std::max(m1, m2);
}

RigPose propose_next_stop(const PlannerState& state, const Line2& hypothesis, double step_dist) {
  const Point2 t = hypothesis.tangent();
  const Point2 here = state.current_pose.center;
  const Point2 forward = here + t * step_dist;
  const Point2 backward = here - t * step_dist;

  std::vector<Line2> examined = state.confirmed_lines();
  if (state.active_hypothesis) examined.push_back(state.active_hypothesis->line);
  auto clearance = [&](Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : examined) best = std::min(best, point_line_distance(p, l));
    return best;
  };
  auto nearest_support = [&](Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    if (state.active_hypothesis) {
      for (Point2 q : state.active_hypothesis->support_points) best = std::min(best, distance(p, q));
    }
    return best;
  };
  const double sf = nearest_support(forward);
  const double sb = nearest_support(backward);
  bool go_back = false;
  if (std::isfinite(sf) && std::abs(sf - sb) > Tolerances::kGeometricEps) {
    go_back = sb > sf;
  } else {
    const double f = clearance(forward);
    const double b = clearance(backward);
    go_back = std::isfinite(b) && b > f + Tolerances::kGeometricEps;
  }
  return RigPose::make(go_back ? backward : forward, state.current_pose.arm_angle, state.current_pose.arm_extension);
}

namespace {

constexpr std::uint64_t kMeasurementsPerStop = 1'000'000;

double angle_tol_rad(const PlannerConfig& cfg) { return cfg.angle_tol_deg * std::numbers::pi / 180.0; }

struct RankedSweep {
  std::vector<ISCluster> ranked;
  std::size_t candidates = 0;
};

RankedSweep sweep_and_rank(const SensingOracle& oracle, const RigPose& pose, const PlannerConfig& cfg,
                           std::span<const Line2> known, std::uint64_t base) {
  const auto candidates = rotation_sweep(oracle, pose, cfg.sweep, known, base);
  RankedSweep out;
  out.candidates = candidates.size();
  out.ranked = rank_and_prune(candidates, pose.center, known, cfg.cluster_radius, cfg.effective_min_support());
  return out;
}

std::optional<Line2> implied_wall(const ISCluster& cluster, Point2 source) {
  if (distance(cluster.centroid, source) <= Tolerances::kMinBisectorDistance) return std::nullopt;
  return wall_line_from_source_and_is(source, cluster.centroid);
}

bool matches_any(const Line2& line, std::span<const Line2> walls, Point2 origin, const PlannerConfig& cfg) {
  return std::any_of(walls.begin(), walls.end(), [&](const Line2& w) {
    return walls_approximate(line, w, origin, angle_tol_rad(cfg), cfg.mag_tol);
  });
}

struct Pick {
  Line2 line;
  std::size_t index;
  double weight;
};

// First ranked cluster whose wall is not already confirmed.
std::optional<Pick> pick_new_wall(const std::vector<ISCluster>& ranked, Point2 source,
                                  std::span<const Line2> confirmed, Point2 origin, const PlannerConfig& cfg,
                                  std::optional<std::size_t> skip = std::nullopt) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (skip && *skip == i) continue;
    const auto line = implied_wall(ranked[i], source);
    if (!line || matches_any(*line, confirmed, origin, cfg)) continue;
    return Pick{*line, i, static_cast<double>(ranked[i].size)};
  }
  return std::nullopt;
}

// First ranked cluster whose wall agrees with every support line so far.
std::optional<Pick> pick_matching_wall(const std::vector<ISCluster>& ranked, Point2 source,
                                       const WallHypothesis& hyp, Point2 origin, const PlannerConfig& cfg) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto line = implied_wall(ranked[i], source);
    if (!line) continue;
    const bool agrees = std::all_of(hyp.support_lines.begin(), hyp.support_lines.end(), [&](const Line2& s) {
      return walls_approximate(*line, s, origin, angle_tol_rad(cfg), cfg.mag_tol);
    });
    if (agrees) return Pick{*line, i, static_cast<double>(ranked[i].size)};
  }
  return std::nullopt;
}

WallHypothesis start_hypothesis(const Pick& pick, int stop, Point2 where) {
  WallHypothesis h;
  h.line = pick.line;
  h.support_stops = {stop};
  h.support_points = {where};
  h.support_lines = {pick.line};
  h.support_weights = {pick.weight};
  h.status = HypothesisStatus::tentative_1;
  return h;
}

Point2 random_restart_center(PlannerState& state, const SensingOracle& oracle, const PlannerConfig& cfg) {
  std::mt19937_64 rng(mix_seed(state.rng_seed, state.restart_count++));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Point2 here = state.current_pose.center;
  for (int attempt = 0; attempt < cfg.restart_attempts; ++attempt) {
    const double r = cfg.restart_radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    const Point2 p = here + Point2{std::cos(a), std::sin(a)} * r;
    if (oracle.can_stand(p)) return p;
  }
  return here;
}

std::vector<std::size_t> sizes_of(const std::vector<ISCluster>& ranked) {
  std::vector<std::size_t> out;
  out.reserve(ranked.size());
  for (const auto& c : ranked) out.push_back(c.size);
  return out;
}

}  // namespace

Line2 fuse_lines(std::span<const Line2> lines, std::span<const double> weights) {
  if (lines.empty() || lines.size() != weights.size()) throw DegenerateInput("fuse_lines needs one weight per line");
  Point2 n_sum;
  double c_sum = 0.0;
  double w_sum = 0.0;
  const Point2 ref = lines.front().normal();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    // Align each normal with the first so offsets add coherently.
    const double sgn = dot(lines[i].normal(), ref) < 0.0 ? -1.0 : 1.0;
    n_sum = n_sum + lines[i].normal() * (sgn * weights[i]);
    c_sum += sgn * lines[i].offset() * weights[i];
    w_sum += weights[i];
  }
  if (!(w_sum > 0.0)) throw DegenerateInput("fuse_lines needs positive total weight");
  const Point2 n = n_sum / norm(n_sum);
  return Line2::from_normal_offset(n, c_sum / w_sum);
}

std::optional<Polygon2> room_closure(std::span<const Line2> walls, Point2 origin, double parallel_tol) {
  if (!(parallel_tol >= 0.0 && parallel_tol < std::numbers::pi / 2)) {
    throw DegenerateInput("parallel_tol must lie in [0, pi/2)");
  }
  if (walls.size() < 3) return std::nullopt;
  struct HalfPlane {
    Point2 inward;  // unit normal pointing towards the origin side
    double bound;   // inward . p >= bound
  };
  std::vector<HalfPlane> planes;
  std::vector<double> angles;
  for (const auto& w : walls) {
    const double side = point_side(origin, w);
    if (std::abs(side) <= Tolerances::kGeometricEps) return std::nullopt;
    const double sgn = side > 0.0 ? 1.0 : -1.0;
    planes.push_back({w.normal() * sgn, w.offset() * sgn});
    angles.push_back(std::atan2(planes.back().inward.y, planes.back().inward.x));
  }
  // Bounded iff the inward normals leave no angular gap of pi or more.
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  if (max_gap >= std::numbers::pi - std::max(parallel_tol, 1e-9)) return std::nullopt;

  constexpr double kInsideSlack = 1e-9;
  std::vector<Point2> corners;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    for (std::size_t j = i + 1; j < walls.size(); ++j) {
      const auto p = line_intersection(walls[i], walls[j]);
      if (!p) continue;
      const bool inside = std::all_of(planes.begin(), planes.end(),
                                      [&](const HalfPlane& h) { return dot(h.inward, *p) - h.bound >= -kInsideSlack; });
      if (!inside) continue;
      const bool dup = std::any_of(corners.begin(), corners.end(),
                                   [&](Point2 q) { return distance(q, *p) <= Tolerances::kGeometricEps * 10; });
      if (!dup) corners.push_back(*p);
    }
  }
  if (corners.size() < 3) return std::nullopt;

  Point2 mean;
  for (auto c : corners) mean = mean + c;
  mean = mean / static_cast<double>(corners.size());
  std::sort(corners.begin(), corners.end(), [&](Point2 a, Point2 b) {
    return std::atan2(a.y - mean.y, a.x - mean.x) < std::atan2(b.y - mean.y, b.x - mean.x);
  });
  const auto start = std::min_element(corners.begin(), corners.end(), [](Point2 a, Point2 b) {
    if (std::abs(a.y - b.y) > Tolerances::kGeometricEps) return a.y < b.y;
    return a.x < b.x;
  });
  std::rotate(corners.begin(), start, corners.end());
  try {
    return Polygon2(std::move(corners));
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

std::optional<Line2> observe_and_hypothesize(const PlannerState& state, const SensingOracle& oracle,
                                             const PlannerConfig& cfg) {
  const auto confirmed = state.confirmed_lines();
  const Point2 source = state.current_pose.center;
  const std::uint64_t base = static_cast<std::uint64_t>(state.stop_count) * kMeasurementsPerStop;
  const auto first = sweep_and_rank(oracle, state.current_pose, cfg, confirmed, base);
  if (auto pick = pick_new_wall(first.ranked, source, confirmed, state.origin, cfg)) return pick->line;

  const auto candidates = corner_mitigation_sweep(oracle, state.current_pose, cfg.mitigation_extensions, cfg.sweep,
                                                  confirmed, base + kMeasurementsPerStop / 2);
  const auto ranked = rank_and_prune(candidates, source, confirmed, cfg.cluster_radius, cfg.effective_min_support());
  if (auto pick = pick_new_wall(ranked, source, confirmed, state.origin, cfg)) return pick->line;
  return std::nullopt;
}

StepOutcome advance(const PlannerState& state, const SensingOracle& oracle, const PlannerConfig& cfg) {
  if (state.stop_count > cfg.max_steps) {
    throw MaxStepsExceeded("planner used " + std::to_string(cfg.max_steps) + " stops without closing the room");
  }
  StepOutcome out;
  out.new_state = state;
  PlannerState& next = out.new_state;
  StopRecord& rec = out.record;
  rec.stop = state.stop_count;
  rec.pose = state.current_pose;

  const Point2 source = state.current_pose.center;
  const auto confirmed = state.confirmed_lines();
  const std::uint64_t base = static_cast<std::uint64_t>(state.stop_count) * kMeasurementsPerStop;

  const auto primary = sweep_and_rank(oracle, state.current_pose, cfg, confirmed, base);
  rec.cluster_sizes = sizes_of(primary.ranked);
  rec.candidate_count = primary.candidates;

  // Sweep at each mitigation extension in turn until `accept` finds a cluster.
  auto retry_with_extensions = [&](auto&& accept) -> std::optional<std::pair<Pick, std::vector<ISCluster>>> {
    std::uint64_t ext_base = base + kMeasurementsPerStop / 2;
    for (double ext : cfg.mitigation_extensions) {
      const RigPose extended = RigPose::make(source, state.current_pose.arm_angle, ext);
      auto sweep = sweep_and_rank(oracle, extended, cfg, confirmed, ext_base);
      ext_base += 1000;
      if (auto pick = accept(sweep.ranked)) return std::make_pair(*pick, std::move(sweep.ranked));
    }
    return std::nullopt;
  };

  std::optional<Line2> move_along;
  bool restart = false;

  if (!state.active_hypothesis) {
    auto accept = [&](const std::vector<ISCluster>& ranked) {
      return pick_new_wall(ranked, source, confirmed, state.origin, cfg);
    };
    std::optional<Pick> pick = accept(primary.ranked);
    if (!pick) {
      if (auto retried = retry_with_extensions(accept)) {
        pick = retried->first;
        rec.extension_used = true;
      }
    }
    if (pick) {
      next.active_hypothesis = start_hypothesis(*pick, state.stop_count, source);
      rec.observed_line = pick->line;
      move_along = pick->line;
      out.action = rec.extension_used ? PlannerAction::extension_retry : PlannerAction::parallel_move;
    } else {
      restart = true;
      out.action = PlannerAction::random_restart;
    }
  } else {
    const WallHypothesis& hyp = *state.active_hypothesis;
    auto accept = [&](const std::vector<ISCluster>& ranked) {
      return pick_matching_wall(ranked, source, hyp, state.origin, cfg);
    };
    std::optional<Pick> pick = accept(primary.ranked);
    std::vector<ISCluster> ranked_used = primary.ranked;
    if (!pick) {
      if (auto retried = retry_with_extensions(accept)) {
        pick = retried->first;
        ranked_used = std::move(retried->second);
        rec.extension_used = true;
      }
    }
    if (!pick) {
      next.active_hypothesis.reset();
      restart = true;
      out.action = PlannerAction::random_restart;
    } else {
      rec.observed_line = pick->line;
      WallHypothesis grown = hyp;
      grown.support_stops.push_back(state.stop_count);
      grown.support_points.push_back(source);
      grown.support_lines.push_back(pick->line);
      grown.support_weights.push_back(pick->weight);
      if (grown.support_lines.size() >= 3) {
        grown.line = fuse_lines(grown.support_lines, grown.support_weights);
        grown.status = HypothesisStatus::confirmed;
        next.confirmed_walls.push_back(grown);
        next.active_hypothesis.reset();
        out.action = PlannerAction::wall_confirmed;

        const auto lines = next.confirmed_lines();
        if (auto room = room_closure(lines, next.origin, angle_tol_rad(cfg))) {
          out.action = PlannerAction::room_complete;
          out.room = std::move(room);
          rec.action = out.action;
          rec.confirmed_count = next.confirmed_walls.size();
          return out;
        }
        // Seed the next wall from the remaining clusters of this stop.
        if (auto seed = pick_new_wall(ranked_used, source, lines, next.origin, cfg, pick->index)) {
          next.active_hypothesis = start_hypothesis(*seed, state.stop_count, source);
          move_along = seed->line;
        } else {
          move_along = grown.line;
        }
      } else {
        grown.line = pick->line;
        grown.status = HypothesisStatus::tentative_2;
        next.active_hypothesis = grown;
        move_along = pick->line;
        out.action = rec.extension_used ? PlannerAction::extension_retry : PlannerAction::parallel_move;
      }
    }
  }

  if (move_along) {
    const RigPose proposal = propose_next_stop(next, *move_along, cfg.step_dist);
    // Blocked: take the other way along the same line before giving up.
    const RigPose mirrored = RigPose::make(state.current_pose.center * 2.0 - proposal.center, proposal.arm_angle,
                                           proposal.arm_extension);
    const bool mirrored_is_fresh =
        !next.active_hypothesis ||
        std::none_of(next.active_hypothesis->support_points.begin(), next.active_hypothesis->support_points.end(),
                     [&](Point2 q) { return distance(q, mirrored.center) < cfg.step_dist / 2; });
    if (oracle.can_stand(proposal.center)) {
      next.current_pose = proposal;
    } else if (mirrored_is_fresh && oracle.can_stand(mirrored.center)) {
      next.current_pose = mirrored;
    } else {
      restart = true;
      rec.guard_restart = true;
    }
  }
  if (restart) {
    const Point2 c = random_restart_center(next, oracle, cfg);
    next.current_pose = RigPose::make(c, state.current_pose.arm_angle, cfg.default_extension);
  }
  next.stop_count = state.stop_count + 1;
  if (next.active_hypothesis) rec.hypothesis_status = next.active_hypothesis->status;
  rec.action = out.action;
  rec.confirmed_count = next.confirmed_walls.size();
  return out;
}

PlannerResult run_planner(const SensingOracle& oracle, const PlannerConfig& cfg, std::uint64_t rng_seed,
                          const std::function<void(const StopRecord&)>& on_stop) {
  cfg.validate();
  PlannerState state = initial_state(rng_seed, cfg);
  PlannerResult result{Polygon2::rectangle(1, 1), {}, {}, 0};
  for (;;) {
    StepOutcome step = advance(state, oracle, cfg);
    result.trace.push_back(step.record);
    if (on_stop) on_stop(step.record);
    if (step.action == PlannerAction::room_complete) {
      result.room = std::move(*step.room);
      result.walls = step.new_state.confirmed_walls;
      result.stops = step.record.stop;
      return result;
    }
    state = std::move(step.new_state);
  }
}

}  // namespace echomap
