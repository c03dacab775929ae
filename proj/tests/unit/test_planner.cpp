#include <cmath>
#include <numbers>

#include "doctest.h"
#include "echomap/errors.hpp"
#include "echomap/oracle.hpp"
#include "echomap/planner.hpp"
#include "oracles.hpp"

using namespace echomap;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Line2 vertical(double x) { return Line2::from_normal_offset({1, 0}, x); }
Line2 horizontal(double y) { return Line2::from_normal_offset({0, 1}, y); }

SimConfig exact_sim() {
  SimConfig s;
  s.noise_snr_db = SimConfig::kNoiseless;
  return s;
}

WallHypothesis confirmed(const Line2& l) {
  WallHypothesis h;
  h.line = l;
  h.status = HypothesisStatus::confirmed;
  return h;
}

PlannerState state_at(Point2 c) {
  PlannerState s = initial_state(1);
  s.current_pose = RigPose::make(c, 0, 0.4);
  return s;
}

}  // namespace

TEST_CASE("walls_approximate examples") {
  CHECK(walls_approximate(vertical(-2.0), vertical(-2.004), {0, 0}, 2 * kDeg, 0.05));
  CHECK_FALSE(walls_approximate(vertical(-2), vertical(2), {0, 0}, 2 * kDeg, 0.05));
  CHECK_FALSE(walls_approximate(vertical(-2), horizontal(-2), {0, 0}, 2 * kDeg, 0.05));
  CHECK_FALSE(walls_approximate(vertical(-2), vertical(-2.3), {0, 0}, 2 * kDeg, 0.05));
}

TEST_CASE("walls_approximate is symmetric and reflexive") {
  oracle::Gen g(61);
  for (int i = 0; i < 5000; ++i) {
    const double a = g.uniform(0, 2 * std::numbers::pi);
    const Line2 l1 = Line2::from_normal_offset({std::cos(a), std::sin(a)}, g.uniform(0.1, 6));
    const double b = a + g.uniform(-0.1, 0.1);
    const Line2 l2 = Line2::from_normal_offset({std::cos(b), std::sin(b)}, l1.offset() * g.uniform(0.9, 1.1));
    CHECK(walls_approximate(l1, l1, {0, 0}, 3 * kDeg, 0.05));
    CHECK(walls_approximate(l1, l2, {0, 0}, 3 * kDeg, 0.05) == walls_approximate(l2, l1, {0, 0}, 3 * kDeg, 0.05));
  }
}

TEST_CASE("next stop prefers the side away from examined walls") {
  PlannerState s = state_at({0, 0});
  s.confirmed_walls.push_back(confirmed(horizontal(-1)));
  const RigPose next = propose_next_stop(s, vertical(-2), 0.5);
  CHECK(distance(next.center, {0, 0.5}) <= 1e-12);

  PlannerState on_wall = state_at({0, 0});
  on_wall.confirmed_walls.push_back(confirmed(horizontal(0)));
  CHECK(distance(propose_next_stop(on_wall, vertical(-2), 0.5).center, {0, 0.5}) <= 1e-12);
}

TEST_CASE("next stop without examined walls follows the tangent") {
  const PlannerState s = state_at({1, 1});
  const Line2 hyp = vertical(-2);
  const RigPose next = propose_next_stop(s, hyp, 0.5);
  CHECK(distance(next.center, Point2{1, 1} + hyp.tangent() * 0.5) <= 1e-12);
}

TEST_CASE("next stop moves parallel and within the step bound") {
  const PlannerState s = state_at({2, 2});
  const RigPose next = propose_next_stop(s, horizontal(5), 0.5);
  CHECK(std::abs(next.center.y - 2) <= 1e-12);
  CHECK(std::abs(std::abs(next.center.x - 2) - 0.5) <= 1e-12);

  oracle::Gen g(62);
  for (int i = 0; i < 1000; ++i) {
    PlannerState r = state_at({g.uniform(-3, 3), g.uniform(-3, 3)});
    const double a = g.uniform(0, 6.3);
    const Line2 l = Line2::from_normal_offset({std::cos(a), std::sin(a)}, g.uniform(0, 5));
    const double step = g.uniform(0.05, 0.5);
    const RigPose n = propose_next_stop(r, l, step);
    CHECK(distance(n.center, r.current_pose.center) == doctest::Approx(step));
    CHECK(std::abs(dot(n.center - r.current_pose.center, l.normal())) <= 1e-12);
  }
}

TEST_CASE("next stop moves away from earlier support") {
  PlannerState s = state_at({0, 0});
  WallHypothesis h;
  h.line = vertical(-2);
  h.support_stops = {1};
  h.support_points = {{0, -0.5}};
  s.active_hypothesis = h;
  CHECK(distance(propose_next_stop(s, vertical(-2), 0.5).center, {0, 0.5}) <= 1e-12);
  s.active_hypothesis->support_points = {{0, 0.5}};
  CHECK(distance(propose_next_stop(s, vertical(-2), 0.5).center, {0, -0.5}) <= 1e-12);
}

TEST_CASE("room closure examples") {
  const std::vector<Line2> rect{vertical(0), vertical(6), horizontal(0), horizontal(5)};
  const auto room = room_closure(rect, {3, 2.5});
  REQUIRE(room);
  const std::vector<Point2> want{{0, 0}, {6, 0}, {6, 5}, {0, 5}};
  REQUIRE(room->size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(distance(room->vertices()[i], want[i]) <= 1e-9);

  const std::vector<Line2> open{vertical(0), vertical(6), horizontal(0)};
  CHECK_FALSE(room_closure(open, {3, 2.5}));

  const std::vector<Line2> tri{horizontal(-1), Line2::through({-3, -1}, {0, 3}), Line2::through({0, 3}, {3, -1})};
  const auto t = room_closure(tri, {0, 0});
  REQUIRE(t);
  CHECK(t->size() == 3);
  CHECK(t->signed_area() > 0);
}

TEST_CASE("near-parallel pair does not close a room") {
  const double tilt = 0.5 * kDeg;
  const std::vector<Line2> sliver{vertical(6), horizontal(0),
                                  Line2::from_normal_offset({-std::sin(tilt), std::cos(tilt)}, 5)};
  CHECK_FALSE(room_closure(sliver, {3, 2.5}));
  CHECK(room_closure(sliver, {3, 2.5}, 0.0));
}

TEST_CASE("closure is monotone") {
  oracle::Gen g(63);
  for (int trial = 0; trial < 300; ++trial) {
    const double w = g.uniform(2, 10), h = g.uniform(2, 10);
    const Point2 origin{g.uniform(0.2, w - 0.2), g.uniform(0.2, h - 0.2)};
    std::vector<Line2> lines{vertical(0), vertical(w), horizontal(0), horizontal(h)};
    REQUIRE(room_closure(lines, origin));
    const int extra = g.integer(1, 4);
    for (int i = 0; i < extra; ++i) {
      const double a = g.uniform(0, 6.3);
      const Point2 n{std::cos(a), std::sin(a)};
      // Keep the origin strictly on one side.
      const double c = dot(n, origin) + (g.uniform(0, 1) < 0.5 ? -1 : 1) * g.uniform(0.05, 6);
      lines.push_back(Line2::from_normal_offset(n, c));
      CHECK(room_closure(lines, origin));
    }
  }
}

TEST_CASE("line through the origin gives no room") {
  const std::vector<Line2> lines{vertical(0), vertical(6), horizontal(-1), horizontal(5)};
  CHECK_FALSE(room_closure(lines, {0, 0}));
}

TEST_CASE("fuse_lines") {
  const std::vector<Line2> same{vertical(2), vertical(2), vertical(2)};
  const std::vector<double> w{1, 2, 3};
  CHECK(fuse_lines(same, w).approx_equal(vertical(2)));
  const std::vector<Line2> spread{vertical(2), vertical(2.3)};
  const std::vector<double> w2{3, 1};
  CHECK(fuse_lines(spread, w2).offset() == doctest::Approx(2.075));
  CHECK_THROWS_AS(fuse_lines(spread, w), DegenerateInput);
}

TEST_CASE("planner config is validated") {
  PlannerConfig cfg;
  cfg.step_dist = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.mitigation_extensions = {0.4, 0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  CHECK(cfg.effective_min_support() == 9);
}

TEST_CASE("observe at an interior stop returns a true wall") {
  const Room room(Polygon2::rectangle(6, 5, {-2, -2.2}));
  const GeometricSensingOracle oracle(room, exact_sim());
  const auto line = observe_and_hypothesize(initial_state(0), oracle);
  REQUIRE(line);
  // Nearest wall of the ties wins: x = -2.
  CHECK(line->approx_equal(vertical(-2), 1e-6));
  const SilentOracle silent;
  CHECK_FALSE(observe_and_hypothesize(initial_state(0), silent));
}

TEST_CASE("silent world runs out of stops") {
  const SilentOracle silent;
  PlannerConfig cfg;
  cfg.max_steps = 12;
  CHECK_THROWS_AS(run_planner(silent, cfg, 3), MaxStepsExceeded);
}

TEST_CASE("noiseless room from its centre") {
  const Room room(Polygon2::rectangle(6, 5));
  const FrameTransform frame{{3, 2.5}, 0.0};
  const GeometricSensingOracle oracle(room, exact_sim(), frame);
  const PlannerResult result = run_planner(oracle, PlannerConfig{}, 7);
  REQUIRE(result.walls.size() == 4);
  const std::vector<Line2> truth = room.wall_lines();
  for (const auto& w : result.walls) {
    const Line2 world = frame.line_to_world(w.line);
    const bool matched = std::any_of(truth.begin(), truth.end(), [&](const Line2& t) { return t.approx_equal(world, 1e-6); });
    CHECK(matched);
  }
  CHECK(result.room.size() == 4);
}

TEST_CASE("trace invariants on a noiseless run") {
  const Room room(Polygon2::rectangle(7, 4));
  const FrameTransform frame{{1.1, 0.9}, 0.4};
  const GeometricSensingOracle oracle(room, exact_sim(), frame);
  const PlannerResult result = run_planner(oracle, PlannerConfig{}, 11);
  std::size_t last_confirmed = 0;
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& r = result.trace[i];
    CHECK(r.stop == static_cast<int>(i) + 1);
    CHECK(r.confirmed_count >= last_confirmed);
    last_confirmed = r.confirmed_count;
    if (i > 0) {
      const auto& prev = result.trace[i - 1];
      const bool moved_parallel = prev.action != PlannerAction::random_restart && !prev.guard_restart;
      if (moved_parallel) CHECK(distance(r.pose.center, prev.pose.center) <= 0.5 + 1e-12);
    }
  }
  for (const auto& w : result.walls) {
    CHECK(w.status == HypothesisStatus::confirmed);
    REQUIRE(w.support_lines.size() >= 3);
    std::vector<int> stops = w.support_stops;
    std::sort(stops.begin(), stops.end());
    CHECK(std::unique(stops.begin(), stops.end()) == stops.end());
    for (std::size_t a = 0; a < w.support_lines.size(); ++a) {
      for (std::size_t b = a + 1; b < w.support_lines.size(); ++b) {
        CHECK(walls_approximate(w.support_lines[a], w.support_lines[b], {0, 0}, 3 * kDeg, 0.05));
      }
    }
  }
}
