#include "echomap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "echomap/config_io.hpp"
#include "echomap/errors.hpp"
#include "json.hpp"

namespace echomap {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(random_min_side > 0.0 && random_min_side <= random_max_side)) {
    throw ConfigError("random room side range must satisfy 0 < min <= max");
  }
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  if (!(start_clearance >= 0.0)) throw ConfigError("start_clearance must be >= 0");
  if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
  if (scenario == Scenario::fixed_room) {
    try {
      Polygon2 check(room_polygon);
    } catch (const DegenerateInput& e) {
      throw ConfigError(std::string("fixed room polygon invalid: ") + e.what());
    }
  }
  sim.validate();
  peaks.validate();
  planner.validate();
}

SimConfig ExperimentConfig::sim_for(std::uint64_t seed) const {
  SimConfig s = sim;
  s.noise_snr_db = snr_db;
  s.rng_seed = seed;
  return s;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

Room build_room(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.scenario == Scenario::fixed_room) return Room(Polygon2(cfg.room_polygon), cfg.beta);
  std::mt19937_64 rng(mix_seed(seed, 11));
  std::uniform_real_distribution<double> side(cfg.random_min_side, cfg.random_max_side);
  const double w = side(rng);
  const double h = side(rng);
  return Room(Polygon2::rectangle(w, h), cfg.beta);
}

std::optional<std::vector<double>> score_walls(const Room& truth, std::span<const Line2> estimated) {
  const auto& walls = truth.walls();
  struct Pair {
    std::size_t wall;
    std::size_t est;
    bool aligned;
    double dist;
  };
  constexpr double kAlignedTol = 5.0 * std::numbers::pi / 180.0;
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const Line2 tl = walls[i].segment.line();
    for (std::size_t j = 0; j < estimated.size(); ++j) {
      double d_angle = std::abs(tl.angle() - estimated[j].angle());
      d_angle = std::min(d_angle, std::numbers::pi - d_angle);
      pairs.push_back({i, j, d_angle <= kAlignedTol, point_line_distance(walls[i].segment.midpoint(), estimated[j])});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.aligned != b.aligned) return a.aligned;
    if (a.dist != b.dist) return a.dist < b.dist;
    return std::tie(a.wall, a.est) < std::tie(b.wall, b.est);
  });
  std::vector<std::optional<double>> err(walls.size());
  std::vector<bool> used(estimated.size(), false);
  for (const auto& p : pairs) {
    if (err[p.wall] || used[p.est]) continue;
    err[p.wall] = p.dist;
    used[p.est] = true;
  }
  std::vector<double> out;
  for (const auto& e : err) {
    if (!e) return std::nullopt;
    out.push_back(*e);
  }
  return out;
}

namespace {

Point2 draw_start(const Room& room, double clearance, std::mt19937_64& rng) {
  const auto verts = room.polygon().vertices();
  double x0 = verts[0].x, x1 = verts[0].x, y0 = verts[0].y, y1 = verts[0].y;
  for (auto v : verts) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  std::uniform_real_distribution<double> ux(x0, x1);
  std::uniform_real_distribution<double> uy(y0, y1);
  for (int i = 0; i < 100000; ++i) {
    const Point2 p{ux(rng), uy(rng)};
    if (polygon_contains(room.polygon(), p) && distance_to_boundary(room.polygon(), p) >= clearance) return p;
  }
  throw ConfigError("room too small for the requested start clearance");
}

}  // namespace

TrialReport run_trial(const ExperimentConfig& cfg, int trial_index) {
  cfg.validate();
  const std::uint64_t seed = trial_seed(cfg.master_seed, trial_index);
  const Room room = build_room(cfg, seed);

  std::mt19937_64 rng(mix_seed(seed, 12));
  TrialReport report;
  report.trial = trial_index;
  report.true_room.assign(room.polygon().vertices().begin(), room.polygon().vertices().end());
  report.start = draw_start(room, cfg.start_clearance, rng);
  report.heading = cfg.random_heading ? std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng) : 0.0;
  const FrameTransform frame{report.start, report.heading};

  std::unique_ptr<SensingOracle> oracle;
  if (cfg.exact_toas) {
    oracle = std::make_unique<GeometricSensingOracle>(room, cfg.sim_for(mix_seed(seed, 1)), frame, cfg.limits);
  } else {
    oracle = std::make_unique<RirSensingOracle>(room, cfg.sim_for(mix_seed(seed, 1)), cfg.peaks, frame, cfg.limits);
  }

  PlannerState state = initial_state(mix_seed(seed, 2), cfg.planner);
  try {
    for (;;) {
      StepOutcome step = advance(state, *oracle, cfg.planner);
      report.trace.push_back(step.record);
      if (step.action == PlannerAction::room_complete) {
        report.steps = step.record.stop;
        std::vector<Point2> world;
        for (auto v : step.room->vertices()) world.push_back(frame.to_world(v));
        report.recovered_polygon = Polygon2(std::move(world));
        for (const auto& w : step.new_state.confirmed_walls) report.estimated_walls.push_back(frame.line_to_world(w.line));
        break;
      }
      state = std::move(step.new_state);
    }
  } catch (const MaxStepsExceeded& e) {
    report.steps = static_cast<int>(report.trace.size());
    report.failure = e.what();
    for (const auto& w : state.confirmed_walls) report.estimated_walls.push_back(frame.line_to_world(w.line));
    return report;
  }

  if (report.recovered_polygon->size() != room.walls().size()) {
    report.failure = "recovered polygon has " + std::to_string(report.recovered_polygon->size()) + " walls, expected " +
                     std::to_string(room.walls().size());
    return report;
  }
  auto errors = score_walls(room, report.estimated_walls);
  if (!errors) {
    report.failure = "could not match every true wall";
    return report;
  }
  report.wall_errors = std::move(*errors);
  report.success = true;
  return report;
}

BatchReport run_batch(const ExperimentConfig& cfg, const std::function<void(const TrialReport&)>& on_done) {
  cfg.validate();
  BatchReport report;
  report.trials.resize(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  std::mutex done_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        report.trials[static_cast<std::size_t>(i)] = run_trial(cfg, i);
        if (on_done) {
          std::lock_guard lock(done_mutex);
          on_done(report.trials[static_cast<std::size_t>(i)]);
        }
      } catch (...) {
        std::lock_guard lock(done_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cfg.trials);
        return;
      }
    }
  };

  const int n_workers = std::min(cfg.workers, cfg.trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  report.aggregate = aggregate(report.trials);
  return report;
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

Histogram histogram(const std::vector<double>& values, double width) {
  Histogram h;
  h.bin_width = width;
  for (double v : values) {
    const auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(v / width)));
    if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
  }
  return h;
}

}  // namespace

BatchAggregate aggregate(std::span<const TrialReport> trials) {
  BatchAggregate a;
  a.trials = trials.size();
  std::vector<double> errors;
  std::vector<double> steps;
  for (const auto& t : trials) {
    if (t.success) ++a.successes;
    errors.insert(errors.end(), t.wall_errors.begin(), t.wall_errors.end());
    steps.push_back(static_cast<double>(t.steps));
  }
  a.success_rate = a.trials ? static_cast<double>(a.successes) / static_cast<double>(a.trials) : 0.0;
  a.wall_error_count = errors.size();
  if (!errors.empty()) {
    const auto below = std::count_if(errors.begin(), errors.end(), [](double e) { return e < 0.01; });
    a.frac_errors_below_1cm = static_cast<double>(below) / static_cast<double>(errors.size());
    a.error_median = quantile(errors, 0.5);
    a.error_p90 = quantile(errors, 0.9);
    a.error_p95 = quantile(errors, 0.95);
    a.error_max = *std::max_element(errors.begin(), errors.end());
  }
  if (!steps.empty()) {
    const auto below = std::count_if(steps.begin(), steps.end(), [](double s) { return s < 100.0; });
    a.frac_steps_below_100 = static_cast<double>(below) / static_cast<double>(steps.size());
    a.steps_median = quantile(steps, 0.5);
    a.steps_p90 = quantile(steps, 0.9);
  }
  a.error_hist = histogram(errors, 0.001);
  a.step_hist = histogram(steps, 4.0);
  if (!a.step_hist.counts.empty()) {
    const auto mode = std::max_element(a.step_hist.counts.begin(), a.step_hist.counts.end());
    const auto bin = static_cast<double>(std::distance(a.step_hist.counts.begin(), mode));
    a.steps_mode_center = (bin + 0.5) * a.step_hist.bin_width;
  }
  return a;
}

void write_batch_csv(const std::filesystem::path& path, const BatchReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << kBatchCsvHeader << '\n';
  char buf[64];
  for (const auto& t : report.trials) {
    out << t.trial << ',' << (t.success ? 1 : 0) << ',' << t.steps;
    for (std::size_t w = 0; w < 4; ++w) {
      if (w < t.wall_errors.size()) {
        std::snprintf(buf, sizeof buf, "%.6f", t.wall_errors[w]);
        out << ',' << buf;
      } else {
        out << ",nan";
      }
    }
    out << '\n';
  }
}

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json line_json(const Line2& l) {
  return json{{"normal", point_json(l.normal())}, {"offset", l.offset()}};
}

json histogram_json(const Histogram& h) { return json{{"bin_width", h.bin_width}, {"counts", h.counts}}; }

}  // namespace

void write_aggregate_json(const std::filesystem::path& path, const BatchReport& report, const ExperimentConfig& cfg) {
  const auto& a = report.aggregate;
  json j;
  j["config"] = json::parse(config_echo(cfg));
  j["aggregate"] = {
      {"trials", a.trials},
      {"successes", a.successes},
      {"success_rate", a.success_rate},
      {"wall_error_count", a.wall_error_count},
      {"frac_errors_below_1cm", a.frac_errors_below_1cm},
      {"error_median_m", a.error_median},
      {"error_p90_m", a.error_p90},
      {"error_p95_m", a.error_p95},
      {"error_max_m", a.error_max},
      {"frac_steps_below_100", a.frac_steps_below_100},
      {"steps_median", a.steps_median},
      {"steps_p90", a.steps_p90},
      {"steps_mode_center", a.steps_mode_center},
      {"error_histogram", histogram_json(a.error_hist)},
      {"step_histogram", histogram_json(a.step_hist)},
  };
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void write_trace_json(const std::filesystem::path& path, const TrialReport& trial) {
  json j;
  j["trial"] = trial.trial;
  j["success"] = trial.success;
  j["steps"] = trial.steps;
  j["failure"] = trial.failure;
  j["start"] = point_json(trial.start);
  j["heading"] = trial.heading;
  j["wall_errors"] = trial.wall_errors;
  j["true_room"] = json::array();
  for (auto p : trial.true_room) j["true_room"].push_back(point_json(p));
  j["estimated_walls"] = json::array();
  for (const auto& l : trial.estimated_walls) j["estimated_walls"].push_back(line_json(l));
  j["recovered_polygon"] = json::array();
  if (trial.recovered_polygon) {
    for (auto p : trial.recovered_polygon->vertices()) j["recovered_polygon"].push_back(point_json(p));
  }
  const FrameTransform frame{trial.start, trial.heading};
  j["stops"] = json::array();
  for (const auto& r : trial.trace) {
    json s{{"stop", r.stop},
           {"center", point_json(r.pose.center)},
           {"center_world", point_json(frame.to_world(r.pose.center))},
           {"arm_extension", r.pose.arm_extension},
           {"action", std::string(to_string(r.action))},
           {"cluster_sizes", r.cluster_sizes},
           {"candidates", r.candidate_count},
           {"extension_used", r.extension_used},
           {"guard_restart", r.guard_restart},
           {"confirmed", r.confirmed_count}};
    if (r.observed_line) {
      s["hypothesis"] = {{"angle", r.observed_line->angle()}, {"offset", r.observed_line->offset()}};
    }
    if (r.hypothesis_status) s["status"] = std::string(to_string(*r.hypothesis_status));
    j["stops"].push_back(std::move(s));
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void write_batch_outputs(const std::filesystem::path& out_dir, const BatchReport& report,
                         const ExperimentConfig& cfg, bool with_traces) {
  std::filesystem::create_directories(out_dir);
  write_batch_csv(out_dir / "batch.csv", report);
  write_aggregate_json(out_dir / "aggregate.json", report, cfg);
  if (with_traces) {
    std::filesystem::create_directories(out_dir / "traces");
    char name[64];
    for (const auto& t : report.trials) {
      std::snprintf(name, sizeof name, "trial_%04d.json", t.trial);
      write_trace_json(out_dir / "traces" / name, t);
    }
  }
}

}  // namespace echomap
