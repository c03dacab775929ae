// Command-line front end: single trials, Monte-Carlo batches, raw RIR dumps
// and the corner demonstration.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "echomap/config_io.hpp"
#include "echomap/errors.hpp"
#include "echomap/harness.hpp"

namespace fs = std::filesystem;
using namespace echomap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfrastructure = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> snr_db;
  std::string out_dir = "echomap_out";
  std::optional<std::string> scenario;
  std::optional<int> workers;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON experiment config");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--snr-db", f.snr_db, "noise level in dB, or 'inf'");
  app->add_option("--out-dir", f.out_dir, "output directory");
  app->add_option("--scenario", f.scenario, "fixed | random");
  app->add_option("--workers", f.workers, "worker threads");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_experiment_config(f.config_path);
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.workers) cfg.workers = *f.workers;
  if (f.snr_db) {
    if (*f.snr_db == "inf" || *f.snr_db == "noiseless") {
      cfg.snr_db = SimConfig::kNoiseless;
    } else {
      try {
        cfg.snr_db = std::stod(*f.snr_db);
      } catch (const std::exception&) {
        throw ConfigError("--snr-db expects a number or 'inf'");
      }
    }
  }
  if (f.scenario) {
    if (*f.scenario == "fixed") {
      cfg.scenario = Scenario::fixed_room;
    } else if (*f.scenario == "random") {
      cfg.scenario = Scenario::random_room;
    } else {
      throw ConfigError("--scenario must be 'fixed' or 'random'");
    }
  }
  cfg.validate();
  return cfg;
}

void print_trial(const TrialReport& r, bool verbose) {
  const FrameTransform frame{r.start, r.heading};
  if (verbose) {
    std::printf("start (%.3f, %.3f) heading %.3f rad\n", r.start.x, r.start.y, r.heading);
    for (const auto& s : r.trace) {
      const Point2 c = frame.to_world(s.pose.center);
      std::printf("stop %3d  (%7.3f, %7.3f)  %-15s clusters=%zu candidates=%zu", s.stop, c.x, c.y,
                  std::string(to_string(s.action)).c_str(), s.cluster_sizes.size(), s.candidate_count);
      if (s.observed_line) {
        const Line2 w = frame.line_to_world(*s.observed_line);
        std::printf("  wall n=(%.4f, %.4f) c=%.4f", w.normal().x, w.normal().y, w.offset());
      }
      if (s.extension_used) std::printf("  [extension]");
      if (s.guard_restart) std::printf("  [guard]");
      std::printf("\n");
    }
  }
  std::printf("trial %d: %s after %d stops", r.trial, r.success ? "success" : "failure", r.steps);
  if (!r.success) std::printf(" (%s)", r.failure.c_str());
  std::printf("\n");
  for (std::size_t i = 0; i < r.wall_errors.size(); ++i) std::printf("  wall %zu error %.6f m\n", i + 1, r.wall_errors[i]);
}

int cmd_simulate(const CommonFlags& f, int trial_index, bool write_trace) {
  const ExperimentConfig cfg = resolve(f);
  const TrialReport r = run_trial(cfg, trial_index);
  print_trial(r, true);
  if (write_trace) {
    fs::create_directories(f.out_dir);
    write_trace_json(fs::path(f.out_dir) / "trace.json", r);
  }
  return kExitOk;
}

int cmd_batch(const CommonFlags& f, bool traces, bool full) {
  ExperimentConfig cfg = resolve(f);
  if (full) cfg.trials = 1000;
  std::size_t done = 0;
  const BatchReport report = run_batch(cfg, [&](const TrialReport& r) {
    ++done;
    std::fprintf(stderr, "\r%zu/%d trials (last: #%d %s)", done, cfg.trials, r.trial, r.success ? "ok" : "failed");
  });
  std::fprintf(stderr, "\n");
  write_batch_outputs(f.out_dir, report, cfg, traces);
  const auto& a = report.aggregate;
  std::printf("trials %zu  success %.3f\n", a.trials, a.success_rate);
  std::printf("wall errors: median %.5f m  p95 %.5f m  max %.5f m  below 1 cm %.3f\n", a.error_median, a.error_p95,
              a.error_max, a.frac_errors_below_1cm);
  std::printf("stops: median %.1f  p90 %.1f  mode bin centre %.1f  below 100 %.3f\n", a.steps_median, a.steps_p90,
              a.steps_mode_center, a.frac_steps_below_100);
  std::printf("wrote %s\n", (fs::path(f.out_dir) / "batch.csv").string().c_str());
  return kExitOk;
}

int cmd_rir_dump(const CommonFlags& f, Point2 center, double angle_deg, double extension) {
  const ExperimentConfig cfg = resolve(f);
  const std::uint64_t seed = trial_seed(cfg.master_seed, 0);
  const Room room = build_room(cfg, seed);
  const RigPose pose = RigPose::make(center, angle_deg * std::numbers::pi / 180.0, extension);
  const SimConfig sim = cfg.sim_for(seed);
  fs::create_directories(f.out_dir);
  const auto mics = mic_positions(pose);
  for (int k = 0; k < kMicCount; ++k) {
    const Rir rir = synthesize_rir(room, center, mics[k], sim, k + 1);
    const fs::path out = fs::path(f.out_dir) / ("rir_mic" + std::to_string(k + 1) + ".txt");
    write_rir_dump(out, rir);
    const auto echoes = extract_toas(rir, cfg.peaks);
    std::printf("mic %d at (%.3f, %.3f): %zu samples, %zu peaks -> %s\n", k + 1, mics[k].x, mics[k].y,
                rir.samples.size(), echoes.size(), out.string().c_str());
  }
  return kExitOk;
}

int cmd_demo_corner(const CommonFlags& f, double clearance) {
  const ExperimentConfig cfg = resolve(f);
  // Source at the origin, walls at x = -clearance and y = -clearance.
  const Room room(Polygon2::rectangle(6.0, 5.0, {-clearance, -clearance}), cfg.beta);
  const SimConfig sim = cfg.sim_for(trial_seed(cfg.master_seed, 0));
  const RirSensingOracle oracle(room, sim, cfg.peaks, {}, cfg.limits);
  const Point2 source{0.0, 0.0};
  const auto orientations = orientation_count(cfg.planner.sweep.delta_deg);
  const std::size_t min_support = cfg.planner.min_support > 0 ? cfg.planner.min_support : default_min_support(orientations);

  std::printf("source (0, 0), corner walls at x = %.2f and y = %.2f\n", -clearance, -clearance);
  std::printf("first image sources: (%.2f, 0), (0, %.2f); corner image (%.2f, %.2f)\n", -2 * clearance,
              -2 * clearance, -2 * clearance, -2 * clearance);
  std::uint64_t base = 0;
  for (double ext : {0.5, 0.35, 0.2, 0.1}) {
    const RigPose pose = RigPose::make(source, 0.0, ext);
    const auto candidates = rotation_sweep(oracle, pose, cfg.planner.sweep, {}, base);
    base += 1000;
    const auto ranked =
        rank_clusters(cluster_candidates(candidates, cfg.planner.cluster_radius), source, min_support);
    std::printf("extension %.2f m: %zu candidates, %zu clusters", ext, candidates.size(), ranked.size());
    if (ranked.empty()) {
      std::printf(", no qualifying cluster\n");
      continue;
    }
    std::printf("\n");
    for (std::size_t i = 0; i < ranked.size() && i < 4; ++i) {
      std::printf("  #%zu size %3zu at (%.3f, %.3f)\n", i + 1, ranked[i].size, ranked[i].centroid.x,
                  ranked[i].centroid.y);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room shape recovery by a robot carrying a source and four microphones"};
  app.require_subcommand(1);

  CommonFlags sim_flags, batch_flags, dump_flags, corner_flags;

  auto* simulate = app.add_subcommand("simulate", "run one trial and print its stop-by-stop trace");
  add_common(simulate, sim_flags);
  int trial_index = 0;
  bool write_trace = false;
  simulate->add_option("--trial", trial_index, "trial index under the master seed");
  simulate->add_flag("--trace", write_trace, "also write trace.json into --out-dir");

  auto* batch = app.add_subcommand("batch", "Monte-Carlo batch; writes batch.csv and aggregate.json");
  add_common(batch, batch_flags);
  bool traces = false;
  bool full = false;
  batch->add_flag("--traces", traces, "write per-trial trace JSON");
  batch->add_flag("--full", full, "1000 trials");

  auto* dump = app.add_subcommand("rir-dump", "write the four impulse responses for one static pose");
  add_common(dump, dump_flags);
  double px = 3.0, py = 2.5, angle_deg = 0.0, extension = 0.4;
  dump->add_option("--x", px, "rig centre x (m)");
  dump->add_option("--y", py, "rig centre y (m)");
  dump->add_option("--angle-deg", angle_deg, "arm angle (deg)");
  dump->add_option("--extension", extension, "arm extension (m)");

  auto* corner = app.add_subcommand("demo-corner", "sweep near a corner at shrinking arm extensions");
  add_common(corner, corner_flags);
  double clearance = 1.0;
  corner->add_option("--clearance", clearance, "distance from the source to both corner walls (m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_flags, trial_index, write_trace);
    if (*batch) return cmd_batch(batch_flags, traces, full);
    if (*dump) return cmd_rir_dump(dump_flags, {px, py}, angle_deg, extension);
    if (*corner) return cmd_demo_corner(corner_flags, clearance);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfrastructure;
  }
  return kExitOk;
}
