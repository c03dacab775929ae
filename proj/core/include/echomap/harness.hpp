#pragma once

// Trial orchestration and Monte-Carlo batches over simulated rooms.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "echomap/oracle.hpp"
#include "echomap/planner.hpp"

namespace echomap {

enum class Scenario { fixed_room, random_room };

struct ExperimentConfig {
  Scenario scenario = Scenario::fixed_room;
  std::vector<Point2> room_polygon{{0, 0}, {6, 0}, {6, 5}, {0, 5}};
  double random_min_side = 3.0;  // m
  double random_max_side = 10.0;
  int trials = 100;
  double snr_db = 30.0;  // copied into sim.noise_snr_db; +inf for noiseless
  double beta = 0.9;
  SimConfig sim;
  PeakPickConfig peaks;
  PlannerConfig planner;
  StandLimits limits;
  double start_clearance = 0.3;
  bool random_heading = true;  // rotate the robot frame against the world
  bool exact_toas = false;     // geometric oracle instead of sampled RIRs
  std::uint64_t master_seed = 0;
  int workers = 1;

  /// Throws ConfigError.
  void validate() const;
  /// Sim parameters with snr and the trial seed applied.
  SimConfig sim_for(std::uint64_t trial_seed) const;
};

struct TrialReport {
  int trial = 0;
  bool success = false;
  int steps = 0;
  std::vector<double> wall_errors;           // m, one per true wall when successful
  std::optional<Polygon2> recovered_polygon;  // world frame
  std::vector<StopRecord> trace;
  std::vector<Point2> true_room;
  std::vector<Line2> estimated_walls;  // world frame
  Point2 start;                        // world frame
  double heading = 0.0;
  std::string failure;                 // empty on success
};

struct Histogram {
  double bin_width = 1.0;
  std::vector<std::size_t> counts;  // bin i covers [i * w, (i + 1) * w)
};

struct BatchAggregate {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::size_t wall_error_count = 0;
  double frac_errors_below_1cm = 0.0;
  double error_median = 0.0;
  double error_p90 = 0.0;
  double error_p95 = 0.0;
  double error_max = 0.0;
  double frac_steps_below_100 = 0.0;
  double steps_median = 0.0;
  double steps_p90 = 0.0;
  double steps_mode_center = 0.0;  // centre of the fullest step bin
  Histogram error_hist;            // bins of 0.001 m
  Histogram step_hist;             // bins of 4 stops
};

struct BatchReport {
  std::vector<TrialReport> trials;  // sorted by trial index
  BatchAggregate aggregate;
};

/// Seed for trial `trial_index` derived from the master seed.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index);

/// Ground-truth room for a trial: the fixed polygon or a seeded rectangle.
Room build_room(const ExperimentConfig& cfg, std::uint64_t seed);

/// Per-true-wall error: distance from the true wall's midpoint to the
/// matched estimate, matching greedily by orientation then distance.
/// nullopt when some true wall has no estimate left to match.
std::optional<std::vector<double>> score_walls(const Room& truth, std::span<const Line2> estimated);

/// One trial from a random interior start. Throws ConfigError.
TrialReport run_trial(const ExperimentConfig& cfg, int trial_index);

/// All trials, executed on cfg.workers threads; `on_done` is called (from
/// worker threads, serialised) as trials finish.
BatchReport run_batch(const ExperimentConfig& cfg, const std::function<void(const TrialReport&)>& on_done = {});

BatchAggregate aggregate(std::span<const TrialReport> trials);

inline constexpr const char* kBatchCsvHeader = "trial,success,steps,err_w1,err_w2,err_w3,err_w4";

void write_batch_csv(const std::filesystem::path& path, const BatchReport& report);
void write_aggregate_json(const std::filesystem::path& path, const BatchReport& report, const ExperimentConfig& cfg);
void write_trace_json(const std::filesystem::path& path, const TrialReport& trial);
/// batch.csv, aggregate.json and, optionally, traces/trial_NNNN.json.
void write_batch_outputs(const std::filesystem::path& out_dir, const BatchReport& report,
                         const ExperimentConfig& cfg, bool with_traces);

}  // namespace echomap
