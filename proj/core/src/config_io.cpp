#include "echomap/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "echomap/errors.hpp"
#include "json.hpp"

namespace echomap {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

// Accepts a number or the string "inf".
void read_db(const json& obj, const char* key, double& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "noiseless")) {
    out = std::numeric_limits<double>::infinity();
  } else if (v.is_number()) {
    out = v.get<double>();
  } else {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

json db_json(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root,
                 {"scenario", "room", "random_side_range", "trials", "snr_db", "beta", "master_seed", "workers",
                  "start_clearance", "random_heading", "exact_toas", "sim", "peaks", "locate", "planner", "limits"},
                 "config");
  ExperimentConfig cfg;
  if (root.contains("scenario")) {
    const auto s = root.at("scenario").is_string() ? root.at("scenario").get<std::string>() : std::string{};
    if (s == "fixed" || s == "fixed_room") {
      cfg.scenario = Scenario::fixed_room;
    } else if (s == "random" || s == "random_room") {
      cfg.scenario = Scenario::random_room;
    } else {
      throw ConfigError("scenario must be 'fixed' or 'random'");
    }
  }
  if (root.contains("room")) {
    std::vector<std::array<double, 2>> pts;
    read(root, "room", pts, "config");
    cfg.room_polygon.clear();
    for (auto [x, y] : pts) cfg.room_polygon.push_back({x, y});
  }
  if (root.contains("random_side_range")) {
    std::array<double, 2> r{};
    read(root, "random_side_range", r, "config");
    cfg.random_min_side = r[0];
    cfg.random_max_side = r[1];
  }
  read(root, "trials", cfg.trials, "config");
  read_db(root, "snr_db", cfg.snr_db, "config");
  read(root, "beta", cfg.beta, "config");
  read(root, "master_seed", cfg.master_seed, "config");
  read(root, "workers", cfg.workers, "config");
  read(root, "start_clearance", cfg.start_clearance, "config");
  read(root, "random_heading", cfg.random_heading, "config");
  read(root, "exact_toas", cfg.exact_toas, "config");

  if (root.contains("sim")) {
    const auto& s = root.at("sim");
    reject_unknown(s, {"speed_of_sound", "sample_rate", "rt60", "max_order", "distance_floor"}, "sim");
    read(s, "speed_of_sound", cfg.sim.speed_of_sound, "sim");
    read(s, "sample_rate", cfg.sim.sample_rate, "sim");
    read(s, "rt60", cfg.sim.rt60, "sim");
    read(s, "max_order", cfg.sim.max_order, "sim");
    read(s, "distance_floor", cfg.sim.distance_floor, "sim");
  }
  if (root.contains("peaks")) {
    const auto& p = root.at("peaks");
    reject_unknown(p, {"rel_threshold", "min_separation", "max_peaks"}, "peaks");
    read(p, "rel_threshold", cfg.peaks.rel_threshold, "peaks");
    read(p, "min_separation", cfg.peaks.min_separation, "peaks");
    read(p, "max_peaks", cfg.peaks.max_peaks, "peaks");
  }
  auto& loc = cfg.planner.sweep.locate;
  if (root.contains("locate")) {
    const auto& l = root.at("locate");
    reject_unknown(l,
                   {"match_radius", "max_echoes_per_mic", "direct_path_tolerance_samples", "dedupe_radius",
                    "refine_ranges"},
                   "locate");
    read(l, "match_radius", loc.match_radius, "locate");
    read(l, "max_echoes_per_mic", loc.max_echoes_per_mic, "locate");
    read(l, "direct_path_tolerance_samples", loc.direct_path_tolerance_samples, "locate");
    read(l, "dedupe_radius", loc.dedupe_radius, "locate");
    read(l, "refine_ranges", loc.refine_ranges, "locate");
  }
  if (root.contains("planner")) {
    const auto& p = root.at("planner");
    reject_unknown(p,
                   {"angle_tol_deg", "mag_tol", "step_dist", "default_extension", "mitigation_extensions",
                    "cluster_radius", "min_support", "max_steps", "restart_radius", "sweep_delta_deg"},
                   "planner");
    auto& pl = cfg.planner;
    read(p, "angle_tol_deg", pl.angle_tol_deg, "planner");
    read(p, "mag_tol", pl.mag_tol, "planner");
    read(p, "step_dist", pl.step_dist, "planner");
    read(p, "default_extension", pl.default_extension, "planner");
    read(p, "mitigation_extensions", pl.mitigation_extensions, "planner");
    read(p, "cluster_radius", pl.cluster_radius, "planner");
    read(p, "min_support", pl.min_support, "planner");
    read(p, "max_steps", pl.max_steps, "planner");
    read(p, "restart_radius", pl.restart_radius, "planner");
    read(p, "sweep_delta_deg", pl.sweep.delta_deg, "planner");
  }
  if (root.contains("limits")) {
    const auto& l = root.at("limits");
    reject_unknown(l, {"hub_clearance", "mic_clearance"}, "limits");
    read(l, "hub_clearance", cfg.limits.hub_clearance, "limits");
    read(l, "mic_clearance", cfg.limits.mic_clearance, "limits");
  }
  // Keep the solver's physical constants in step with the simulator.
  loc.speed_of_sound = cfg.sim.speed_of_sound;
  loc.sample_rate = cfg.sim.sample_rate;
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string config_echo(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario == Scenario::fixed_room ? "fixed" : "random";
  j["room"] = json::array();
  for (auto p : cfg.room_polygon) j["room"].push_back({p.x, p.y});
  j["random_side_range"] = {cfg.random_min_side, cfg.random_max_side};
  j["trials"] = cfg.trials;
  j["snr_db"] = db_json(cfg.snr_db);
  j["beta"] = cfg.beta;
  j["master_seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  j["start_clearance"] = cfg.start_clearance;
  j["random_heading"] = cfg.random_heading;
  j["exact_toas"] = cfg.exact_toas;
  j["sim"] = {{"speed_of_sound", cfg.sim.speed_of_sound},
              {"sample_rate", cfg.sim.sample_rate},
              {"rt60", cfg.sim.rt60},
              {"max_order", cfg.sim.max_order},
              {"distance_floor", cfg.sim.distance_floor}};
  j["peaks"] = {{"rel_threshold", cfg.peaks.rel_threshold},
                {"min_separation", cfg.peaks.min_separation},
                {"max_peaks", cfg.peaks.max_peaks}};
  const auto& loc = cfg.planner.sweep.locate;
  j["locate"] = {{"match_radius", loc.match_radius},
                 {"max_echoes_per_mic", loc.max_echoes_per_mic},
                 {"direct_path_tolerance_samples", loc.direct_path_tolerance_samples},
                 {"dedupe_radius", loc.dedupe_radius},
                 {"refine_ranges", loc.refine_ranges}};
  const auto& pl = cfg.planner;
  j["planner"] = {{"angle_tol_deg", pl.angle_tol_deg},
                  {"mag_tol", pl.mag_tol},
                  {"step_dist", pl.step_dist},
                  {"default_extension", pl.default_extension},
                  {"mitigation_extensions", pl.mitigation_extensions},
                  {"cluster_radius", pl.cluster_radius},
                  {"min_support", pl.min_support},
                  {"max_steps", pl.max_steps},
                  {"restart_radius", pl.restart_radius},
                  {"sweep_delta_deg", pl.sweep.delta_deg}};
  j["limits"] = {{"hub_clearance", cfg.limits.hub_clearance}, {"mic_clearance", cfg.limits.mic_clearance}};
  return j.dump(2);
}

}  // namespace echomap
