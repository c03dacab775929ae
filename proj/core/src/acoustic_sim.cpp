#include "echomap/acoustic_sim.hpp"

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <fstream>
#include <random>

#include "echomap/errors.hpp"

namespace echomap {

Room::Room(Polygon2 polygon, double beta)
    : Room(polygon, std::vector<double>(polygon.size(), beta)) {}

Room::Room(Polygon2 polygon, std::vector<double> betas) : polygon_(std::move(polygon)) {
  if (betas.size() != polygon_.size()) {
    throw ConfigError("room needs one reflection factor per wall");
  }
  walls_.reserve(polygon_.size());
  for (std::size_t i = 0; i < polygon_.size(); ++i) {
    if (!(betas[i] > 0.0 && betas[i] <= 1.0)) throw ConfigError("wall reflection factor must lie in (0, 1]");
    walls_.push_back(Wall{polygon_.edge(i), betas[i]});
  }
}

std::vector<Line2> Room::wall_lines() const {
  std::vector<Line2> out;
  out.reserve(walls_.size());
  for (const auto& w : walls_) out.push_back(w.segment.line());
  return out;
}

void SimConfig::validate() const {
  if (!(speed_of_sound > 0.0)) throw ConfigError("speed_of_sound must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
  if (!(rt60 > 0.0)) throw ConfigError("rt60 must be positive");
  if (max_order < 1) throw ConfigError("max_order must be >= 1");
  if (!(distance_floor > 0.0)) throw ConfigError("distance_floor must be positive");
  if (std::isnan(noise_snr_db)) throw ConfigError("noise_snr_db is NaN");
}

std::size_t SimConfig::signal_length() const {
  return static_cast<std::size_t>(std::ceil(rt60 * sample_rate));
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void mirror_recursive(const std::vector<Line2>& lines, const std::vector<Wall>& walls, const ImageSource& parent,
                      int max_order, std::vector<ImageSource>& out) {
  if (parent.order >= max_order) return;
  for (int w = 0; w < static_cast<int>(lines.size()); ++w) {
    if (!parent.wall_path.empty() && parent.wall_path.back() == w) continue;
    ImageSource child;
    child.position = mirror_point(parent.position, lines[w]);
    child.order = parent.order + 1;
    child.wall_path = parent.wall_path;
    child.wall_path.push_back(w);
    child.amplitude = parent.amplitude * walls[w].beta;
    out.push_back(child);
    mirror_recursive(lines, walls, child, max_order, out);
  }
}

}  // namespace

std::vector<ImageSource> enumerate_image_sources(const Room& room, Point2 source, int max_order) {
  if (!polygon_contains(room.polygon(), source)) throw SourceOutsideRoom("source is not strictly inside the room");
  if (max_order < 1) throw ConfigError("max_order must be >= 1");
  const auto lines = room.wall_lines();
  std::vector<ImageSource> out;
  out.push_back(ImageSource{source, 0, {}, 1.0});
  const ImageSource root = out.front();
  mirror_recursive(lines, room.walls(), root, max_order, out);
  return out;
}

double toa(const ImageSource& is, Point2 mic, double speed_of_sound) {
  return distance(is.position, mic) / speed_of_sound;
}

Rir synthesize_rir(const Room& room, Point2 source, Point2 mic, const SimConfig& cfg, int mic_index) {
  cfg.validate();
  const auto images = enumerate_image_sources(room, source, cfg.max_order);
  return synthesize_rir(room, images, source, mic, cfg, mic_index);
}

Rir synthesize_rir(const Room& room, std::span<const ImageSource> images, Point2 source, Point2 mic,
                   const SimConfig& cfg, int mic_index) {
  if (!polygon_contains(room.polygon(), source)) throw SourceOutsideRoom("source is not strictly inside the room");
  if (!polygon_contains(room.polygon(), mic)) throw MicOutsideRoom("microphone is not strictly inside the room");
  if (distance(source, mic) <= Tolerances::kGeometricEps) throw CoincidentSourceMic("microphone sits on the source");

  Rir rir;
  rir.sample_rate = cfg.sample_rate;
  rir.mic_index = mic_index;
  rir.samples.assign(cfg.signal_length(), 0.0);

  double energy = 0.0;
  for (const auto& is : images) {
    if (is.order > cfg.max_order) continue;
    const double t = toa(is, mic, cfg.speed_of_sound);
    if (!(t < cfg.rt60)) continue;
    const auto idx = static_cast<std::size_t>(std::llround(t * cfg.sample_rate));
    if (idx >= rir.samples.size()) continue;
    const double d = std::max(distance(is.position, mic), cfg.distance_floor);
    rir.samples[idx] += is.amplitude / d;
  }
  for (double s : rir.samples) energy += s * s;

  if (std::isfinite(cfg.noise_snr_db) && energy > 0.0) {
    const double signal_power = energy / static_cast<double>(rir.samples.size());
    const double sigma = std::sqrt(signal_power / std::pow(10.0, cfg.noise_snr_db / 10.0));
    std::mt19937_64 rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(mic_index)));
    boost::random::normal_distribution<double> gauss(0.0, sigma);
    for (double& s : rir.samples) s += gauss(rng);
  }
  return rir;
}

void write_rir_dump(const std::filesystem::path& path, const Rir& rir) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.precision(12);
  for (std::size_t i = 0; i < rir.samples.size(); ++i) {
    if (rir.samples[i] != 0.0) out << i << ' ' << rir.samples[i] << '\n';
  }
}

}  // namespace echomap
