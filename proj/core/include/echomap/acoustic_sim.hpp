#pragma once

// Ground-truth forward model: image sources by recursive mirroring and
// sampled impulse responses built from them.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "echomap/geometry.hpp"

namespace echomap {

struct Wall {
  Segment2 segment;
  double beta = 0.9;  // reflection factor in (0, 1]
};

/// Closed polygonal room. Wall i is polygon edge i.
class Room {
 public:
  /// Uniform reflection factor on every wall.
  explicit Room(Polygon2 polygon, double beta = 0.9);
  /// One reflection factor per polygon edge.
  Room(Polygon2 polygon, std::vector<double> betas);

  const Polygon2& polygon() const { return polygon_; }
  const std::vector<Wall>& walls() const { return walls_; }
  std::vector<Line2> wall_lines() const;

 private:
  Polygon2 polygon_;
  std::vector<Wall> walls_;
};

struct ImageSource {
  Point2 position;
  int order = 0;
  std::vector<int> wall_path;  // wall indices, first reflection first
  double amplitude = 1.0;      // product of beta along wall_path
};

struct SimConfig {
  double speed_of_sound = 343.0;  // m/s
  double sample_rate = 96000.0;   // Hz
  double rt60 = 0.8;              // s, sets the signal length
  int max_order = 3;
  double noise_snr_db = 30.0;     // +inf disables noise
  std::uint64_t rng_seed = 0;
  double distance_floor = 0.01;   // m, floor of the 1/r spreading term

  static constexpr double kNoiseless = std::numeric_limits<double>::infinity();

  /// Throws ConfigError when a field violates its invariant.
  void validate() const;
  std::size_t signal_length() const;
};

struct Rir {
  std::vector<double> samples;
  double sample_rate = 96000.0;
  int mic_index = 1;  // 1..K
};

/// All image sources up to `max_order`, order-0 source included. Duplicated
/// positions reached through different wall paths are kept separately.
/// Throws SourceOutsideRoom.
std::vector<ImageSource> enumerate_image_sources(const Room& room, Point2 source, int max_order);

/// Propagation time from the image source to the microphone.
double toa(const ImageSource& is, Point2 mic, double speed_of_sound);

/// Sampled impulse train plus white Gaussian noise at cfg.noise_snr_db.
/// Noise streams depend only on (cfg.rng_seed, mic_index).
/// Throws SourceOutsideRoom, MicOutsideRoom, CoincidentSourceMic.
Rir synthesize_rir(const Room& room, Point2 source, Point2 mic, const SimConfig& cfg, int mic_index = 1);

/// Same as synthesize_rir but reuses an already enumerated image-source set.
Rir synthesize_rir(const Room& room, std::span<const ImageSource> images, Point2 source, Point2 mic,
                   const SimConfig& cfg, int mic_index = 1);

/// Two-column text dump: "sample_index amplitude" per nonzero-or-noisy sample.
void write_rir_dump(const std::filesystem::path& path, const Rir& rir);

/// Deterministic 64-bit mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace echomap
