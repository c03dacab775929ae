#include "echomap/echoes.hpp"

#include <algorithm>
#include <cmath>

#include "echomap/errors.hpp"

namespace echomap {

void PeakPickConfig::validate() const {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) throw ConfigError("rel_threshold must lie in (0, 1)");
  if (min_separation < 1) throw ConfigError("min_separation must be >= 1");
  if (max_peaks < 4) throw ConfigError("max_peaks must be >= 4");
}

std::vector<EchoEvent> extract_toas(const Rir& rir, const PeakPickConfig& cfg) {
  cfg.validate();
  const auto& s = rir.samples;
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, std::abs(v));
  if (!(peak >= kEmptySignalFloor)) throw EmptySignal("impulse response carries no energy");

  const double threshold = cfg.rel_threshold * peak;
  struct Candidate {
    std::size_t index;
    double magnitude;
  };
  std::vector<Candidate> maxima;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::abs(s[i]);
    if (m <= threshold) continue;
    // Plateaus resolve to their leftmost sample.
    const bool left_ok = i == 0 || m > std::abs(s[i - 1]);
    const bool right_ok = i + 1 == n || m >= std::abs(s[i + 1]);
    if (left_ok && right_ok) maxima.push_back({i, m});
  }

  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const Candidate& a, const Candidate& b) { return a.magnitude > b.magnitude; });

  std::vector<Candidate> kept;
  const auto sep = static_cast<std::size_t>(cfg.min_separation);
  for (const auto& c : maxima) {
    if (static_cast<int>(kept.size()) >= cfg.max_peaks) break;
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      const std::size_t gap = k.index > c.index ? k.index - c.index : c.index - k.index;
      return gap < sep;
    });
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return a.index < b.index; });

  std::vector<EchoEvent> out;
  out.reserve(kept.size());
  for (const auto& k : kept) {
    out.push_back(EchoEvent{static_cast<double>(k.index) / rir.sample_rate, k.magnitude, rir.mic_index});
  }
  return out;
}

}  // namespace echomap
