#pragma once

#include <vector>

#include "echomap/acoustic_sim.hpp"

namespace echomap {

struct EchoEvent {
  double toa = 0.0;        // s
  double amplitude = 0.0;  // |sample| at the peak
  int mic_index = 1;
};

struct PeakPickConfig {
  double rel_threshold = 0.02;  // fraction of the global |max|
  int min_separation = 8;       // samples
  int max_peaks = 40;

  void validate() const;
};

/// Absolute level under which a signal counts as empty.
inline constexpr double kEmptySignalFloor = 1e-12;

/// Local maxima of |samples| above rel_threshold * max, at least
/// min_separation apart, keeping the max_peaks strongest. Ascending in toa.
/// The direct path is not removed here. Throws EmptySignal.
std::vector<EchoEvent> extract_toas(const Rir& rir, const PeakPickConfig& cfg = {});

}  // namespace echomap
