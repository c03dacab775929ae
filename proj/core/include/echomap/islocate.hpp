#pragma once

// Common image sources from four microphones' echo lists: trilateration over
// TOA triples, cross-check with the remaining microphone, and the
// reflective-point plausibility test.

#include <array>
#include <span>
#include <vector>

#include "echomap/echoes.hpp"
#include "echomap/geometry.hpp"

namespace echomap {

inline constexpr int kMicCount = 4;

struct MicArrayObservation {
  std::array<Point2, kMicCount> mic_positions;
  std::array<std::vector<EchoEvent>, kMicCount> echo_lists;
  Point2 source_position;
};

struct CandidateIS {
  Point2 position;
  std::array<double, kMicCount> supporting_toas{};
  double residual = 0.0;  // max pairwise distance of the three triple solutions
};

struct LocateConfig {
  double speed_of_sound = 343.0;
  double sample_rate = 96000.0;
  double match_radius = 0.05;                 // m
  int max_echoes_per_mic = 12;
  double direct_path_tolerance_samples = 1.5;
  // Candidates closer than this to a lower-residual one from the same
  // observation are dropped, so one measurement votes once per location.
  double dedupe_radius = 0.1;  // m
  // Polish each candidate by least squares on the four absolute ranges.
  bool refine_ranges = true;

  void validate() const;
};

/// Determinant floor below which a mic triple counts as collinear.
inline constexpr double kSingularDeterminant = 1e-9;

/// Solves the 2x2 system with rows (m1 - m2), (m2 - m3) and right-hand side
/// 0.5 * (|m_a|^2 - |m_b|^2 - r_a^2 + r_b^2), r = t * c.
/// Throws SingularGeometry.
Point2 solve_is_triple(Point2 m1, Point2 m2, Point2 m3, double t1, double t2, double t3, double c);

/// Accepts the candidate iff the segment candidate -> mic crosses the wall
/// implied by (source, candidate) and the crossing (the reflective point) is
/// not on the image side; additionally, the reflective point must lie on the
/// source side of every already-known wall in `known_walls`.
/// Throws DegenerateInput when the candidate coincides with the source.
bool reflective_point_filter(const CandidateIS& candidate, Point2 source, Point2 mic,
                             std::span<const Line2> known_walls = {});

/// Every common image source consistent across the triples (1,2,3), (2,3,4)
/// and (3,4,1), after discarding direct-path echoes and applying the
/// reflective-point test at each microphone. With cfg.refine_ranges the
/// centroid of the triple solutions is polished against all four ranges
/// (kept only if it moves less than the match radius). Near-duplicates within
/// cfg.dedupe_radius keep only the lowest residual. Sorted by residual, then
/// x, y.
std::vector<CandidateIS> find_common_is(const MicArrayObservation& obs, const LocateConfig& cfg = {},
                                        std::span<const Line2> known_walls = {});

/// Damped Gauss-Newton fit of a point to ranges from four microphones,
/// starting at `start`.
Point2 refine_by_ranges(Point2 start, const std::array<Point2, kMicCount>& mics,
                        const std::array<double, kMicCount>& ranges, int iterations = 5);

/// Canonical ordering used by every consumer of candidate lists.
bool candidate_less(const CandidateIS& a, const CandidateIS& b);

}  // namespace echomap
