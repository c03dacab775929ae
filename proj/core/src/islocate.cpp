#include "echomap/islocate.hpp"

#include <algorithm>
#include <cmath>

#include "echomap/errors.hpp"

namespace echomap {

void LocateConfig::validate() const {
  if (!(speed_of_sound > 0.0)) throw ConfigError("speed_of_sound must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
  if (!(match_radius > 0.0)) throw ConfigError("match_radius must be positive");
  if (max_echoes_per_mic < 1) throw ConfigError("max_echoes_per_mic must be >= 1");
  if (!(direct_path_tolerance_samples >= 0.0)) throw ConfigError("direct_path_tolerance_samples must be >= 0");
  if (!(dedupe_radius >= 0.0)) throw ConfigError("dedupe_radius must be >= 0");
}

namespace {

// Linear system for one mic triple with the matrix inverted once.
class TripleSolver {
 public:
  TripleSolver(Point2 m1, Point2 m2, Point2 m3) {
    const Point2 r1 = m1 - m2;
    const Point2 r2 = m2 - m3;
    const double det = cross(r1, r2);
    if (std::abs(det) <= kSingularDeterminant) throw SingularGeometry("microphone triple is collinear");
    inv_ = {r2.y / det, -r1.y / det, -r2.x / det, r1.x / det};
    k12_ = dot(m1, m1) - dot(m2, m2);
    k23_ = dot(m2, m2) - dot(m3, m3);
  }

  // Ranges are already multiplied by c.
  Point2 solve(double d1, double d2, double d3) const {
    const double b1 = 0.5 * (k12_ - d1 * d1 + d2 * d2);
    const double b2 = 0.5 * (k23_ - d2 * d2 + d3 * d3);
    return {inv_[0] * b1 + inv_[1] * b2, inv_[2] * b1 + inv_[3] * b2};
  }

 private:
  std::array<double, 4> inv_{};
  double k12_ = 0.0;
  double k23_ = 0.0;
};

}  // namespace

Point2 solve_is_triple(Point2 m1, Point2 m2, Point2 m3, double t1, double t2, double t3, double c) {
  return TripleSolver(m1, m2, m3).solve(t1 * c, t2 * c, t3 * c);
}

bool reflective_point_filter(const CandidateIS& candidate, Point2 source, Point2 mic,
                             std::span<const Line2> known_walls) {
  const Line2 wall = wall_line_from_source_and_is(source, candidate.position);
  const auto reflective = segment_line_intersection(candidate.position, mic, wall);
  if (!reflective) return false;
  // The image sits on the far side by construction; the mic has to be on the
  // source side for the echo path to bounce off this wall.
  const double source_side = point_side(source, wall);
  const double mic_side = point_side(mic, wall);
  if (!(mic_side * source_side > 0.0)) return false;
  const double reflective_side = point_side(*reflective, wall);
  if (reflective_side * source_side < -Tolerances::kGeometricEps) return false;
  for (const auto& known : known_walls) {
    const double s = point_side(source, known);
    const double r = point_side(*reflective, known);
    // 2 cm slack: estimated walls carry millimetre-scale error.
    if (s * r < 0.0 && std::abs(r) > 0.02) return false;
  }
  return true;
}

Point2 refine_by_ranges(Point2 start, const std::array<Point2, kMicCount>& mics,
                        const std::array<double, kMicCount>& ranges, int iterations) {
  Point2 p = start;
  for (int it = 0; it < iterations; ++it) {
    double a = 0.0, b = 0.0, d = 0.0, gx = 0.0, gy = 0.0;
    for (int k = 0; k < kMicCount; ++k) {
      const Point2 v = p - mics[k];
      const double len = norm(v);
      if (len <= Tolerances::kGeometricEps) return p;
      const Point2 j = v / len;
      const double r = len - ranges[k];
      a += j.x * j.x;
      b += j.x * j.y;
      d += j.y * j.y;
      gx += j.x * r;
      gy += j.y * r;
    }
    const double damp = 1e-9 * (a + d);
    a += damp;
    d += damp;
    const double det = a * d - b * b;
    if (!(std::abs(det) > 0.0)) return p;
    const Point2 step{(d * gx - b * gy) / det, (a * gy - b * gx) / det};
    p = p - step;
    if (norm(step) < 1e-12) break;
  }
  return p;
}

bool candidate_less(const CandidateIS& a, const CandidateIS& b) {
  if (a.residual != b.residual) return a.residual < b.residual;
  if (a.position.x != b.position.x) return a.position.x < b.position.x;
  return a.position.y < b.position.y;
}

std::vector<CandidateIS> find_common_is(const MicArrayObservation& obs, const LocateConfig& cfg,
                                        std::span<const Line2> known_walls) {
  cfg.validate();
  const double c = cfg.speed_of_sound;
  const double direct_tol = cfg.direct_path_tolerance_samples * c / cfg.sample_rate;

  std::array<std::vector<double>, kMicCount> ranges;
  std::array<std::vector<double>, kMicCount> toas;
  for (int k = 0; k < kMicCount; ++k) {
    const double direct = distance(obs.mic_positions[k], obs.source_position);
    for (const auto& e : obs.echo_lists[k]) {
      const double r = e.toa * c;
      if (std::abs(r - direct) <= direct_tol) continue;
      if (static_cast<int>(ranges[k].size()) >= cfg.max_echoes_per_mic) break;
      ranges[k].push_back(r);
      toas[k].push_back(e.toa);
    }
    if (ranges[k].empty()) return {};
  }

  const auto& m = obs.mic_positions;
  const TripleSolver s123(m[0], m[1], m[2]);
  const TripleSolver s234(m[1], m[2], m[3]);
  const TripleSolver s341(m[2], m[3], m[0]);
  const double radius = cfg.match_radius;

  std::vector<CandidateIS> out;
  for (std::size_t i1 = 0; i1 < ranges[0].size(); ++i1) {
    for (std::size_t i2 = 0; i2 < ranges[1].size(); ++i2) {
      for (std::size_t i3 = 0; i3 < ranges[2].size(); ++i3) {
        const double d1 = ranges[0][i1];
        const double d2 = ranges[1][i2];
        const double d3 = ranges[2][i3];
        const Point2 p123 = s123.solve(d1, d2, d3);
        for (std::size_t i4 = 0; i4 < ranges[3].size(); ++i4) {
          const double d4 = ranges[3][i4];
          const Point2 p234 = s234.solve(d2, d3, d4);
          const double a = distance(p123, p234);
          if (!(a < radius)) continue;
          const Point2 p341 = s341.solve(d3, d4, d1);
          const double b = distance(p234, p341);
          const double e = distance(p341, p123);
          if (!(b < radius && e < radius)) continue;

          CandidateIS cand;
          cand.position = (p123 + p234 + p341) / 3.0;
          cand.residual = std::max({a, b, e});
          cand.supporting_toas = {toas[0][i1], toas[1][i2], toas[2][i3], toas[3][i4]};
          if (cfg.refine_ranges) {
            const Point2 polished = refine_by_ranges(cand.position, m, {d1, d2, d3, d4});
            if (polished.finite() && distance(polished, cand.position) < radius) cand.position = polished;
          }
          if (distance(cand.position, obs.source_position) <= Tolerances::kMinBisectorDistance) continue;
          const bool plausible = std::all_of(m.begin(), m.end(), [&](Point2 mic) {
            return reflective_point_filter(cand, obs.source_position, mic, known_walls);
          });
          if (plausible) out.push_back(cand);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), candidate_less);
  if (cfg.dedupe_radius > 0.0) {
    std::vector<CandidateIS> kept;
    for (const auto& c : out) {
      const bool shadowed = std::any_of(kept.begin(), kept.end(), [&](const CandidateIS& k) {
        return distance(k.position, c.position) < cfg.dedupe_radius;
      });
      if (!shadowed) kept.push_back(c);
    }
    out = std::move(kept);
  }
  return out;
}

}  // namespace echomap
