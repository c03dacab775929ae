#include "echomap/rig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "echomap/errors.hpp"

namespace echomap {

RigPose RigPose::make(Point2 center, double arm_angle, double arm_extension) {
  if (!(arm_extension > 0.0 && arm_extension <= kMaxArmExtension)) {
    throw ConfigError("arm extension must lie in (0, 0.5] m");
  }
  constexpr double quarter = std::numbers::pi / 2.0;
  double a = std::fmod(arm_angle, quarter);
  if (a < 0.0) a += quarter;
  if (a >= quarter) a = 0.0;
  return RigPose{center, a, arm_extension};
}

std::array<Point2, kMicCount> mic_positions(const RigPose& pose) {
  std::array<Point2, kMicCount> out;
  for (int k = 0; k < kMicCount; ++k) {
    const double a = pose.arm_angle + k * std::numbers::pi / 2.0;
    out[k] = pose.center + Point2{std::cos(a), std::sin(a)} * pose.arm_extension;
  }
  return out;
}

std::size_t orientation_count(double delta_deg) {
  const double n = 360.0 / delta_deg;
  const double rounded = std::round(n);
  if (!(delta_deg > 0.0) || std::abs(n - rounded) > 1e-9 || rounded < 1.0) {
    throw ConfigError("sweep step must divide 360 degrees");
  }
  return static_cast<std::size_t>(rounded);
}

std::size_t default_min_support(std::size_t orientations) { return std::max<std::size_t>(3, orientations / 4); }

std::vector<CandidateIS> rotation_sweep(const SensingOracle& oracle, const RigPose& pose, const SweepConfig& cfg,
                                        std::span<const Line2> known_walls, std::uint64_t measurement_base) {
  const std::size_t n = orientation_count(cfg.delta_deg);
  std::vector<CandidateIS> all;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = static_cast<double>(k) * cfg.delta_deg * std::numbers::pi / 180.0;
    const RigPose oriented = RigPose::make(pose.center, angle, pose.arm_extension);
    const auto obs = oracle.observe(oriented, measurement_base + k);
    if (!obs) continue;
    auto found = find_common_is(*obs, cfg.locate, known_walls);
    all.insert(all.end(), found.begin(), found.end());
  }
  std::sort(all.begin(), all.end(), candidate_less);
  return all;
}

std::vector<CandidateIS> corner_mitigation_sweep(const SensingOracle& oracle, const RigPose& pose,
                                                 std::span<const double> extensions, const SweepConfig& cfg,
                                                 std::span<const Line2> known_walls,
                                                 std::uint64_t measurement_base) {
  std::vector<CandidateIS> all;
  std::uint64_t base = measurement_base;
  for (double ext : extensions) {
    const RigPose extended = RigPose::make(pose.center, pose.arm_angle, ext);
    auto found = rotation_sweep(oracle, extended, cfg, known_walls, base);
    all.insert(all.end(), found.begin(), found.end());
    base += 1000;
  }
  std::sort(all.begin(), all.end(), candidate_less);
  return all;
}

std::vector<ISCluster> cluster_candidates(std::span<const CandidateIS> candidates, double cluster_radius) {
  if (!(cluster_radius > 0.0)) throw ConfigError("cluster_radius must be positive");
  std::vector<CandidateIS> items(candidates.begin(), candidates.end());
  std::sort(items.begin(), items.end(), candidate_less);
  const std::size_t n = items.size();

  std::vector<std::vector<std::size_t>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (distance(items[i].position, items[j].position) <= cluster_radius) {
        neighbours[i].push_back(j);
        if (j != i) neighbours[j].push_back(i);
      }
    }
  }
  std::vector<std::size_t> live_count(n);
  for (std::size_t i = 0; i < n; ++i) live_count[i] = neighbours[i].size();
  std::vector<bool> assigned(n, false);
  std::size_t remaining = n;

  std::vector<ISCluster> clusters;
  while (remaining > 0) {
    std::size_t seed = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      if (seed == n || live_count[i] > live_count[seed]) seed = i;
    }

    std::vector<std::size_t> members;
    for (std::size_t j : neighbours[seed]) {
      if (!assigned[j]) members.push_back(j);
    }
    std::sort(members.begin(), members.end());
    Point2 centroid;
    // Shrink until every member sits within the radius of the centroid; the
    // seed always survives because the centroid stays inside its ball.
    for (;;) {
      centroid = {};
      for (std::size_t j : members) centroid = centroid + items[j].position;
      centroid = centroid / static_cast<double>(members.size());
      const auto far = std::remove_if(members.begin(), members.end(), [&](std::size_t j) {
        return distance(items[j].position, centroid) > cluster_radius;
      });
      if (far == members.end()) break;
      members.erase(far, members.end());
    }

    ISCluster cluster;
    cluster.centroid = centroid;
    for (std::size_t j : members) {
      assigned[j] = true;
      --remaining;
      cluster.members.push_back(items[j]);
      for (std::size_t k : neighbours[j]) --live_count[k];
    }
    cluster.size = cluster.members.size();
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::vector<ISCluster> rank_clusters(std::vector<ISCluster> clusters, Point2 source, std::size_t min_support) {
  std::erase_if(clusters, [&](const ISCluster& c) { return c.size < min_support; });
  std::stable_sort(clusters.begin(), clusters.end(), [&](const ISCluster& a, const ISCluster& b) {
    if (a.size != b.size) return a.size > b.size;
    return distance(a.centroid, source) < distance(b.centroid, source);
  });
  return clusters;
}

std::optional<ISCluster> pick_best_cluster(std::span<const ISCluster> clusters, Point2 source,
                                           std::size_t min_support) {
  auto ranked = rank_clusters({clusters.begin(), clusters.end()}, source, min_support);
  if (ranked.empty()) return std::nullopt;
  return ranked.front();
}

std::vector<ISCluster> drop_higher_order(std::vector<ISCluster> clusters, Point2 source,
                                         std::span<const Line2> known_walls, double tol,
                                         std::span<const ISCluster> extra_parents) {
  // Explaining pairs come from the clusters themselves plus extra_parents.
  std::vector<Point2> parents;
  for (const auto& c : clusters) parents.push_back(c.centroid);
  for (const auto& c : extra_parents) parents.push_back(c.centroid);
  std::vector<double> reach;
  std::vector<std::optional<Line2>> implied;
  for (auto p : parents) {
    reach.push_back(distance(p, source));
    if (reach.back() > Tolerances::kMinBisectorDistance) {
      implied.push_back(wall_line_from_source_and_is(source, p));
    } else {
      implied.push_back(std::nullopt);
    }
  }

  auto explained = [&](std::size_t p) {
    const Point2 target = clusters[p].centroid;
    for (std::size_t a = 0; a < parents.size(); ++a) {
      if (a == p || !(reach[a] < reach[p])) continue;
      for (const auto& w : known_walls) {
        if (distance(mirror_point(parents[a], w), target) <= tol) return true;
      }
      for (std::size_t b = 0; b < parents.size(); ++b) {
        if (b == p || b == a || !implied[b] || !(reach[b] < reach[p])) continue;
        if (distance(mirror_point(parents[a], *implied[b]), target) <= tol) return true;
      }
    }
    return false;
  };

  std::vector<ISCluster> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (!explained(i)) out.push_back(std::move(clusters[i]));
  }
  return out;
}

std::vector<ISCluster> rank_and_prune(std::span<const CandidateIS> candidates, Point2 source,
                                      std::span<const Line2> known_walls, double cluster_radius,
                                      std::size_t min_support) {
  auto clusters = cluster_candidates(candidates, cluster_radius);
  const std::size_t parent_support = std::max<std::size_t>(1, (min_support + 1) / 2);
  std::vector<ISCluster> weak;
  for (const auto& c : clusters) {
    if (c.size >= parent_support && c.size < min_support) weak.push_back(c);
  }
  return drop_higher_order(rank_clusters(std::move(clusters), source, min_support), source, known_walls,
                           cluster_radius, weak);
}

}  // namespace echomap
