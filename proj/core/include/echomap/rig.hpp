#pragma once

// Robot-mounted sensing unit: one source at the hub, four microphones on
// rotatable, extendable arms spaced 90 degrees apart.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "echomap/islocate.hpp"

namespace echomap {

inline constexpr double kMaxArmExtension = 0.5;  // m

struct RigPose {
  Point2 center;             // source position
  double arm_angle = 0.0;    // rad, normalized to [0, pi/2)
  double arm_extension = 0.4;

  /// Folds arm_angle into [0, pi/2) and checks 0 < extension <= 0.5 m.
  /// Throws ConfigError on a bad extension.
  static RigPose make(Point2 center, double arm_angle, double arm_extension);
};

struct ISCluster {
  std::vector<CandidateIS> members;
  Point2 centroid;
  std::size_t size = 0;
};

/// Anything that can turn a rig pose into four microphones' echo lists.
/// nullopt means the pose cannot be measured (an arm would leave the room).
class SensingOracle {
 public:
  virtual ~SensingOracle() = default;
  /// `measurement` distinguishes repeated measurements at the same pose
  /// (independent noise draws).
  virtual std::optional<MicArrayObservation> observe(const RigPose& pose, std::uint64_t measurement) const = 0;
  /// Whether the robot hub may stop at `center`.
  virtual bool can_stand(Point2 center) const = 0;
};

struct SweepConfig {
  double delta_deg = 10.0;
  LocateConfig locate;
};

std::array<Point2, kMicCount> mic_positions(const RigPose& pose);

/// find_common_is at every arm angle k * delta_deg, k < 360 / delta_deg.
/// Orientations the oracle cannot measure are skipped. Candidates come back
/// in canonical order. `known_walls` feed the reflective-point test.
std::vector<CandidateIS> rotation_sweep(const SensingOracle& oracle, const RigPose& pose, const SweepConfig& cfg,
                                        std::span<const Line2> known_walls = {}, std::uint64_t measurement_base = 0);

/// rotation_sweep at each extension, concatenated.
std::vector<CandidateIS> corner_mitigation_sweep(const SensingOracle& oracle, const RigPose& pose,
                                                 std::span<const double> extensions, const SweepConfig& cfg,
                                                 std::span<const Line2> known_walls = {},
                                                 std::uint64_t measurement_base = 0);

/// Greedy most-neighbours agglomeration. Every candidate lands in exactly one
/// cluster; every member ends within cluster_radius of its centroid.
std::vector<ISCluster> cluster_candidates(std::span<const CandidateIS> candidates, double cluster_radius);

/// Clusters with size >= min_support ordered by size (desc), then distance of
/// the centroid to `source` (asc).
std::vector<ISCluster> rank_clusters(std::vector<ISCluster> clusters, Point2 source, std::size_t min_support);

/// The biggest qualifying cluster, nearest to the source on ties.
std::optional<ISCluster> pick_best_cluster(std::span<const ISCluster> clusters, Point2 source,
                                           std::size_t min_support);

/// Drops clusters explained as a reflection of a nearer cluster across the
/// wall implied by another nearer cluster, or across a known wall, to within
/// `tol`. `extra_parents` may explain but are never dropped or returned;
/// pass the weakly supported clusters here. Order is preserved.
std::vector<ISCluster> drop_higher_order(std::vector<ISCluster> clusters, Point2 source,
                                         std::span<const Line2> known_walls, double tol,
                                         std::span<const ISCluster> extra_parents = {});

/// Clusters `candidates`, ranks them and drops higher-order images. Clusters
/// below min_support but holding at least half of it still serve as
/// explaining parents.
std::vector<ISCluster> rank_and_prune(std::span<const CandidateIS> candidates, Point2 source,
                                      std::span<const Line2> known_walls, double cluster_radius,
                                      std::size_t min_support);

/// max(3, orientations / 4).
std::size_t default_min_support(std::size_t orientations);

std::size_t orientation_count(double delta_deg);

}  // namespace echomap
