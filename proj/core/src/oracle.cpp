#include "echomap/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace echomap {

Point2 FrameTransform::to_world(Point2 local) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return Point2{c * local.x - s * local.y, s * local.x + c * local.y} + translation;
}

Point2 FrameTransform::to_local(Point2 world) const {
  const Point2 d = world - translation;
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Line2 FrameTransform::line_to_world(const Line2& local) const {
  const Point2 p = to_world(local.foot_from_origin());
  const Point2 q = to_world(local.foot_from_origin() + local.tangent());
  return Line2::through(p, q);
}

namespace {

bool mic_ok(const Polygon2& poly, Point2 p, double clearance) {
  return polygon_contains(poly, p) && distance_to_boundary(poly, p) >= clearance;
}

struct WorldRig {
  Point2 source;
  std::array<Point2, kMicCount> mics;
};

std::optional<WorldRig> place_rig(const Polygon2& poly, const FrameTransform& frame, const RigPose& pose,
                                  const StandLimits& limits) {
  WorldRig rig;
  rig.source = frame.to_world(pose.center);
  if (!polygon_contains(poly, rig.source)) return std::nullopt;
  const auto local_mics = mic_positions(pose);
  for (int k = 0; k < kMicCount; ++k) {
    rig.mics[k] = frame.to_world(local_mics[k]);
    if (!mic_ok(poly, rig.mics[k], limits.mic_clearance)) return std::nullopt;
  }
  return rig;
}

MicArrayObservation local_observation(const RigPose& pose) {
  MicArrayObservation obs;
  obs.mic_positions = mic_positions(pose);
  obs.source_position = pose.center;
  return obs;
}

}  // namespace

RirSensingOracle::RirSensingOracle(Room room, SimConfig sim, PeakPickConfig peaks, FrameTransform frame,
                                   StandLimits limits)
    : room_(std::move(room)), sim_(sim), peaks_(peaks), frame_(frame), limits_(limits) {
  sim_.validate();
  peaks_.validate();
}

std::optional<MicArrayObservation> RirSensingOracle::observe(const RigPose& pose, std::uint64_t measurement) const {
  const auto rig = place_rig(room_.polygon(), frame_, pose, limits_);
  if (!rig) return std::nullopt;
  const auto images = enumerate_image_sources(room_, rig->source, sim_.max_order);
  SimConfig cfg = sim_;
  cfg.rng_seed = mix_seed(sim_.rng_seed, measurement);
  auto obs = local_observation(pose);
  for (int k = 0; k < kMicCount; ++k) {
    const Rir rir = synthesize_rir(room_, images, rig->source, rig->mics[k], cfg, k + 1);
    obs.echo_lists[k] = extract_toas(rir, peaks_);
  }
  return obs;
}

bool RirSensingOracle::can_stand(Point2 center) const {
  const Point2 w = frame_.to_world(center);
  return polygon_contains(room_.polygon(), w) && distance_to_boundary(room_.polygon(), w) >= limits_.hub_clearance;
}

GeometricSensingOracle::GeometricSensingOracle(Room room, SimConfig sim, FrameTransform frame, StandLimits limits)
    : room_(std::move(room)), sim_(sim), frame_(frame), limits_(limits) {
  sim_.validate();
}

std::optional<MicArrayObservation> GeometricSensingOracle::observe(const RigPose& pose, std::uint64_t) const {
  const auto rig = place_rig(room_.polygon(), frame_, pose, limits_);
  if (!rig) return std::nullopt;
  const auto images = enumerate_image_sources(room_, rig->source, sim_.max_order);
  auto obs = local_observation(pose);
  for (int k = 0; k < kMicCount; ++k) {
    std::vector<EchoEvent> events;
    for (const auto& is : images) {
      const double t = toa(is, rig->mics[k], sim_.speed_of_sound);
      if (!(t < sim_.rt60)) continue;
      const double d = std::max(distance(is.position, rig->mics[k]), sim_.distance_floor);
      events.push_back(EchoEvent{t, is.amplitude / d, k + 1});
    }
    std::sort(events.begin(), events.end(), [](const EchoEvent& a, const EchoEvent& b) { return a.toa < b.toa; });
    // Coincident images (same position via different paths) arrive together.
    std::vector<EchoEvent> merged;
    for (const auto& e : events) {
      if (!merged.empty() && e.toa - merged.back().toa <= 1e-12) {
        merged.back().amplitude += e.amplitude;
      } else {
        merged.push_back(e);
      }
    }
    obs.echo_lists[k] = std::move(merged);
  }
  return obs;
}

bool GeometricSensingOracle::can_stand(Point2 center) const {
  const Point2 w = frame_.to_world(center);
  return polygon_contains(room_.polygon(), w) && distance_to_boundary(room_.polygon(), w) >= limits_.hub_clearance;
}

}  // namespace echomap
