#pragma once

// Simulated sensing: maps planner-frame rig poses into a ground-truth room
// and returns what the four microphones would report.

#include "echomap/acoustic_sim.hpp"
#include "echomap/echoes.hpp"
#include "echomap/rig.hpp"

namespace echomap {

/// Rigid transform from the robot's working frame to the world frame:
/// world = R(rotation) * local + translation.
struct FrameTransform {
  Point2 translation;
  double rotation = 0.0;  // rad

  Point2 to_world(Point2 local) const;
  Point2 to_local(Point2 world) const;
  Line2 line_to_world(const Line2& local) const;
};

struct StandLimits {
  double hub_clearance = 0.3;   // m, robot centre to nearest wall
  double mic_clearance = 0.02;  // m, any microphone to nearest wall
};

/// Full pipeline: impulse responses per microphone, then peak picking.
class RirSensingOracle final : public SensingOracle {
 public:
  RirSensingOracle(Room room, SimConfig sim, PeakPickConfig peaks, FrameTransform frame = {},
                   StandLimits limits = {});

  std::optional<MicArrayObservation> observe(const RigPose& pose, std::uint64_t measurement) const override;
  bool can_stand(Point2 center) const override;

  const Room& room() const { return room_; }
  const FrameTransform& frame() const { return frame_; }

 private:
  Room room_;
  SimConfig sim_;
  PeakPickConfig peaks_;
  FrameTransform frame_;
  StandLimits limits_;
};

/// Exact arrival times straight from the image sources, no sampling or
/// noise. Serves as the noiseless reference for the estimation chain.
class GeometricSensingOracle final : public SensingOracle {
 public:
  GeometricSensingOracle(Room room, SimConfig sim, FrameTransform frame = {}, StandLimits limits = {});

  std::optional<MicArrayObservation> observe(const RigPose& pose, std::uint64_t measurement) const override;
  bool can_stand(Point2 center) const override;

 private:
  Room room_;
  SimConfig sim_;
  FrameTransform frame_;
  StandLimits limits_;
};

/// An oracle that never hears anything; used to exercise starvation paths.
class SilentOracle final : public SensingOracle {
 public:
  std::optional<MicArrayObservation> observe(const RigPose&, std::uint64_t) const override { return std::nullopt; }
  bool can_stand(Point2) const override { return true; }
};

}  // namespace echomap
