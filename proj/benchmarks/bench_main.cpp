#include <benchmark/benchmark.h>

#include "echomap/acoustic_sim.hpp"
#include "echomap/echoes.hpp"
#include "echomap/islocate.hpp"
#include "echomap/oracle.hpp"
#include "echomap/rig.hpp"

using namespace echomap;

namespace {

const Room kRoom(Polygon2::rectangle(6, 5));
const Point2 kSource{2.4, 1.9};

SimConfig sim(double snr) {
  SimConfig s;
  s.noise_snr_db = snr;
  return s;
}

MicArrayObservation observation() {
  const GeometricSensingOracle oracle(kRoom, sim(SimConfig::kNoiseless), FrameTransform{kSource, 0.0});
  return *oracle.observe(RigPose::make({0, 0}, 0.2, 0.4), 0);
}

}  // namespace

static void BM_SynthesizeRir(benchmark::State& state) {
  const SimConfig cfg = sim(30.0);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_rir(kRoom, kSource, {2.8, 1.9}, cfg));
}
BENCHMARK(BM_SynthesizeRir)->Unit(benchmark::kMillisecond);

static void BM_ExtractToas(benchmark::State& state) {
  const Rir rir = synthesize_rir(kRoom, kSource, {2.8, 1.9}, sim(30.0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_toas(rir));
}
BENCHMARK(BM_ExtractToas)->Unit(benchmark::kMillisecond);

static void BM_FindCommonIs(benchmark::State& state) {
  const MicArrayObservation obs = observation();
  for (auto _ : state) benchmark::DoNotOptimize(find_common_is(obs));
}
BENCHMARK(BM_FindCommonIs)->Unit(benchmark::kMicrosecond);

static void BM_RotationSweep(benchmark::State& state) {
  const GeometricSensingOracle oracle(kRoom, sim(SimConfig::kNoiseless), FrameTransform{kSource, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(rotation_sweep(oracle, RigPose::make({0, 0}, 0, 0.4), SweepConfig{}));
}
BENCHMARK(BM_RotationSweep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
