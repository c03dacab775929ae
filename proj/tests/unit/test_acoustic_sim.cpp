#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "echomap/acoustic_sim.hpp"
#include "echomap/errors.hpp"
#include "oracles.hpp"

using namespace echomap;

namespace {

SimConfig noiseless() {
  SimConfig cfg;
  cfg.noise_snr_db = SimConfig::kNoiseless;
  return cfg;
}

const Room kRoom(Polygon2::rectangle(6, 5));

std::multiset<std::pair<long long, long long>> keyed(const std::vector<Point2>& pts) {
  std::multiset<std::pair<long long, long long>> out;
  for (auto p : pts) out.insert({std::llround(p.x * 1e6), std::llround(p.y * 1e6)});
  return out;
}

}  // namespace

TEST_CASE("first-order images of the 6x5 room") {
  const auto images = enumerate_image_sources(kRoom, {2, 1}, 1);
  REQUIRE(images.size() == 5);
  CHECK(images[0].order == 0);
  CHECK(images[0].position == Point2{2, 1});
  std::vector<Point2> first;
  for (const auto& is : images) {
    if (is.order == 1) first.push_back(is.position);
  }
  CHECK(keyed(first) == keyed({{2, -1}, {10, 1}, {2, 9}, {-2, 1}}));
}

TEST_CASE("image structure invariants") {
  const auto images = enumerate_image_sources(kRoom, {2, 1}, 3);
  CHECK(images.size() == 1 + 4 + 12 + 36);
  for (const auto& is : images) {
    CHECK(is.order == static_cast<int>(is.wall_path.size()));
    for (std::size_t i = 1; i < is.wall_path.size(); ++i) CHECK(is.wall_path[i] != is.wall_path[i - 1]);
    CHECK(is.amplitude == doctest::Approx(std::pow(0.9, is.order)));
  }
}

TEST_CASE("images match the recursive mirror oracle on random rectangles") {
  oracle::Gen g(21);
  for (int room_i = 0; room_i < 50; ++room_i) {
    const double w = g.uniform(3, 10), h = g.uniform(3, 10);
    const Point2 origin{g.uniform(-5, 5), g.uniform(-5, 5)};
    const Room room(Polygon2::rectangle(w, h, origin));
    const Point2 src{origin.x + g.uniform(0.2, w - 0.2), origin.y + g.uniform(0.2, h - 0.2)};
    std::vector<oracle::Pt> poly;
    for (auto v : room.polygon().vertices()) poly.push_back({v.x, v.y});
    for (int order = 1; order <= 3; ++order) {
      const auto mine = enumerate_image_sources(room, src, order);
      const auto ref = oracle::mirror_images(poly, {src.x, src.y}, order);
      REQUIRE(mine.size() == ref.size());
      std::vector<Point2> a, b;
      for (const auto& is : mine) a.push_back(is.position);
      for (const auto& is : ref) b.push_back({is.pos.x, is.pos.y});
      CHECK(keyed(a) == keyed(b));
    }
  }
}

TEST_CASE("enumeration rejects a source outside the room") {
  CHECK_THROWS_AS(enumerate_image_sources(kRoom, {7, 1}, 1), SourceOutsideRoom);
  CHECK_THROWS_AS(enumerate_image_sources(kRoom, {0, 1}, 1), SourceOutsideRoom);
}

TEST_CASE("toa examples") {
  ImageSource is;
  is.position = {0, -2};
  CHECK(toa(is, {0, 1}, 343) == doctest::Approx(3.0 / 343));
  CHECK(toa(is, {0, -2}, 343) == 0.0);
  is.position = {-4, 0};
  CHECK(toa(is, {0.4, 0}, 343) == doctest::Approx(4.4 / 343));
}

TEST_CASE("direct path lands on sample 480") {
  const Rir rir = synthesize_rir(kRoom, {2, 1}, {2 + 1.715, 1}, noiseless());
  CHECK(rir.samples.size() == 76800);
  CHECK(rir.samples[480] > 0);
  CHECK(rir.samples[479] == 0);
  CHECK(rir.samples[481] == 0);
}

TEST_CASE("noiseless nonzero samples are exactly the rounded image arrivals") {
  const SimConfig cfg = noiseless();
  const Point2 src{2, 1}, mic{2.4, 1.3};
  const auto images = enumerate_image_sources(kRoom, src, cfg.max_order);
  std::map<long, double> expected;
  for (const auto& is : images) {
    const double t = oracle::travel_time({is.position.x, is.position.y}, {mic.x, mic.y}, 343.0);
    if (t >= cfg.rt60) continue;
    const double d = std::hypot(is.position.x - mic.x, is.position.y - mic.y);
    expected[std::lround(t * cfg.sample_rate)] += is.amplitude / std::max(d, 0.01);
  }
  const Rir rir = synthesize_rir(kRoom, src, mic, cfg);
  std::map<long, double> got;
  for (std::size_t i = 0; i < rir.samples.size(); ++i) {
    if (rir.samples[i] != 0.0) got[static_cast<long>(i)] = rir.samples[i];
  }
  REQUIRE(got.size() == expected.size());
  for (auto [idx, amp] : expected) {
    REQUIRE(got.count(idx));
    CHECK(got[idx] == doctest::Approx(amp).epsilon(1e-12));
  }
}

TEST_CASE("amplitude decreases with order at equal distance") {
  const auto images = enumerate_image_sources(kRoom, {2, 1}, 3);
  for (const auto& a : images) {
    for (const auto& b : images) {
      if (b.order == a.order + 1) CHECK(b.amplitude <= a.amplitude);
    }
  }
}

TEST_CASE("same inputs give bit-identical responses") {
  SimConfig cfg;
  cfg.rng_seed = 99;
  const Rir a = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, cfg, 2);
  const Rir b = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, cfg, 2);
  CHECK(a.samples == b.samples);
  cfg.rng_seed = 100;
  const Rir c = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, cfg, 2);
  CHECK(a.samples != c.samples);
}

TEST_CASE("noise level follows the configured SNR") {
  SimConfig cfg;
  cfg.noise_snr_db = 10.0;
  const Rir noisy = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, cfg);
  const Rir clean = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, noiseless());
  double ps = 0, pn = 0;
  for (std::size_t i = 0; i < clean.samples.size(); ++i) {
    ps += clean.samples[i] * clean.samples[i];
    const double n = noisy.samples[i] - clean.samples[i];
    pn += n * n;
  }
  CHECK(10 * std::log10(ps / pn) == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("noise is independent across microphones") {
  SimConfig cfg;
  cfg.rt60 = 1.2;  // 115200 samples
  cfg.rng_seed = 5;
  SimConfig quiet = cfg;
  quiet.noise_snr_db = SimConfig::kNoiseless;
  const Point2 src{2, 1}, m1{2.4, 1}, m2{2, 1.4};
  const Rir a = synthesize_rir(kRoom, src, m1, cfg, 1);
  const Rir b = synthesize_rir(kRoom, src, m2, cfg, 2);
  const Rir ca = synthesize_rir(kRoom, src, m1, quiet, 1);
  const Rir cb = synthesize_rir(kRoom, src, m2, quiet, 2);
  REQUIRE(a.samples.size() >= 100000);
  std::vector<double> ra, rb;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ra.push_back(a.samples[i] - ca.samples[i]);
    rb.push_back(b.samples[i] - cb.samples[i]);
  }
  CHECK(std::abs(oracle::correlation(ra, rb)) < 0.1);
}

TEST_CASE("near a corner a second-order arrival precedes a first-order one") {
  const Point2 src{0.3, 0.3};
  bool found = false;
  const auto images = enumerate_image_sources(kRoom, src, 2);
  for (const Point2 mic : {Point2{0.5, 0.3}, Point2{0.3, 0.5}, Point2{0.1, 0.3}}) {
    double latest_first = 0, earliest_second = 1e9;
    for (const auto& is : images) {
      const double t = toa(is, mic, 343);
      if (is.order == 1) latest_first = std::max(latest_first, t);
      if (is.order == 2) earliest_second = std::min(earliest_second, t);
    }
    found = found || earliest_second < latest_first;
  }
  CHECK(found);
}

TEST_CASE("synthesis preconditions") {
  const SimConfig cfg = noiseless();
  CHECK_THROWS_AS(synthesize_rir(kRoom, {-1, 1}, {2, 2}, cfg), SourceOutsideRoom);
  CHECK_THROWS_AS(synthesize_rir(kRoom, {1, 1}, {6, 2}, cfg), MicOutsideRoom);
  CHECK_THROWS_AS(synthesize_rir(kRoom, {1, 1}, {1, 1}, cfg), CoincidentSourceMic);
  SimConfig bad = cfg;
  bad.max_order = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.sample_rate = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.rt60 = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("room reflection factors are validated") {
  CHECK_THROWS_AS(Room(Polygon2::rectangle(6, 5), 0.0), ConfigError);
  CHECK_THROWS_AS(Room(Polygon2::rectangle(6, 5), 1.5), ConfigError);
  CHECK_THROWS_AS(Room(Polygon2::rectangle(6, 5), std::vector<double>{0.9, 0.9}), ConfigError);
  const Room r(Polygon2::rectangle(6, 5), std::vector<double>{0.9, 0.8, 0.7, 1.0});
  CHECK(r.walls()[2].beta == 0.7);
  CHECK(r.wall_lines().size() == 4);
}

TEST_CASE("rir dump has two columns per nonzero sample") {
  const Rir rir = synthesize_rir(kRoom, {2, 1}, {2.4, 1}, noiseless());
  const auto path = std::filesystem::temp_directory_path() / "echomap_rir_dump_test.txt";
  write_rir_dump(path, rir);
  std::ifstream in(path);
  long idx;
  double amp;
  std::size_t rows = 0;
  while (in >> idx >> amp) {
    CHECK(rir.samples.at(idx) == doctest::Approx(amp));
    ++rows;
  }
  const auto nonzero = std::count_if(rir.samples.begin(), rir.samples.end(), [](double v) { return v != 0.0; });
  CHECK(rows == static_cast<std::size_t>(nonzero));
  std::filesystem::remove(path);
}

TEST_CASE("mix_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(mix_seed(a, b));
  }
  CHECK(seen.size() == 400);
}
