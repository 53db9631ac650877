#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "common.hpp"
#include "localize.hpp"
#include "miae.hpp"
#include "util.hpp"

using namespace midas;

namespace {

// All-zero weights and biases, so every forward pass returns zero.
MiaeModel zero_model(int channels) {
  MiaeModel m;
  m.dims = {channels, 8, 4, 4, 8, channels};
  m.l = 2;
  m.weights.resize(5);
  m.biases.resize(5);
  for (int k = 0; k < 5; ++k) {
    m.weights[k].assign(static_cast<std::size_t>(m.dims[k + 1]) * m.dims[k], 0.0);
    m.biases[k].assign(static_cast<std::size_t>(m.dims[k + 1]), 0.0);
  }
  m.mech.n = static_cast<std::size_t>(channels) / 2;
  m.mech.max_abs.assign(m.mech.n, 1.0);
  m.mech.w.assign(m.mech.n * m.mech.n, 1.0);
  return m;
}

WindowDataset constant_windows(std::size_t n_windows, const std::vector<double>& fill) {
  WindowDataset ds;
  ds.l = 2;
  ds.stride = 2;
  ds.n_sensors = 1;
  ds.n_windows = n_windows;
  ds.tensor.resize(n_windows * 2 * 2);
  for (std::size_t b = 0; b < n_windows; ++b)
    for (int t = 0; t < 2; ++t)
      for (std::size_t c = 0; c < 2; ++c) ds.at(b, t, c) = fill[b];
  return ds;
}

SensorLayout unit_square() {
  SensorLayout layout;
  layout.ids = {1, 2, 3, 4};
  layout.pos_cm = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  return layout;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_SUITE_BEGIN("localize");

TEST_CASE("mean delta of a zero model is the negated mean input energy") {
  MiaeModel m = zero_model(2);
  // Window 0 holds all ones, window 1 all twos; per channel the squared norm
  // over l=2 steps is 2 and 8, so the mean norm change is -(2+8)/2 = -5.
  WindowDataset ds = constant_windows(2, {1.0, 2.0});
  std::vector<double> delta = mean_delta(m, ds);
  REQUIRE(delta.size() == 2);
  CHECK(delta[0] == doctest::Approx(-5.0));
  CHECK(delta[1] == doctest::Approx(-5.0));

  WindowDataset empty = constant_windows(0, {});
  CHECK_THROWS_AS(mean_delta(m, empty), Error);
}

TEST_CASE("relative change is the normalized mean shift") {
  ReferenceStats refs;
  refs.n_sensors = 1;
  refs.delta_hat_mean = {1.0, 1.0};
  refs.x_norm_mean = {2.0, 2.0};

  SUBCASE("hand values") {
    std::vector<double> T = relative_change({3.0, 1.0}, refs);
    CHECK(T[0] == doctest::Approx(1.0));  // |3 - 1| / 2
    CHECK(T[1] == doctest::Approx(0.0));  // equal means
  }
  SUBCASE("the shift direction does not matter") {
    std::vector<double> down = relative_change({-1.0, 1.0}, refs);
    CHECK(down[0] == doctest::Approx(1.0));  // |-1 - 1| / 2
    refs.delta_hat_mean = {3.0, 1.0};
    std::vector<double> swapped = relative_change({1.0, 1.0}, refs);
    CHECK(swapped[0] == doctest::Approx(1.0));
  }
  SUBCASE("zero reference norm is degenerate") {
    refs.x_norm_mean = {0.0, 2.0};
    CHECK(code_of([&] { relative_change({3.0, 1.0}, refs); }) ==
          ErrorCode::DegenerateReference);
  }
  SUBCASE("channel count must match") {
    CHECK_THROWS_AS(relative_change({3.0, 1.0, 0.0}, refs), Error);
  }
}

TEST_CASE("damage scores blend the two channel ratios") {
  // Two sensors; T layout is (mu0, mu1, sig0, sig1).
  std::vector<double> t_hat = {2.0, 4.0, 1.0, 5.0};

  SUBCASE("matching the reference maxima scores one half") {
    DamageScores s = damage_scores({4.0, 2.0, 5.0, 1.0}, t_hat, 0.5);
    CHECK(s.ref_max_mu == doctest::Approx(4.0));
    CHECK(s.ref_max_sigma == doctest::Approx(5.0));
    CHECK(s.p[0] == doctest::Approx(0.5));
    CHECK(s.p[1] == doctest::Approx((0.5 * 0.5 + 0.5 * 0.2) / 2.0));
  }
  SUBCASE("zero T scores zero") {
    DamageScores s = damage_scores({0.0, 0.0, 0.0, 0.0}, t_hat, 0.5);
    CHECK(s.p[0] == 0.0);
    CHECK(s.p[1] == 0.0);
  }
  SUBCASE("lambda one reads only the mu channel") {
    DamageScores s = damage_scores({4.0, 2.0, 123.0, 456.0}, t_hat, 1.0);
    CHECK(s.p[0] == doctest::Approx(0.5));
    CHECK(s.p[1] == doctest::Approx(0.25));
  }
  SUBCASE("lambda zero reads only the sigma channel") {
    DamageScores s = damage_scores({123.0, 456.0, 5.0, 1.0}, t_hat, 0.0);
    CHECK(s.p[0] == doctest::Approx(0.5));
    CHECK(s.p[1] == doctest::Approx(0.1));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(damage_scores({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, 0.5), Error);
    CHECK_THROWS_AS(damage_scores({1.0, 2.0}, t_hat, 0.5), Error);
    CHECK_THROWS_AS(damage_scores({1.0, 2.0, 3.0, 4.0}, t_hat, -0.1), Error);
    CHECK_THROWS_AS(damage_scores({1.0, 2.0, 3.0, 4.0}, t_hat, 1.1), Error);
    CHECK(code_of([&] { damage_scores({1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 1.0, 5.0}, 0.5); }) ==
          ErrorCode::DegenerateReference);
  }
}

TEST_CASE("score map is exact at sensors and averages equidistant ones") {
  SensorLayout layout = unit_square();
  std::vector<double> p = {1.0, 2.0, 3.0, 4.0};
  ScoreMap map = build_score_map(p, layout, 3);
  REQUIRE(map.resolution == 3);
  CHECK(map.x0 == 0.0);
  CHECK(map.y1 == 1.0);
  // Grid row 0 is y=0, so the four corners hit the sensors exactly.
  CHECK(map.at(0, 0) == 1.0);
  CHECK(map.at(2, 0) == 2.0);
  CHECK(map.at(0, 2) == 3.0);
  CHECK(map.at(2, 2) == 4.0);
  // The center is equidistant from all four sensors, so inverse-distance
  // weighting degenerates to the plain mean.
  CHECK(map.at(1, 1) == doctest::Approx(2.5));
  CHECK(map.peak_defined);
  CHECK(map.peak.x == doctest::Approx(1.0));
  CHECK(map.peak.y == doctest::Approx(1.0));
}

TEST_CASE("a flat score field has no peak") {
  ScoreMap map = build_score_map({2.0, 2.0, 2.0, 2.0}, unit_square(), 5);
  CHECK_FALSE(map.peak_defined);
  for (double v : map.values) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("score map input validation") {
  SensorLayout two;
  two.ids = {1, 2};
  two.pos_cm = {{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(build_score_map({1.0, 2.0}, two, 10), Error);
  CHECK_THROWS_AS(build_score_map({1.0, 2.0}, unit_square(), 10), Error);
  CHECK_THROWS_AS(build_score_map({1.0, 2.0, 3.0, 4.0}, unit_square(), 1), Error);
}

TEST_CASE("weighted centroid pulls toward the heavy corner") {
  SensorLayout layout = unit_square();
  Point c = weighted_centroid({3.0, 1.0, 1.0, 1.0}, layout);
  CHECK(c.x == doctest::Approx(1.0 / 3.0));
  CHECK(c.y == doctest::Approx(1.0 / 3.0));

  Point single = weighted_centroid({0.0, 0.0, 5.0, 0.0}, layout);
  CHECK(single.x == doctest::Approx(0.0));
  CHECK(single.y == doctest::Approx(1.0));

  CHECK_THROWS_AS(weighted_centroid({1.0, 2.0}, layout), Error);
  CHECK_THROWS_AS(weighted_centroid({1.0, -0.5, 1.0, 1.0}, layout), Error);
  CHECK(code_of([&] { weighted_centroid({0.0, 0.0, 0.0, 0.0}, layout); }) ==
        ErrorCode::NoSignal);
}

TEST_CASE("localization success is a closed ball") {
  Point truth{0.0, 0.0};
  CHECK(localization_success({13.0, 0.0}, truth, 13.0));
  CHECK(localization_success({5.0, 12.0}, truth, 13.0));
  CHECK_FALSE(localization_success({13.01, 0.0}, truth, 13.0));
  CHECK_THROWS_AS(localization_success({0.0, 0.0}, truth, 0.0), Error);
}

TEST_CASE("score map files carry the grid faithfully") {
  ScoreMap map = build_score_map({1.0, 2.0, 3.0, 4.0}, unit_square(), 3);
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "midas_localize_test";
  std::filesystem::create_directories(dir);
  std::string csv = (dir / "map.csv").string();
  std::string pgm = (dir / "map.pgm").string();
  write_scoremap_csv(csv, map);
  write_scoremap_pgm(pgm, map);

  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,score");
  std::size_t rows = 0;
  double center = -1.0;
  while (std::getline(in, line)) {
    auto parts = split(line, ',');
    REQUIRE(parts.size() == 3);
    if (parts[0] == "0.5" && parts[1] == "0.5") center = parse_double(parts[2]);
    ++rows;
  }
  CHECK(rows == 9);
  CHECK(center == doctest::Approx(2.5));

  std::ifstream pin(pgm);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  pin >> magic >> w >> h >> maxval;
  CHECK(magic == "P2");
  CHECK(w == 3);
  CHECK(h == 3);
  CHECK(maxval == 255);
  // Top output row is the max-y grid row: sensors score 3 and 4 there.
  int a = 0, b = 0, c = 0;
  pin >> a >> b >> c;
  CHECK(a == 170);
  CHECK(c == 255);
  CHECK(b > a);
  CHECK(b < c);
  std::vector<int> rest;
  int v = 0;
  while (pin >> v) rest.push_back(v);
  REQUIRE(rest.size() == 6);
  CHECK(rest.back() == 85);  // bottom-right sensor scores 2 of range 1..4

  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
