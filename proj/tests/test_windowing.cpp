#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "common.hpp"
#include "rng.hpp"
#include "windowing.hpp"

using namespace midas;

namespace {

// Synthetic compressed set: mu = base + segment index, sigma = spread, per sensor.
CompressedSet toy_segments(std::size_t n_sensors, std::size_t n_segments) {
  CompressedSet set;
  set.thresholds = fixed_thresholds(30.0, 175.0, 7);
  set.per_sensor.resize(n_sensors);
  for (std::size_t i = 0; i < n_sensors; ++i)
    for (std::size_t k = 0; k < n_segments; ++k) {
      CompressedSegment seg;
      seg.sensor_id = static_cast<int>(i + 1);
      seg.segment_index = static_cast<int>(k);
      seg.A = 5.0;
      seg.mu = 10.0 * static_cast<double>(i + 1) + static_cast<double>(k);
      seg.sigma = 2.0 + 0.1 * static_cast<double>(k);
      set.per_sensor[i].push_back(seg);
    }
  return set;
}

}  // namespace

TEST_SUITE_BEGIN("windowing");

TEST_CASE("window count follows the stride formula") {
  CHECK(build_windows(toy_segments(2, 20), 12, 2).n_windows == 5);
  CHECK(build_windows(toy_segments(2, 12), 12, 2).n_windows == 1);
  CHECK(build_windows(toy_segments(1, 30), 12, 3).n_windows == 7);
  CHECK_THROWS_AS(build_windows(toy_segments(2, 11), 12, 2), Error);
  try {
    build_windows(toy_segments(2, 11), 12, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
}

TEST_CASE("windows copy mu then sigma in sensor order") {
  WindowDataset ds = build_windows(toy_segments(3, 20), 12, 2);
  REQUIRE(ds.n_sensors == 3);
  REQUIRE(ds.channels() == 6);
  for (std::size_t b = 0; b < ds.n_windows; ++b)
    for (int t = 0; t < ds.l; ++t) {
      std::size_t seg = b * static_cast<std::size_t>(ds.stride) + static_cast<std::size_t>(t);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ds.at(b, t, i) == 10.0 * static_cast<double>(i + 1) + static_cast<double>(seg));
        CHECK(ds.at(b, t, 3 + i) == 2.0 + 0.1 * static_cast<double>(seg));
      }
    }
}

TEST_CASE("misaligned sensors are rejected") {
  CompressedSet set = toy_segments(2, 20);
  set.per_sensor[1].pop_back();
  try {
    build_windows(set, 12, 2);
    FAIL("expected misalignment error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MisalignedStreams);
  }
}

TEST_CASE("constant channel normalizes to zeros with a clamp flag") {
  CompressedSet set = toy_segments(2, 20);
  for (auto& seg : set.per_sensor[0]) seg.mu = 42.0;
  WindowDataset ds = build_windows(set, 12, 2);
  NormStats stats = compute_stats(ds);
  REQUIRE(stats.channels() == 4);
  CHECK(stats.clamped[0] == 1);
  CHECK(stats.stddev[0] == 1.0);
  CHECK(stats.clamped[1] == 0);
  normalize(ds, stats);
  for (std::size_t b = 0; b < ds.n_windows; ++b)
    for (int t = 0; t < ds.l; ++t) CHECK(ds.at(b, t, 0) == 0.0);
}

TEST_CASE("normalize then denormalize restores values") {
  WindowDataset ds = build_windows(toy_segments(3, 26), 12, 2);
  WindowDataset orig = ds;
  NormStats stats = compute_stats(ds);
  normalize(ds, stats);
  CHECK(ds.normalized);
  denormalize(ds);
  CHECK_FALSE(ds.normalized);
  for (std::size_t i = 0; i < ds.tensor.size(); ++i)
    CHECK(ds.tensor[i] == doctest::Approx(orig.tensor[i]).epsilon(1e-12));
}

TEST_CASE("stats from a shifted copy differ") {
  WindowDataset a = build_windows(toy_segments(2, 20), 12, 2);
  CompressedSet shifted = toy_segments(2, 20);
  for (auto& sensor : shifted.per_sensor)
    for (auto& seg : sensor) seg.mu += 5.0;
  WindowDataset b = build_windows(shifted, 12, 2);
  NormStats sa = compute_stats(a);
  NormStats sb = compute_stats(b);
  CHECK(sa.mean != sb.mean);
}

TEST_CASE("normalized training mean is zero and variance one") {
  WindowDataset ds = build_windows(toy_segments(2, 40), 12, 2);
  NormStats stats = compute_stats(ds);
  normalize(ds, stats);
  const std::size_t C = ds.channels();
  for (std::size_t c = 0; c < C; ++c) {
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < ds.n_windows; ++b)
      for (int t = 0; t < ds.l; ++t) {
        sum += ds.at(b, t, c);
        sq += ds.at(b, t, c) * ds.at(b, t, c);
        ++count;
      }
    double mean = sum / static_cast<double>(count);
    double var = sq / static_cast<double>(count) - mean * mean;
    CHECK(std::fabs(mean) < 1e-9);
    CHECK(std::fabs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("dataset directory round-trips bit exactly") {
  WindowDataset ds = build_windows(toy_segments(3, 24), 12, 2);
  ds.layout.ids = {1, 2, 3};
  ds.layout.pos_cm = {{0.0, 0.0}, {5.0, 0.0}, {0.0, 7.2}};
  ds.stats = compute_stats(ds);
  const char* dir = "windowing_ds_test";
  save_dataset(dir, ds);
  WindowDataset r = load_dataset(dir);
  CHECK(r.l == ds.l);
  CHECK(r.stride == ds.stride);
  CHECK(r.n_sensors == ds.n_sensors);
  CHECK(r.n_windows == ds.n_windows);
  CHECK(r.tensor == ds.tensor);
  CHECK(r.stats.mean == ds.stats.mean);
  CHECK(r.stats.stddev == ds.stats.stddev);
  CHECK(r.layout.ids == ds.layout.ids);
  CHECK(r.normalized == ds.normalized);
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
