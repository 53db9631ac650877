#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace midas {

/// Deterministic RNG. Gaussian draws use Box-Muller instead of
/// std::normal_distribution, whose output differs across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    // 53 random mantissa bits, same construction everywhere.
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Normal draw rejected and retried until strictly positive.
  double positive_normal(double mean, double stddev) {
    for (;;) {
      double v = normal(mean, stddev);
      if (v > 0.0) return v;
    }
  }

  std::uint64_t next_u64() { return engine_(); }

  // Fisher-Yates index helper: uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    // Rejection sampling keeps the distribution exact for any n.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      std::uint64_t v = engine_();
      if (v < limit) return static_cast<std::size_t>(v % n);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace midas
