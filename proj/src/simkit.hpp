#pragma once

#include <cstdint>

#include "config.hpp"
#include "types.hpp"

namespace midas {

/// Traffic-like loading: a static (dead-load) offset plus a sum of random
/// sinusoids. The offset is dc_scale times the analytic RMS of the sum, so it
/// does not depend on the sampled duration.
struct LoadingProfile {
  double timestep = 0.025;
  double dc_offset = 0.0;
  std::vector<double> series;  // dc_offset + fluctuating sum, per sample
};

struct DamageSpec {
  enum class Kind { None, Crack, Boundary };
  Kind kind = Kind::None;
  Point center;
  double radius_cm = 5.0;
  double amplification = 1.0;  // > 1 for cracks
  double attenuation = 1.0;    // < 1 for boundary loosening
};

DamageSpec damage_from_config(const DamageConfig& cfg);

/// Sensor grid plus the smooth gain field mapping load to per-sensor strain.
struct Plate {
  SensorLayout layout;
  std::vector<double> gains;
  double width_cm = 0.0;
  double height_cm = 0.0;
};

Plate make_plate(const SimConfig& cfg);

LoadingProfile generate_loading(const SimConfig& cfg, std::uint64_t seed);

/// Contiguous sub-range [start, start + count) of an existing profile, so
/// training and evaluation streams can split one recording in time.
LoadingProfile slice_loading(const LoadingProfile& loading, std::size_t start,
                             std::size_t count);

/// Per sensor i:
///   clean_i(t) = gain_i * attenuation * (dc + local_i * (load(t) - dc))
///                + thermal_coeff * delta_T * 1e6
///   strain_i(t) = clean_i(t) * (1 + noise_pct * z)
/// with local_i = 1 + (amplification - 1) * exp(-d_i^2 / radius^2).
/// Cracks amplify the live-load swing around the static offset; boundary
/// attenuation scales the whole response. With a zero offset this reduces to
/// plain gain * load * local * attenuation.
StrainSet simulate_strains(const Plate& plate, const LoadingProfile& loading,
                           const DamageSpec& damage, const SimConfig& cfg,
                           std::uint64_t noise_seed);

}  // namespace midas
