#include "simkit.hpp"

#include <cmath>

#include "common.hpp"
#include "rng.hpp"

namespace midas {

namespace {
constexpr double kPi = 3.14159265358979323846;

double positive_or_mean(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  return rng.positive_normal(mean, stddev);
}
}  // namespace

DamageSpec damage_from_config(const DamageConfig& cfg) {
  DamageSpec d;
  if (cfg.kind == "none") {
    d.kind = DamageSpec::Kind::None;
  } else if (cfg.kind == "crack") {
    d.kind = DamageSpec::Kind::Crack;
  } else if (cfg.kind == "boundary") {
    d.kind = DamageSpec::Kind::Boundary;
  } else {
    throw Error(ErrorCode::Config, "damage kind must be none|crack|boundary");
  }
  d.center = {cfg.center_x_cm, cfg.center_y_cm};
  d.radius_cm = cfg.radius_cm;
  d.amplification = cfg.amplification;
  d.attenuation = cfg.attenuation;
  return d;
}

Plate make_plate(const SimConfig& cfg) {
  Plate plate;
  plate.width_cm = 2.0 * cfg.margin_cm + (cfg.nx - 1) * cfg.pitch_x_cm;
  plate.height_cm = 2.0 * cfg.margin_cm + (cfg.ny - 1) * cfg.pitch_y_cm;
  // Degenerate single-row/column grids still need a nonzero extent for the
  // mode-shape gain below.
  if (plate.width_cm <= 0.0) plate.width_cm = 1.0;
  if (plate.height_cm <= 0.0) plate.height_cm = 1.0;
  for (int j = 0; j < cfg.ny; ++j)
    for (int i = 0; i < cfg.nx; ++i) {
      plate.layout.ids.push_back(j * cfg.nx + i + 1);
      plate.layout.pos_cm.push_back(
          {cfg.margin_cm + i * cfg.pitch_x_cm, cfg.margin_cm + j * cfg.pitch_y_cm});
    }
  // First-mode shape over the plate: strain response peaks mid-plate and
  // falls off toward the clamped edges. Margin > 0 keeps edge sensors nonzero.
  for (const auto& p : plate.layout.pos_cm) {
    double shape = std::sin(kPi * p.x / plate.width_cm) * std::sin(kPi * p.y / plate.height_cm);
    plate.gains.push_back(1.0 + cfg.gain_span * shape);
  }
  return plate;
}

LoadingProfile generate_loading(const SimConfig& cfg, std::uint64_t seed) {
  if (cfg.duration_s <= 0.0 || cfg.timestep_s <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "loading duration and timestep must be positive");
  auto samples = static_cast<std::size_t>(std::llround(cfg.duration_s / cfg.timestep_s));
  if (samples < 1)
    throw Error(ErrorCode::InvalidArgument, "loading shorter than one timestep");

  Rng rng(seed);
  std::vector<double> amp(cfg.n_components), freq(cfg.n_components), phase(cfg.n_components);
  double sum_sq = 0.0;
  for (int c = 0; c < cfg.n_components; ++c) {
    amp[c] = positive_or_mean(rng, cfg.amp_mean, cfg.amp_std);
    freq[c] = positive_or_mean(rng, cfg.freq_mean_hz, cfg.freq_std_hz);
    phase[c] = rng.uniform(0.0, 2.0 * kPi);
    sum_sq += amp[c] * amp[c];
  }

  LoadingProfile profile;
  profile.timestep = cfg.timestep_s;
  // RMS of a sinusoid sum with independent phases is sqrt(sum A^2 / 2).
  profile.dc_offset = cfg.dc_scale * std::sqrt(sum_sq / 2.0);
  profile.series.resize(samples);
  for (std::size_t t = 0; t < samples; ++t) {
    double time = static_cast<double>(t) * cfg.timestep_s;
    double v = profile.dc_offset;
    for (int c = 0; c < cfg.n_components; ++c)
      v += amp[c] * std::sin(2.0 * kPi * freq[c] * time + phase[c]);
    profile.series[t] = v;
  }
  return profile;
}

LoadingProfile slice_loading(const LoadingProfile& loading, std::size_t start,
                             std::size_t count) {
  if (start + count > loading.series.size())
    throw Error(ErrorCode::InvalidArgument, "loading slice out of range");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "empty loading slice");
  LoadingProfile out;
  out.timestep = loading.timestep;
  out.dc_offset = loading.dc_offset;
  out.series.assign(loading.series.begin() + static_cast<std::ptrdiff_t>(start),
                    loading.series.begin() + static_cast<std::ptrdiff_t>(start + count));
  return out;
}

StrainSet simulate_strains(const Plate& plate, const LoadingProfile& loading,
                           const DamageSpec& damage, const SimConfig& cfg,
                           std::uint64_t noise_seed) {
  if (cfg.noise_pct < 0.0)
    throw Error(ErrorCode::InvalidArgument, "noise_pct must be >= 0");
  const std::size_t n = plate.layout.size();
  const std::size_t samples = loading.series.size();

  std::vector<double> local(n, 1.0);
  double attenuation = 1.0;
  if (damage.kind == DamageSpec::Kind::Crack) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = distance(plate.layout.pos_cm[i], damage.center);
      local[i] = 1.0 + (damage.amplification - 1.0) *
                           std::exp(-(d * d) / (damage.radius_cm * damage.radius_cm));
    }
  } else if (damage.kind == DamageSpec::Kind::Boundary) {
    attenuation = damage.attenuation;
  }

  const double thermal = cfg.thermal_coeff * cfg.delta_t_c * 1e6;
  const double dc = loading.dc_offset;

  StrainSet set;
  set.timestep = loading.timestep;
  set.time.resize(samples);
  for (std::size_t t = 0; t < samples; ++t)
    set.time[t] = static_cast<double>(t) * loading.timestep;

  Rng rng(noise_seed);
  set.strain.assign(n, std::vector<double>(samples));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = plate.gains[i] * attenuation;
    for (std::size_t t = 0; t < samples; ++t) {
      double clean = g * (dc + local[i] * (loading.series[t] - dc)) + thermal;
      if (cfg.noise_pct > 0.0)
        clean *= 1.0 + cfg.noise_pct * rng.normal();
      set.strain[i][t] = clean;
    }
  }
  return set;
}

}  // namespace midas
