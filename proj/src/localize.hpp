#pragma once

#include <string>
#include <vector>

#include "miae.hpp"
#include "types.hpp"
#include "windowing.hpp"

namespace midas {

/// Mean per-channel norm change of the reconstructions over all windows.
std::vector<double> mean_delta(const MiaeModel& model, const WindowDataset& dataset);

/// T_c = |mean_test(delta_c) - mean_ref(delta_c)| / mean_ref(|x_c|^2).
/// The per-step (elementwise) reading of the norm change rescales numerator
/// and denominator by the same 1/l and therefore yields identical T values;
/// only emitted diagnostics differ between the two modes.
std::vector<double> relative_change(const std::vector<double>& test_delta_mean,
                                    const ReferenceStats& refs);

struct DamageScores {
  std::vector<double> t_mu;     // per sensor
  std::vector<double> t_sigma;  // per sensor
  double ref_max_mu = 0.0;
  double ref_max_sigma = 0.0;
  double lambda = 0.5;
  std::vector<double> p;  // per sensor
};

/// p_i = (lambda * Tmu_i / max_ref_mu + (1-lambda) * Tsig_i / max_ref_sig) / 2.
/// Scores below 1 read as baseline behaviour. Zero reference maxima raise
/// DegenerateReference.
DamageScores damage_scores(const std::vector<double>& T, const std::vector<double>& t_hat,
                           double lambda);

struct ScoreMap {
  int resolution = 100;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;  // sensor bounding box
  std::vector<double> values;                     // resolution^2, row-major by y
  Point peak;
  bool peak_defined = false;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * resolution + ix]; }
};

/// Inverse-distance-weighted (power 2) interpolation over the sensor bounding
/// box; exact at sensor positions. Needs at least 3 sensors for a 2-D map.
ScoreMap build_score_map(const std::vector<double>& p, const SensorLayout& layout,
                         int resolution);

/// Sum(p_i * pos_i) / Sum(p_i); all-zero scores raise NoSignal.
Point weighted_centroid(const std::vector<double>& p, const SensorLayout& layout);

/// Closed ball: distance == radius still counts as success.
bool localization_success(const Point& estimate, const Point& truth, double radius_cm);

// x,y,score rows over the grid; PGM is 8-bit min-max scaled, top row = max y.
void write_scoremap_csv(const std::string& path, const ScoreMap& map);
void write_scoremap_pgm(const std::string& path, const ScoreMap& map);

}  // namespace midas
