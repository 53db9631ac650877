#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "types.hpp"

namespace midas {

struct ThresholdSet {
  std::vector<double> levels;  // strictly increasing, microstrain
};

/// Levels evenly spaced from 0.5 to 3 times the global sample mean.
ThresholdSet select_thresholds(const StrainSet& streams, int count = 7);
/// Fixed levels evenly spaced over [lo, hi], e.g. the 30..175 bench preset.
ThresholdSet fixed_thresholds(double lo, double hi, int count = 7);

struct CumulativeCurve {
  ThresholdSet thresholds;
  std::vector<double> dwell_s;  // time spent above each level, non-increasing
};

CumulativeCurve cumulative_counts(const double* segment, std::size_t len,
                                  const ThresholdSet& thresholds, double timestep);

// flags bits on a compressed segment
inline constexpr unsigned kSegmentFilled = 1u;    // too few events, params carried over
inline constexpr unsigned kSegmentDiverged = 2u;  // fit hit the iteration cap

struct CompressedSegment {
  int sensor_id = 0;
  int segment_index = 0;
  double A = 0.0;       // total dwell scale, seconds
  double mu = 0.0;      // microstrain
  double sigma = 1.0;   // microstrain, > 0 on a successful fit
  double residual = 0.0;
  unsigned flags = 0;
};

struct FitResult {
  double A = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  double residual = 0.0;  // RMS over curve points
  int iterations = 0;
  bool converged = false;
};

/// Least-squares fit of A/2 * erfc((eps - mu) / (sigma sqrt 2)) to the dwell
/// curve via Levenberg-Marquardt with an analytic Jacobian. Stops when the
/// relative parameter step drops below 1e-8, or after 200 iterations (best
/// iterate returned with converged = false). Throws NoEvents when fewer than
/// 3 dwell times are strictly positive.
FitResult fit_gaussian_cdf(const CumulativeCurve& curve);

/// Gaussian CDF dwell model itself, shared with tests and oracles.
double gaussian_dwell(double eps, double A, double mu, double sigma);

/// Splits one sensor series into floor(len / segment_len) segments and fits
/// each. Segments with too few events carry the previous (mu, sigma) forward
/// with A = 0 and the filled flag set; a leading run of such segments is
/// back-filled from the first fitted one.
std::vector<CompressedSegment> compress_stream(const double* series, std::size_t len,
                                               int sensor_id, const ThresholdSet& thresholds,
                                               int segment_len, double timestep);

struct CompressedSet {
  ThresholdSet thresholds;
  std::vector<std::vector<CompressedSegment>> per_sensor;  // [sensor][segment]

  std::size_t sensor_count() const { return per_sensor.size(); }
  std::size_t segment_count() const { return per_sensor.empty() ? 0 : per_sensor[0].size(); }
};

CompressedSet compress_set(const StrainSet& streams, const ThresholdSet& thresholds,
                           int segment_len);

// CSV: sensor_id,segment_index,A,mu,sigma,residual,flags
void write_compressed_csv(const std::string& path, const CompressedSet& set);
CompressedSet read_compressed_csv(const std::string& path);

}  // namespace midas
