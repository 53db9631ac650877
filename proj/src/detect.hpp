#pragma once

#include <cstdint>
#include <vector>

#include "miae.hpp"
#include "rng.hpp"
#include "windowing.hpp"

namespace midas {

/// Per-window per-sensor reconstruction error: mean squared difference over
/// the sensor's mu and sigma channels across all window steps.
struct ErrorMatrix {
  std::size_t m = 0;  // windows
  std::size_t n = 0;  // sensors
  std::vector<double> e;

  double at(std::size_t w, std::size_t s) const { return e[w * n + s]; }
};

ErrorMatrix reconstruction_errors(const MiaeModel& model, const WindowDataset& dataset);

/// Builds the error matrix from precomputed reconstructions (dataset layout).
ErrorMatrix errors_from_outputs(const WindowDataset& dataset, const std::vector<double>& outputs);

/// Per-sensor empirical (1 - fpr) quantile of the reference errors. The
/// reference needs at least 20 windows; as fpr approaches 0 the threshold
/// becomes the reference maximum.
std::vector<double> calibrate_thresholds(const ErrorMatrix& reference, double fpr);

/// Window flagged damaged when strictly more than q * n sensors exceed their
/// thresholds.
std::vector<std::uint8_t> classify_windows(const ErrorMatrix& errors,
                                           const std::vector<double>& thresholds, double q);

std::vector<int> anomalous_sensor_counts(const ErrorMatrix& errors,
                                         const std::vector<double>& thresholds);

/// Scalar anomaly score per window: mean of its per-sensor errors.
std::vector<double> window_scores(const ErrorMatrix& errors);

struct LabeledSamples {
  std::vector<std::vector<double>> x;
  std::vector<std::uint8_t> y;  // 0 = undamaged, 1 = damaged
};

/// SMOTE oversampling of the minority class to parity (convex steps toward
/// k-nearest minority neighbors), followed by edited-nearest-neighbour
/// cleaning (samples disagreeing with the majority of their k neighbours are
/// dropped; ties keep the sample). Throws CannotBalance when either class has
/// fewer than 2 samples.
LabeledSamples smote_enn_balance(const LabeledSamples& samples, int k, Rng& rng);

struct MetricReport {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auroc = 0.0;
  bool auroc_defined = false;
};

/// Standard binary metrics; AUROC by tie-averaged rank statistic over scores.
/// Single-class truth leaves auroc_defined false.
MetricReport evaluate(const std::vector<std::uint8_t>& predictions,
                      const std::vector<std::uint8_t>& truth,
                      const std::vector<double>& scores);

}  // namespace midas
