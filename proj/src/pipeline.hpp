#pragma once

#include <string>
#include <vector>

#include "compress.hpp"
#include "config.hpp"
#include "detect.hpp"
#include "localize.hpp"
#include "miae.hpp"
#include "spirit.hpp"

namespace midas {

struct DetectionOutput {
  Method method = Method::Miae;
  double fpr = 0.05;
  double q = 0.1;
  std::size_t n_sensors = 0;
  std::vector<double> thresholds;      // per sensor
  std::vector<double> scores;          // per window
  std::vector<int> counts;             // anomalous sensors per window
  std::vector<std::uint8_t> flags;     // damaged verdict per window

  std::size_t damaged_windows() const;
};

struct LocalizationOutput {
  Method method = Method::Miae;
  SensorLayout layout;
  DamageScores scores;
  bool have_map = false;
  ScoreMap map;
  std::string mode;  // "peak" | "centroid"
  Point estimate;
  double radius_cm = 0.0;
  bool have_truth = false;
  Point truth;
  bool success = false;
};

struct EvaluationOutput {
  Method method = Method::Miae;
  bool balanced = false;
  int knn_k = 5;
  std::size_t before_neg = 0, before_pos = 0;
  std::size_t after_neg = 0, after_pos = 0;
  MetricReport metrics;
};

// Deterministic, stable-order renderings for golden-file comparison.
std::string render_detection_report(const DetectionOutput& out);
std::string render_localization_report(const LocalizationOutput& out);
std::string render_evaluation_report(const EvaluationOutput& out);

/// Threshold calibration from the model's stored training errors plus q-rule
/// classification of the (normalized) dataset.
DetectionOutput detect_with_model(const MiaeModel& model, const WindowDataset& dataset,
                                  double fpr, double q, Method method);

/// Sensor scores from mean reconstruction norm changes plus a location
/// estimate; radius_cm <= 0 resolves to half the minimum sensor pitch.
LocalizationOutput localize_with_model(const MiaeModel& model, const WindowDataset& dataset,
                                       const LocalizeConfig& cfg, Method method);

/// Threshold selection for the configured mode: "fixed" uses the configured
/// band, anything else derives the band from the reference strain.
ThresholdSet thresholds_for(const CompressConfig& cfg, const StrainSet& reference);

/// Normalizes in place; a dataset already normalized with the same statistics
/// passes through, different statistics are an error.
void normalize_for(WindowDataset& ds, const NormStats& stats);

/// Training with the configured loss; the plain autoencoder variant drops the
/// mechanics term.
MiaeModel train_for_method(const WindowDataset& normalized, const MechWeightMatrix& mech,
                           const RunConfig& cfg, Method method);

/// Window-level metrics of heldout (label 0) versus damaged (label 1) errors,
/// optionally SMOTEENN-balanced first.
EvaluationOutput evaluate_sets(const ErrorMatrix& heldout, const ErrorMatrix& damaged,
                               const std::vector<double>& thresholds, const DetectConfig& dcfg,
                               Method method, unsigned long long seed);

/// Streaming-PCA counterpart of a trained model: a frozen basis from the
/// training segments, detection thresholds, and localization references.
struct SpiritContext {
  NormStats seg_stats;
  SpiritRun fit_run;
  std::vector<double> thresholds;
  std::vector<double> delta_hat;  // per channel
  std::vector<double> t_hat;      // per channel
  std::vector<double> x_norm;     // per channel
};

SpiritContext build_spirit_context(const CompressedSet& train, const SensorLayout& layout,
                                   const RunConfig& cfg);
ErrorMatrix spirit_errors(const SpiritContext& ctx, const CompressedSet& test,
                          const SensorLayout& layout, const WindowConfig& wcfg);
DetectionOutput spirit_detect(const SpiritContext& ctx, const CompressedSet& test,
                              const SensorLayout& layout, const RunConfig& cfg);
LocalizationOutput spirit_localize(const SpiritContext& ctx, const CompressedSet& test,
                                   const SensorLayout& layout, const RunConfig& cfg);

// Stage entry points behind the CLI and the C API. All artifact names are
// fixed; directories come from [paths]. Validation problems throw Error with
// a validation code, runtime problems with a runtime code.
void cmd_simulate(const RunConfig& cfg);
void cmd_compress(const RunConfig& cfg);
void cmd_window(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_detect(const RunConfig& cfg);
void cmd_localize(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_pipeline(const RunConfig& cfg);
/// Full pipeline with the streaming-PCA baseline in place of the autoencoder.
void cmd_baseline_spirit(const RunConfig& cfg);

}  // namespace midas
