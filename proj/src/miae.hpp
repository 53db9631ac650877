#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "types.hpp"
#include "windowing.hpp"

namespace midas {

/// Pairwise sensor coupling from undamaged peak responses:
/// w_ij = min(max_i, max_j) / max(max_i, max_j), so w is symmetric with unit
/// diagonal and entries in (0, 1].
struct MechWeightMatrix {
  std::size_t n = 0;
  std::vector<double> w;        // n x n row-major
  std::vector<double> max_abs;  // per-sensor max |strain| that produced w

  double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
};

/// center_scale in (0, 1] shrinks the peak of sensors in the middle third of
/// the layout bounding box before the ratio; <= 0 leaves peaks untouched.
MechWeightMatrix build_weight_matrix(const StrainSet& raw_streams, const SensorLayout& layout,
                                     double center_scale = 0.0);

/// [2N, 64, 32, 32, 64, 2N]; the three widths are scaled by 8 when N < 10.
std::vector<int> default_architecture(std::size_t n_sensors);

struct LossBreakdown {
  double mse = 0.0;
  double mechanics = 0.0;
  double total = 0.0;
};

/// Reference statistics captured at training time. The window set is split
/// into a fit part and held-back calibration blocks spread across the record,
/// separated by gaps wide enough that no segment is shared. The calibration
/// windows, which the optimizer never saw, provide both the error sample
/// gamma_hat and t_hat, the relative channel changes against the fit part.
struct ReferenceStats {
  std::size_t n_train = 0;
  std::size_t n_calib = 0;
  std::size_t n_sensors = 0;
  std::vector<double> gamma_hat;       // n_calib x N, window-major
  std::vector<double> delta_hat_mean;  // 2N, mean reconstruction norm change
  std::vector<double> x_norm_mean;     // 2N, mean squared input norm per channel
  std::vector<double> t_hat;           // 2N
};

struct MiaeModel {
  std::vector<int> dims;                      // 6 layer widths
  std::vector<std::vector<double>> weights;   // 5 matrices, dims[k+1] x dims[k]
  std::vector<std::vector<double>> biases;    // 5 vectors
  double gamma = 0.05;
  int l = 12;
  unsigned long long seed = 0;
  MechWeightMatrix mech;
  NormStats stats;
  ReferenceStats refs;

  std::size_t n_sensors() const { return mech.n; }
  std::size_t channels() const { return dims.empty() ? 0 : static_cast<std::size_t>(dims.front()); }

  /// One 2N vector through the 6-layer net (tanh hidden, linear output).
  void forward_row(const double* x, double* y) const;
  /// l rows independently; in and out are l x 2N row-major.
  void forward_window(const double* in, double* out, int l_steps) const;
};

/// Reconstructions for every window; same flat layout as dataset.tensor.
std::vector<double> forward_dataset(const MiaeModel& model, const WindowDataset& dataset);

/// Per-channel squared-norm change over the window's temporal axis:
/// delta[c] = sum_t out[t][c]^2 - sum_t in[t][c]^2.
void window_delta(const double* in, const double* out, int l_steps, std::size_t channels,
                  double* delta);

enum class LossTerm { Total, MseOnly, MechOnly };

/// Loss of one window: mse is the mean squared entry error, mechanics the
/// W-weighted sum over all sensor pairs of squared norm-change differences,
/// evaluated separately on the mu and sigma halves.
LossBreakdown window_loss(const MiaeModel& model, const double* in, const double* out,
                          int l_steps);

/// Analytic-vs-central-difference agreement (h = 1e-5) over every weight and
/// bias, reported relative to the largest gradient magnitude.
double gradient_check(const MiaeModel& model, const double* window, int l_steps, LossTerm term);

struct TrainOutcome {
  MiaeModel model;
  std::vector<double> epoch_loss;
};

/// Adam training on normalized windows; deterministic for a fixed seed.
/// Holds back a calib_frac share of windows, in gapped blocks, for the
/// reference statistics.
TrainOutcome train_miae(const WindowDataset& dataset, const MechWeightMatrix& mech,
                        const TrainConfig& cfg, unsigned long long seed);

// Versioned text serialization with a trailing checksum; load rejects version
// or checksum mismatches and truncation as CorruptModel.
void save_model(const std::string& path, const MiaeModel& model);
MiaeModel load_model(const std::string& path);

}  // namespace midas
