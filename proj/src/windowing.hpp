#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "compress.hpp"
#include "types.hpp"

namespace midas {

struct NormStats {
  std::vector<double> mean;           // per channel
  std::vector<double> stddev;         // per channel, clamped to 1 when zero
  std::vector<std::uint8_t> clamped;  // 1 where the clamp fired

  std::size_t channels() const { return mean.size(); }
};

/// B x l x 2N tensor of compressed parameters. Channels 0..N-1 hold mu per
/// sensor, channels N..2N-1 hold sigma, in sensor-id order.
struct WindowDataset {
  int l = 12;
  int stride = 2;
  std::size_t n_sensors = 0;
  std::size_t n_windows = 0;
  std::vector<double> tensor;  // flat, index ((b * l + t) * 2N + c)
  SensorLayout layout;
  NormStats stats;
  bool normalized = false;

  std::size_t channels() const { return 2 * n_sensors; }
  double* window(std::size_t b) { return tensor.data() + b * l * channels(); }
  const double* window(std::size_t b) const { return tensor.data() + b * l * channels(); }
  double& at(std::size_t b, std::size_t t, std::size_t c) {
    return tensor[(b * l + t) * channels() + c];
  }
  double at(std::size_t b, std::size_t t, std::size_t c) const {
    return tensor[(b * l + t) * channels() + c];
  }
};

/// Window b covers segments [b*stride, b*stride + l); B = (S - l)/stride + 1.
WindowDataset build_windows(const CompressedSet& segments, int l, int stride);

NormStats compute_stats(const WindowDataset& dataset);

/// In-place z-score with the given (training) stats.
void normalize(WindowDataset& dataset, const NormStats& stats);
void denormalize(WindowDataset& dataset);

// Directory layout: tensor.csv, stats.csv, layout.csv.
void save_dataset(const std::string& dir, const WindowDataset& dataset);
WindowDataset load_dataset(const std::string& dir);

void save_stats_csv(const std::string& path, const NormStats& stats);
NormStats load_stats_csv(const std::string& path);

}  // namespace midas
