#pragma once

#include <cstddef>
#include <vector>

#include "compress.hpp"
#include "windowing.hpp"

namespace midas {

/// Incremental PCA tracker (projection-approximation recursion with
/// forgetting). Basis columns are re-orthonormalized after every update.
struct SpiritState {
  std::size_t dim = 0;
  int k = 2;
  double forgetting = 0.995;
  std::vector<double> basis;   // k vectors of length dim, vector-major
  std::vector<double> energy;  // per tracked direction
  long steps = 0;

  double at(int j, std::size_t i) const { return basis[static_cast<std::size_t>(j) * dim + i]; }
};

SpiritState spirit_init(std::size_t dim, int k, double forgetting);

void spirit_update(SpiritState& state, const double* x);

/// max |<w_i, w_j> - delta_ij| over all basis pairs.
double orthonormality_error(const SpiritState& state);

/// Coefficients of x on the tracked basis (k values).
std::vector<double> spirit_project(const SpiritState& state, const double* x);

/// Rank-k reconstruction W W^T x.
void spirit_reconstruct_row(const SpiritState& state, const double* x, double* out);

/// Full pass over a sample sequence, recording the basis after every step.
struct SpiritRun {
  SpiritState state;
  std::size_t steps = 0;
  std::vector<double> snapshots;  // steps x (k * dim), same layout as basis
};

SpiritRun spirit_track(const double* seq, std::size_t steps, std::size_t dim, int k,
                       double forgetting);

/// Per paired step and coordinate, the Euclidean distance between the two
/// runs' first-two basis coordinates. Sequences of unequal length are
/// truncated to the shorter one (logged). Layout: steps x dim.
std::vector<double> spirit_delta_steps(const SpiritRun& a, const SpiritRun& b,
                                       std::size_t& paired_steps);

/// Mean over paired steps of spirit_delta_steps, per coordinate.
std::vector<double> spirit_delta_mean(const SpiritRun& a, const SpiritRun& b);

/// Rank-k reconstructions of every window step under a frozen basis, in the
/// dataset's flat tensor layout (feeds the shared error-matrix path).
std::vector<double> spirit_reconstruct_dataset(const SpiritState& state,
                                               const WindowDataset& dataset);

/// Per-segment z-scored (mu_1..mu_N, sigma_1..sigma_N) vectors, S x 2N flat.
std::vector<double> segment_sequence(const CompressedSet& segments, const NormStats& stats);

}  // namespace midas
