#include "spirit.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace midas {

SpiritState spirit_init(std::size_t dim, int k, double forgetting) {
  if (dim < 1 || k < 1 || static_cast<std::size_t>(k) > dim)
    throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= dim");
  if (!(forgetting > 0.0) || forgetting > 1.0)
    throw Error(ErrorCode::InvalidArgument, "forgetting factor must be in (0,1]");
  SpiritState s;
  s.dim = dim;
  s.k = k;
  s.forgetting = forgetting;
  s.basis.assign(static_cast<std::size_t>(k) * dim, 0.0);
  for (int j = 0; j < k; ++j) s.basis[static_cast<std::size_t>(j) * dim + j] = 1.0;
  s.energy.assign(k, 1e-4);
  return s;
}

namespace {

void gram_schmidt(SpiritState& s) {
  for (int j = 0; j < s.k; ++j) {
    double* wj = s.basis.data() + static_cast<std::size_t>(j) * s.dim;
    for (int p = 0; p < j; ++p) {
      const double* wp = s.basis.data() + static_cast<std::size_t>(p) * s.dim;
      double dot = 0.0;
      for (std::size_t i = 0; i < s.dim; ++i) dot += wj[i] * wp[i];
      for (std::size_t i = 0; i < s.dim; ++i) wj[i] -= dot * wp[i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < s.dim; ++i) norm += wj[i] * wj[i];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // Direction collapsed; reseed with the canonical axis least covered.
      std::fill(wj, wj + s.dim, 0.0);
      wj[static_cast<std::size_t>(j) % s.dim] = 1.0;
      for (int p = 0; p < j; ++p) {
        const double* wp = s.basis.data() + static_cast<std::size_t>(p) * s.dim;
        double dot = 0.0;
        for (std::size_t i = 0; i < s.dim; ++i) dot += wj[i] * wp[i];
        for (std::size_t i = 0; i < s.dim; ++i) wj[i] -= dot * wp[i];
      }
      norm = 0.0;
      for (std::size_t i = 0; i < s.dim; ++i) norm += wj[i] * wj[i];
      norm = std::sqrt(norm);
      if (norm < 1e-12) continue;
    }
    for (std::size_t i = 0; i < s.dim; ++i) wj[i] /= norm;
  }
}

}  // namespace

void spirit_update(SpiritState& s, const double* x) {
  std::vector<double> residual(x, x + s.dim);
  for (int j = 0; j < s.k; ++j) {
    double* wj = s.basis.data() + static_cast<std::size_t>(j) * s.dim;
    double y = 0.0;
    for (std::size_t i = 0; i < s.dim; ++i) y += wj[i] * residual[i];
    s.energy[j] = s.forgetting * s.energy[j] + y * y;
    // e = residual - y w; w += (y/d) e; then deflate with the updated w.
    double inv_d = y / s.energy[j];
    for (std::size_t i = 0; i < s.dim; ++i) {
      double e = residual[i] - y * wj[i];
      wj[i] += inv_d * e;
    }
    for (std::size_t i = 0; i < s.dim; ++i) residual[i] -= y * wj[i];
  }
  gram_schmidt(s);
  ++s.steps;
}

double orthonormality_error(const SpiritState& s) {
  double worst = 0.0;
  for (int a = 0; a < s.k; ++a)
    for (int b = a; b < s.k; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < s.dim; ++i) dot += s.at(a, i) * s.at(b, i);
      worst = std::max(worst, std::fabs(dot - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

std::vector<double> spirit_project(const SpiritState& s, const double* x) {
  std::vector<double> y(s.k, 0.0);
  for (int j = 0; j < s.k; ++j)
    for (std::size_t i = 0; i < s.dim; ++i) y[j] += s.at(j, i) * x[i];
  return y;
}

void spirit_reconstruct_row(const SpiritState& s, const double* x, double* out) {
  auto y = spirit_project(s, x);
  std::fill(out, out + s.dim, 0.0);
  for (int j = 0; j < s.k; ++j)
    for (std::size_t i = 0; i < s.dim; ++i) out[i] += y[j] * s.at(j, i);
}

SpiritRun spirit_track(const double* seq, std::size_t steps, std::size_t dim, int k,
                       double forgetting) {
  if (steps == 0) throw Error(ErrorCode::InvalidArgument, "empty sample sequence");
  SpiritRun run;
  run.state = spirit_init(dim, k, forgetting);
  run.steps = steps;
  run.snapshots.resize(steps * run.state.basis.size());
  for (std::size_t t = 0; t < steps; ++t) {
    spirit_update(run.state, seq + t * dim);
    std::copy(run.state.basis.begin(), run.state.basis.end(),
              run.snapshots.begin() + t * run.state.basis.size());
  }
  return run;
}

std::vector<double> spirit_delta_steps(const SpiritRun& a, const SpiritRun& b,
                                       std::size_t& paired_steps) {
  if (a.state.dim != b.state.dim)
    throw Error(ErrorCode::InvalidArgument, "basis dimensions differ");
  if (a.steps == 0 || b.steps == 0)
    throw Error(ErrorCode::InvalidArgument, "empty projection sequences");
  paired_steps = std::min(a.steps, b.steps);
  if (a.steps != b.steps)
    log_warn("pairing " + std::to_string(a.steps) + " vs " + std::to_string(b.steps) +
             " basis snapshots; truncating to " + std::to_string(paired_steps));
  const std::size_t dim = a.state.dim;
  const int kk = std::min({a.state.k, b.state.k, 2});
  const std::size_t stride_a = a.state.basis.size();
  const std::size_t stride_b = b.state.basis.size();
  std::vector<double> delta(paired_steps * dim);
  for (std::size_t t = 0; t < paired_steps; ++t)
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < kk; ++j) {
        double va = a.snapshots[t * stride_a + static_cast<std::size_t>(j) * dim + i];
        double vb = b.snapshots[t * stride_b + static_cast<std::size_t>(j) * dim + i];
        acc += (va - vb) * (va - vb);
      }
      delta[t * dim + i] = std::sqrt(acc);
    }
  return delta;
}

std::vector<double> spirit_delta_mean(const SpiritRun& a, const SpiritRun& b) {
  std::size_t steps = 0;
  auto delta = spirit_delta_steps(a, b, steps);
  const std::size_t dim = a.state.dim;
  std::vector<double> mean(dim, 0.0);
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += delta[t * dim + i];
  for (double& v : mean) v /= static_cast<double>(steps);
  return mean;
}

std::vector<double> spirit_reconstruct_dataset(const SpiritState& state,
                                               const WindowDataset& dataset) {
  if (state.dim != dataset.channels())
    throw Error(ErrorCode::InvalidArgument, "basis dimension does not match dataset");
  std::vector<double> out(dataset.tensor.size());
  const std::size_t C = dataset.channels();
  const std::size_t rows = dataset.n_windows * static_cast<std::size_t>(dataset.l);
  for (std::size_t r = 0; r < rows; ++r)
    spirit_reconstruct_row(state, dataset.tensor.data() + r * C, out.data() + r * C);
  return out;
}

std::vector<double> segment_sequence(const CompressedSet& segments, const NormStats& stats) {
  const std::size_t n = segments.sensor_count();
  const std::size_t S = segments.segment_count();
  if (n == 0 || S == 0) throw Error(ErrorCode::InvalidArgument, "empty compressed set");
  if (stats.channels() != 2 * n)
    throw Error(ErrorCode::InvalidArgument, "stats channel mismatch");
  for (const auto& sensor : segments.per_sensor)
    if (sensor.size() != S)
      throw Error(ErrorCode::MisalignedStreams, "sensors have differing segment counts");
  std::vector<double> seq(S * 2 * n);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t i = 0; i < n; ++i) {
      seq[s * 2 * n + i] =
          (segments.per_sensor[i][s].mu - stats.mean[i]) / stats.stddev[i];
      seq[s * 2 * n + n + i] =
          (segments.per_sensor[i][s].sigma - stats.mean[n + i]) / stats.stddev[n + i];
    }
  return seq;
}

}  // namespace midas
