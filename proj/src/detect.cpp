#include "detect.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace midas {

ErrorMatrix errors_from_outputs(const WindowDataset& dataset, const std::vector<double>& outputs) {
  if (outputs.size() != dataset.tensor.size())
    throw Error(ErrorCode::InvalidArgument, "output tensor size mismatch");
  const std::size_t C = dataset.channels();
  const std::size_t N = dataset.n_sensors;
  ErrorMatrix em;
  em.m = dataset.n_windows;
  em.n = N;
  em.e.assign(em.m * em.n, 0.0);
  for (std::size_t b = 0; b < dataset.n_windows; ++b) {
    const double* x = dataset.window(b);
    const double* y = outputs.data() + b * static_cast<std::size_t>(dataset.l) * C;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (int t = 0; t < dataset.l; ++t) {
        std::size_t mu = static_cast<std::size_t>(t) * C + i;
        std::size_t sig = static_cast<std::size_t>(t) * C + N + i;
        double d1 = y[mu] - x[mu];
        double d2 = y[sig] - x[sig];
        acc += d1 * d1 + d2 * d2;
      }
      em.e[b * N + i] = acc / static_cast<double>(2 * dataset.l);
    }
  }
  return em;
}

ErrorMatrix reconstruction_errors(const MiaeModel& model, const WindowDataset& dataset) {
  if (!dataset.normalized)
    throw Error(ErrorCode::InvalidArgument, "dataset must be normalized with the model stats");
  if (dataset.stats.mean != model.stats.mean || dataset.stats.stddev != model.stats.stddev)
    throw Error(ErrorCode::InvalidArgument, "dataset was normalized with different stats");
  return errors_from_outputs(dataset, forward_dataset(model, dataset));
}

std::vector<double> calibrate_thresholds(const ErrorMatrix& reference, double fpr) {
  if (!(fpr > 0.0) || !(fpr < 1.0))
    throw Error(ErrorCode::InvalidArgument, "fpr must be in (0,1)");
  if (reference.m < 20)
    throw Error(ErrorCode::InsufficientReference,
                "need at least 20 reference windows, have " + std::to_string(reference.m));
  std::vector<double> thresholds(reference.n);
  std::vector<double> col(reference.m);
  for (std::size_t s = 0; s < reference.n; ++s) {
    for (std::size_t w = 0; w < reference.m; ++w) col[w] = reference.at(w, s);
    std::sort(col.begin(), col.end());
    double pos = std::ceil((1.0 - fpr) * static_cast<double>(reference.m)) - 1.0;
    std::size_t idx = static_cast<std::size_t>(std::max(0.0, pos));
    if (idx >= reference.m) idx = reference.m - 1;
    thresholds[s] = col[idx];
  }
  return thresholds;
}

std::vector<int> anomalous_sensor_counts(const ErrorMatrix& errors,
                                         const std::vector<double>& thresholds) {
  if (thresholds.size() != errors.n)
    throw Error(ErrorCode::InvalidArgument, "threshold count does not match sensors");
  std::vector<int> counts(errors.m, 0);
  for (std::size_t w = 0; w < errors.m; ++w)
    for (std::size_t s = 0; s < errors.n; ++s)
      if (errors.at(w, s) > thresholds[s]) ++counts[w];
  return counts;
}

std::vector<std::uint8_t> classify_windows(const ErrorMatrix& errors,
                                           const std::vector<double>& thresholds, double q) {
  auto counts = anomalous_sensor_counts(errors, thresholds);
  std::vector<std::uint8_t> flags(errors.m, 0);
  const double bar = q * static_cast<double>(errors.n);
  for (std::size_t w = 0; w < errors.m; ++w)
    flags[w] = static_cast<double>(counts[w]) > bar ? 1 : 0;
  return flags;
}

std::vector<double> window_scores(const ErrorMatrix& errors) {
  std::vector<double> scores(errors.m, 0.0);
  for (std::size_t w = 0; w < errors.m; ++w) {
    double acc = 0.0;
    for (std::size_t s = 0; s < errors.n; ++s) acc += errors.at(w, s);
    scores[w] = acc / static_cast<double>(errors.n);
  }
  return scores;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Indices of the k nearest points to `from` among `pool`, excluding `skip`;
// ties broken by index for determinism.
std::vector<std::size_t> k_nearest(const std::vector<std::vector<double>>& pool,
                                   const std::vector<double>& from, std::size_t skip, int k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i == skip) continue;
    dist.push_back({sq_dist(pool[i], from), i});
  }
  std::size_t take = std::min<std::size_t>(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
  std::vector<std::size_t> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = dist[i].second;
  return out;
}

}  // namespace

LabeledSamples smote_enn_balance(const LabeledSamples& samples, int k, Rng& rng) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "neighbour count must be >= 1");
  if (samples.x.size() != samples.y.size() || samples.x.empty())
    throw Error(ErrorCode::InvalidArgument, "malformed labeled sample set");
  std::vector<std::vector<double>> cls[2];
  for (std::size_t i = 0; i < samples.x.size(); ++i) {
    if (samples.y[i] > 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    cls[samples.y[i]].push_back(samples.x[i]);
  }
  if (cls[0].size() < 2 || cls[1].size() < 2)
    throw Error(ErrorCode::CannotBalance, "both classes need at least 2 samples");

  int minority = cls[1].size() < cls[0].size() ? 1 : 0;
  auto& mino = cls[minority];
  const std::size_t target = cls[1 - minority].size();
  const int k_smote = std::min<int>(k, static_cast<int>(mino.size()) - 1);

  // Neighbour queries run against the original minority points only.
  const std::vector<std::vector<double>> seed_pool = mino;
  while (mino.size() < target) {
    std::size_t i = rng.index(seed_pool.size());
    auto nn = k_nearest(seed_pool, seed_pool[i], i, k_smote);
    std::size_t j = nn[rng.index(nn.size())];
    double t = rng.uniform();
    std::vector<double> synth(seed_pool[i].size());
    for (std::size_t d = 0; d < synth.size(); ++d)
      synth[d] = seed_pool[i][d] + t * (seed_pool[j][d] - seed_pool[i][d]);
    mino.push_back(std::move(synth));
  }

  LabeledSamples merged;
  for (int label = 0; label <= 1; ++label)
    for (auto& v : cls[label]) {
      merged.x.push_back(std::move(v));
      merged.y.push_back(static_cast<std::uint8_t>(label));
    }

  // ENN pass over the balanced set; removals are decided simultaneously.
  LabeledSamples cleaned;
  for (std::size_t i = 0; i < merged.x.size(); ++i) {
    auto nn = k_nearest(merged.x, merged.x[i], i, k);
    int votes = 0;
    for (std::size_t j : nn) votes += merged.y[j];
    int majority = 2 * votes > static_cast<int>(nn.size()) ? 1 : 0;
    bool tie = 2 * votes == static_cast<int>(nn.size());
    if (tie || majority == merged.y[i]) {
      cleaned.x.push_back(merged.x[i]);
      cleaned.y.push_back(merged.y[i]);
    }
  }
  return cleaned;
}

MetricReport evaluate(const std::vector<std::uint8_t>& predictions,
                      const std::vector<std::uint8_t>& truth,
                      const std::vector<double>& scores) {
  if (predictions.size() != truth.size() || scores.size() != truth.size() || truth.empty())
    throw Error(ErrorCode::InvalidArgument, "metric inputs must have equal nonzero lengths");
  MetricReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] && predictions[i]) ++r.tp;
    if (!truth[i] && predictions[i]) ++r.fp;
    if (truth[i] && !predictions[i]) ++r.fn;
    if (!truth[i] && !predictions[i]) ++r.tn;
  }
  const double total = static_cast<double>(truth.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;

  const long pos = r.tp + r.fn, neg = r.fp + r.tn;
  if (pos > 0 && neg > 0) {
    // Mann-Whitney U with tie-averaged ranks.
    std::vector<std::size_t> idx(scores.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
      double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = mean_rank;
      i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t s = 0; s < truth.size(); ++s)
      if (truth[s]) rank_sum_pos += rank[s];
    double u = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
    r.auroc = u / (static_cast<double>(pos) * static_cast<double>(neg));
    r.auroc_defined = true;
  }
  return r;
}

}  // namespace midas
