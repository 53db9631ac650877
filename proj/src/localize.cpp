#include "localize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "util.hpp"

namespace midas {

std::vector<double> mean_delta(const MiaeModel& model, const WindowDataset& dataset) {
  if (dataset.n_windows == 0) throw Error(ErrorCode::InvalidArgument, "empty dataset");
  auto outputs = forward_dataset(model, dataset);
  const std::size_t C = dataset.channels();
  std::vector<double> mean(C, 0.0), delta(C);
  const std::size_t per = static_cast<std::size_t>(dataset.l) * C;
  for (std::size_t b = 0; b < dataset.n_windows; ++b) {
    window_delta(dataset.window(b), outputs.data() + b * per, dataset.l, C, delta.data());
    for (std::size_t c = 0; c < C; ++c) mean[c] += delta[c];
  }
  for (double& v : mean) v /= static_cast<double>(dataset.n_windows);
  return mean;
}

std::vector<double> relative_change(const std::vector<double>& test_delta_mean,
                                    const ReferenceStats& refs) {
  const std::size_t C = 2 * refs.n_sensors;
  if (test_delta_mean.size() != C || refs.delta_hat_mean.size() != C)
    throw Error(ErrorCode::InvalidArgument, "channel count mismatch in relative change");
  std::vector<double> T(C);
  for (std::size_t c = 0; c < C; ++c) {
    if (!(refs.x_norm_mean[c] > 0.0))
      throw Error(ErrorCode::DegenerateReference,
                  "zero reference norm on channel " + std::to_string(c));
    T[c] = std::fabs(test_delta_mean[c] - refs.delta_hat_mean[c]) / refs.x_norm_mean[c];
  }
  return T;
}

DamageScores damage_scores(const std::vector<double>& T, const std::vector<double>& t_hat,
                           double lambda) {
  if (T.size() != t_hat.size() || T.empty() || T.size() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "malformed T vectors");
  if (lambda < 0.0 || lambda > 1.0)
    throw Error(ErrorCode::InvalidArgument, "lambda must be in [0,1]");
  const std::size_t n = T.size() / 2;
  DamageScores s;
  s.lambda = lambda;
  s.t_mu.assign(T.begin(), T.begin() + n);
  s.t_sigma.assign(T.begin() + n, T.end());
  s.ref_max_mu = *std::max_element(t_hat.begin(), t_hat.begin() + n);
  s.ref_max_sigma = *std::max_element(t_hat.begin() + n, t_hat.end());
  if (!(s.ref_max_mu > 0.0) || !(s.ref_max_sigma > 0.0))
    throw Error(ErrorCode::DegenerateReference, "reference T maxima must be positive");
  s.p.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.p[i] = (lambda * s.t_mu[i] / s.ref_max_mu +
              (1.0 - lambda) * s.t_sigma[i] / s.ref_max_sigma) /
             2.0;
  return s;
}

ScoreMap build_score_map(const std::vector<double>& p, const SensorLayout& layout,
                         int resolution) {
  if (p.size() != layout.size())
    throw Error(ErrorCode::InvalidArgument, "score count does not match layout");
  if (layout.size() < 3)
    throw Error(ErrorCode::InvalidArgument,
                "score maps need at least 3 sensors; use the weighted centroid");
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 2");

  ScoreMap map;
  map.resolution = resolution;
  map.x0 = map.x1 = layout.pos_cm[0].x;
  map.y0 = map.y1 = layout.pos_cm[0].y;
  for (const auto& q : layout.pos_cm) {
    map.x0 = std::min(map.x0, q.x);
    map.x1 = std::max(map.x1, q.x);
    map.y0 = std::min(map.y0, q.y);
    map.y1 = std::max(map.y1, q.y);
  }
  map.values.resize(static_cast<std::size_t>(resolution) * resolution);

  double best = 0.0;
  bool first = true;
  for (int iy = 0; iy < resolution; ++iy) {
    double gy = map.y0 + (map.y1 - map.y0) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      double gx = map.x0 + (map.x1 - map.x0) * ix / (resolution - 1);
      double wsum = 0.0, acc = 0.0;
      double value = 0.0;
      bool exact = false;
      for (std::size_t s = 0; s < layout.size(); ++s) {
        double dx = gx - layout.pos_cm[s].x;
        double dy = gy - layout.pos_cm[s].y;
        double d2 = dx * dx + dy * dy;
        if (d2 < 1e-18) {
          value = p[s];
          exact = true;
          break;
        }
        double w = 1.0 / d2;
        wsum += w;
        acc += w * p[s];
      }
      if (!exact) value = acc / wsum;
      map.values[static_cast<std::size_t>(iy) * resolution + ix] = value;
      if (first || value > best) {
        best = value;
        map.peak = {gx, gy};
        first = false;
      }
    }
  }
  auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  map.peak_defined = *hi - *lo > 1e-12 * std::max(1.0, std::fabs(*hi));
  return map;
}

Point weighted_centroid(const std::vector<double>& p, const SensorLayout& layout) {
  if (p.size() != layout.size())
    throw Error(ErrorCode::InvalidArgument, "score count does not match layout");
  double sum = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "scores must be nonnegative");
    sum += p[i];
    sx += p[i] * layout.pos_cm[i].x;
    sy += p[i] * layout.pos_cm[i].y;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::NoSignal, "all damage scores are zero");
  return {sx / sum, sy / sum};
}

bool localization_success(const Point& estimate, const Point& truth, double radius_cm) {
  if (!(radius_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  return distance(estimate, truth) <= radius_cm;
}

void write_scoremap_csv(const std::string& path, const ScoreMap& map) {
  std::ostringstream out;
  out << "x,y,score\n";
  for (int iy = 0; iy < map.resolution; ++iy) {
    double gy = map.y0 + (map.y1 - map.y0) * iy / (map.resolution - 1);
    for (int ix = 0; ix < map.resolution; ++ix) {
      double gx = map.x0 + (map.x1 - map.x0) * ix / (map.resolution - 1);
      out << fmt_double(gx) << ',' << fmt_double(gy) << ',' << fmt_double(map.at(ix, iy))
          << "\n";
    }
  }
  atomic_write_file(path, out.str());
}

void write_scoremap_pgm(const std::string& path, const ScoreMap& map) {
  auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  double lo = *lo_it, hi = *hi_it;
  double span = hi - lo;
  std::ostringstream out;
  out << "P2\n" << map.resolution << ' ' << map.resolution << "\n255\n";
  for (int iy = map.resolution - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.resolution; ++ix) {
      int level = 0;
      if (span > 0.0)
        level = static_cast<int>(std::lround(255.0 * (map.at(ix, iy) - lo) / span));
      out << level << (ix + 1 == map.resolution ? "" : " ");
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

}  // namespace midas
