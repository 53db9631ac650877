#include "compress.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "util.hpp"

namespace midas {

ThresholdSet select_thresholds(const StrainSet& streams, int count) {
  if (streams.sensor_count() == 0 || streams.sample_count() == 0)
    throw Error(ErrorCode::InvalidArgument, "no strain data for threshold selection");
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 thresholds");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& series : streams.strain) {
    for (double v : series) sum += v;
    n += series.size();
  }
  double mean = sum / static_cast<double>(n);
  if (!(mean > 0.0))
    throw Error(ErrorCode::DegenerateThresholds,
                "mean strain must be positive to place threshold levels");
  return fixed_thresholds(0.5 * mean, 3.0 * mean, count);
}

ThresholdSet fixed_thresholds(double lo, double hi, int count) {
  if (count < 2 || !(lo < hi))
    throw Error(ErrorCode::DegenerateThresholds, "threshold bounds must be increasing");
  ThresholdSet set;
  set.levels.resize(count);
  for (int k = 0; k < count; ++k)
    set.levels[k] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  return set;
}

CumulativeCurve cumulative_counts(const double* segment, std::size_t len,
                                  const ThresholdSet& thresholds, double timestep) {
  if (len == 0) throw Error(ErrorCode::InvalidArgument, "empty segment");
  if (timestep <= 0.0) throw Error(ErrorCode::InvalidArgument, "timestep must be positive");
  CumulativeCurve curve;
  curve.thresholds = thresholds;
  curve.dwell_s.resize(thresholds.levels.size());
  for (std::size_t k = 0; k < thresholds.levels.size(); ++k) {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < len; ++t)
      if (segment[t] > thresholds.levels[k]) ++hits;
    curve.dwell_s[k] = timestep * static_cast<double>(hits);
  }
  return curve;
}

double gaussian_dwell(double eps, double A, double mu, double sigma) {
  double u = (eps - mu) / (sigma * std::sqrt(2.0));
  return 0.5 * A * std::erfc(u);
}

namespace {

struct Params {
  double A, mu, sigma;
};

double sse(const CumulativeCurve& c, const Params& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.dwell_s.size(); ++k) {
    double r = gaussian_dwell(c.thresholds.levels[k], p.A, p.mu, p.sigma) - c.dwell_s[k];
    s += r * r;
  }
  return s;
}

// Solves the 3x3 system M x = b in place; returns false when singular.
bool solve3(double M[3][3], double b[3], double x[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(M[perm[r]][col]) > std::fabs(M[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    double d = M[perm[col]][col];
    if (std::fabs(d) < 1e-300) return false;
    for (int r = col + 1; r < 3; ++r) {
      double f = M[perm[r]][col] / d;
      for (int c2 = col; c2 < 3; ++c2) M[perm[r]][c2] -= f * M[perm[col]][c2];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double acc = b[perm[row]];
    for (int c2 = row + 1; c2 < 3; ++c2) acc -= M[perm[row]][c2] * x[c2];
    x[row] = acc / M[perm[row]][row];
  }
  return true;
}

Params initial_guess(const CumulativeCurve& c) {
  const auto& lev = c.thresholds.levels;
  const auto& dw = c.dwell_s;
  Params p;
  p.A = *std::max_element(dw.begin(), dw.end());
  double half = 0.5 * p.A;
  p.mu = 0.5 * (lev.front() + lev.back());
  for (std::size_t k = 0; k + 1 < dw.size(); ++k) {
    if (dw[k] >= half && dw[k + 1] <= half) {
      double span = dw[k] - dw[k + 1];
      double f = span > 0.0 ? (dw[k] - half) / span : 0.5;
      p.mu = lev[k] + f * (lev[k + 1] - lev[k]);
      break;
    }
  }
  p.sigma = 0.25 * (lev.back() - lev.front());
  if (p.sigma <= 0.0) p.sigma = 1.0;
  return p;
}

}  // namespace

FitResult fit_gaussian_cdf(const CumulativeCurve& curve) {
  const auto& lev = curve.thresholds.levels;
  const auto& dw = curve.dwell_s;
  if (lev.size() != dw.size() || lev.empty())
    throw Error(ErrorCode::InvalidArgument, "malformed cumulative curve");
  int positives = 0;
  for (double d : dw)
    if (d > 0.0) ++positives;
  if (positives < 3)
    throw Error(ErrorCode::NoEvents, "need at least 3 positive dwell times to fit");

  const double sqrt2 = std::sqrt(2.0);
  const double inv_sqrt2pi = 0.3989422804014326779;
  Params p = initial_guess(curve);
  // Tail-only curves admit a second least-squares basin with runaway A and a
  // far-negative mu; keeping A near the observed dwell scale excludes it.
  const double a_cap = 10.0 * *std::max_element(dw.begin(), dw.end());
  double err = sse(curve, p);
  double lm = 1e-3;
  FitResult res;

  for (int iter = 1; iter <= 200; ++iter) {
    res.iterations = iter;
    // Accumulate J^T J and J^T r for the current iterate.
    double JTJ[3][3] = {{0}};
    double JTr[3] = {0, 0, 0};
    for (std::size_t k = 0; k < lev.size(); ++k) {
      double u = (lev[k] - p.mu) / (p.sigma * sqrt2);
      double model = 0.5 * p.A * std::erfc(u);
      double r = model - dw[k];
      double pdf = std::exp(-u * u) * inv_sqrt2pi;  // phi((eps-mu)/sigma)
      double jA = 0.5 * std::erfc(u);
      double jmu = p.A * pdf / p.sigma;
      double jsig = p.A * pdf * u * sqrt2 / p.sigma;
      double J[3] = {jA, jmu, jsig};
      for (int a = 0; a < 3; ++a) {
        JTr[a] += J[a] * r;
        for (int b = 0; b < 3; ++b) JTJ[a][b] += J[a] * J[b];
      }
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      double M[3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M[a][b] = JTJ[a][b];
      for (int a = 0; a < 3; ++a) M[a][a] += lm * (JTJ[a][a] > 0.0 ? JTJ[a][a] : 1.0);
      double rhs[3] = {-JTr[0], -JTr[1], -JTr[2]};
      double step[3];
      if (solve3(M, rhs, step)) {
        Params cand{p.A + step[0], p.mu + step[1], p.sigma + step[2]};
        if (cand.sigma > 0.0 && cand.A >= 0.0 && cand.A <= a_cap) {
          double cand_err = sse(curve, cand);
          if (cand_err <= err) {
            double rel = 0.0;
            rel = std::max(rel, std::fabs(step[0]) / (std::fabs(p.A) + 1e-12));
            rel = std::max(rel, std::fabs(step[1]) / (std::fabs(p.mu) + 1e-12));
            rel = std::max(rel, std::fabs(step[2]) / (std::fabs(p.sigma) + 1e-12));
            p = cand;
            err = cand_err;
            lm = std::max(lm / 3.0, 1e-12);
            stepped = true;
            if (rel < 1e-8) {
              res.converged = true;
            }
            break;
          }
        }
      }
      lm *= 5.0;
    }
    if (!stepped) {
      // No acceptable step at any damping level: stationary point.
      res.converged = true;
    }
    if (res.converged) break;
  }

  res.A = p.A;
  res.mu = p.mu;
  res.sigma = p.sigma;
  res.residual = std::sqrt(err / static_cast<double>(lev.size()));
  return res;
}

std::vector<CompressedSegment> compress_stream(const double* series, std::size_t len,
                                               int sensor_id, const ThresholdSet& thresholds,
                                               int segment_len, double timestep) {
  if (segment_len < 2) throw Error(ErrorCode::InvalidArgument, "segment_len must be >= 2");
  std::size_t seg_len = static_cast<std::size_t>(segment_len);
  if (len < seg_len)
    throw Error(ErrorCode::InsufficientData, "stream shorter than one segment");
  std::size_t n_seg = len / seg_len;

  std::vector<CompressedSegment> out(n_seg);
  bool have_prev = false;
  double prev_mu = 0.0, prev_sigma = 1.0;
  for (std::size_t s = 0; s < n_seg; ++s) {
    CompressedSegment& seg = out[s];
    seg.sensor_id = sensor_id;
    seg.segment_index = static_cast<int>(s);
    auto curve = cumulative_counts(series + s * seg_len, seg_len, thresholds, timestep);
    try {
      FitResult fit = fit_gaussian_cdf(curve);
      seg.A = fit.A;
      seg.mu = fit.mu;
      seg.sigma = fit.sigma;
      seg.residual = fit.residual;
      if (!fit.converged) seg.flags |= kSegmentDiverged;
      prev_mu = seg.mu;
      prev_sigma = seg.sigma;
      have_prev = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEvents) throw;
      seg.A = 0.0;
      seg.mu = prev_mu;
      seg.sigma = prev_sigma;
      seg.flags |= kSegmentFilled;
    }
  }
  // Back-fill a leading run of event-free segments from the first real fit.
  if (have_prev) {
    std::size_t first = 0;
    while (first < n_seg && (out[first].flags & kSegmentFilled)) ++first;
    for (std::size_t s = 0; s < first; ++s) {
      out[s].mu = out[first].mu;
      out[s].sigma = out[first].sigma;
    }
  }
  return out;
}

CompressedSet compress_set(const StrainSet& streams, const ThresholdSet& thresholds,
                           int segment_len) {
  CompressedSet set;
  set.thresholds = thresholds;
  set.per_sensor.reserve(streams.sensor_count());
  for (std::size_t i = 0; i < streams.sensor_count(); ++i)
    set.per_sensor.push_back(compress_stream(streams.strain[i].data(),
                                             streams.strain[i].size(), static_cast<int>(i + 1),
                                             thresholds, segment_len, streams.timestep));
  return set;
}

void write_compressed_csv(const std::string& path, const CompressedSet& set) {
  std::ostringstream out;
  out << "# thresholds:";
  for (double v : set.thresholds.levels) out << ' ' << fmt_double(v);
  out << "\n";
  out << "sensor_id,segment_index,A,mu,sigma,residual,flags\n";
  for (const auto& sensor : set.per_sensor)
    for (const auto& seg : sensor)
      out << seg.sensor_id << ',' << seg.segment_index << ',' << fmt_double(seg.A) << ','
          << fmt_double(seg.mu) << ',' << fmt_double(seg.sigma) << ','
          << fmt_double(seg.residual) << ',' << seg.flags << "\n";
  atomic_write_file(path, out.str());
}

CompressedSet read_compressed_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  CompressedSet set;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty compressed file: " + path);
  if (line.rfind("# thresholds:", 0) == 0) {
    for (const auto& cell : split(trim(line.substr(13)), ' '))
      if (!cell.empty()) set.thresholds.levels.push_back(parse_double(cell));
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, "truncated compressed file: " + path);
  }
  if (trim(line) != "sensor_id,segment_index,A,mu,sigma,residual,flags")
    throw Error(ErrorCode::Io, "bad compressed header in " + path);
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 7) throw Error(ErrorCode::Io, "ragged compressed row in " + path);
    CompressedSegment seg;
    seg.sensor_id = static_cast<int>(parse_long(cells[0]));
    seg.segment_index = static_cast<int>(parse_long(cells[1]));
    seg.A = parse_double(cells[2]);
    seg.mu = parse_double(cells[3]);
    seg.sigma = parse_double(cells[4]);
    seg.residual = parse_double(cells[5]);
    seg.flags = static_cast<unsigned>(parse_long(cells[6]));
    if (seg.sensor_id < 1) throw Error(ErrorCode::Io, "sensor ids must start at 1");
    if (static_cast<std::size_t>(seg.sensor_id) > set.per_sensor.size())
      set.per_sensor.resize(seg.sensor_id);
    set.per_sensor[seg.sensor_id - 1].push_back(seg);
  }
  return set;
}

}  // namespace midas
