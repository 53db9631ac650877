#include "miae.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace midas {

MechWeightMatrix build_weight_matrix(const StrainSet& raw_streams, const SensorLayout& layout,
                                     double center_scale) {
  const std::size_t n = raw_streams.sensor_count();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "no sensors");
  MechWeightMatrix m;
  m.n = n;
  m.max_abs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double peak = 0.0;
    for (double v : raw_streams.strain[i]) peak = std::max(peak, std::fabs(v));
    if (peak <= 0.0)
      throw Error(ErrorCode::ZeroResponseSensor,
                  "sensor " + std::to_string(i + 1) + " never responds");
    m.max_abs[i] = peak;
  }

  std::vector<double> scaled = m.max_abs;
  if (center_scale > 0.0 && layout.size() == n) {
    double xmin = layout.pos_cm[0].x, xmax = xmin, ymin = layout.pos_cm[0].y, ymax = ymin;
    for (const auto& p : layout.pos_cm) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    double dx = (xmax - xmin) / 3.0, dy = (ymax - ymin) / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = layout.pos_cm[i];
      bool center = p.x >= xmin + dx && p.x <= xmax - dx && p.y >= ymin + dy && p.y <= ymax - dy;
      if (center) scaled[i] *= center_scale;
    }
  }

  m.w.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double lo = std::min(scaled[i], scaled[j]);
      double hi = std::max(scaled[i], scaled[j]);
      m.w[i * n + j] = lo / hi;
    }
  return m;
}

std::vector<int> default_architecture(std::size_t n_sensors) {
  if (n_sensors < 1) throw Error(ErrorCode::InvalidArgument, "need at least 1 sensor");
  int c = static_cast<int>(2 * n_sensors);
  int scale = n_sensors < 10 ? 8 : 1;
  return {c, 64 * scale, 32 * scale, 32 * scale, 64 * scale, c};
}

namespace {

constexpr int kLayers = 5;  // weight matrices between the 6 widths

void apply_layer(const std::vector<double>& w, const std::vector<double>& b, int rows, int cols,
                 const double* in, double* out, bool squash) {
  for (int r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = w.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += wr[c] * in[c];
    out[r] = squash ? std::tanh(acc) : acc;
  }
}

// Per-window activations: a[k] is l x dims[k], row-major.
struct Workspace {
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> d;
  std::vector<double> delta;  // per channel
  std::vector<double> s;      // mech pull per channel

  void resize(const std::vector<int>& dims, int l) {
    a.resize(dims.size());
    d.resize(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
      a[k].resize(static_cast<std::size_t>(l) * dims[k]);
      d[k].resize(static_cast<std::size_t>(l) * dims[k]);
    }
    delta.resize(dims.front());
    s.resize(dims.front());
  }
};

void forward_into(const MiaeModel& m, const double* in, int l, Workspace& ws) {
  const std::size_t C = m.channels();
  std::copy(in, in + static_cast<std::size_t>(l) * C, ws.a[0].begin());
  for (int k = 0; k < kLayers; ++k) {
    bool squash = k < kLayers - 1;
    for (int t = 0; t < l; ++t)
      apply_layer(m.weights[k], m.biases[k], m.dims[k + 1], m.dims[k],
                  ws.a[k].data() + static_cast<std::size_t>(t) * m.dims[k],
                  ws.a[k + 1].data() + static_cast<std::size_t>(t) * m.dims[k + 1], squash);
  }
}

struct GradBuffers {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;

  void match(const MiaeModel& m) {
    w.resize(kLayers);
    b.resize(kLayers);
    for (int k = 0; k < kLayers; ++k) {
      w[k].assign(m.weights[k].size(), 0.0);
      b[k].assign(m.biases[k].size(), 0.0);
    }
  }
  void zero() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
  }
};

LossBreakdown loss_from_parts(const MiaeModel& m, const double* in, const double* out, int l) {
  const std::size_t C = m.channels();
  const std::size_t n = m.n_sensors();
  LossBreakdown loss;
  const std::size_t entries = static_cast<std::size_t>(l) * C;
  for (std::size_t e = 0; e < entries; ++e) {
    double d = out[e] - in[e];
    loss.mse += d * d;
  }
  loss.mse /= static_cast<double>(entries);

  std::vector<double> delta(C);
  window_delta(in, out, l, C, delta.data());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dmu = delta[i] - delta[j];
      double dsig = delta[n + i] - delta[n + j];
      loss.mechanics += m.mech.at(i, j) * (dmu * dmu + dsig * dsig);
    }
  loss.total = loss.mse + m.gamma * loss.mechanics;
  return loss;
}

double term_value(const LossBreakdown& loss, LossTerm term) {
  switch (term) {
    case LossTerm::MseOnly: return loss.mse;
    case LossTerm::MechOnly: return loss.mechanics;
    case LossTerm::Total: return loss.total;
  }
  return loss.total;
}

/// Forward + backward for one window; accumulates parameter gradients of the
/// selected term into g. Returns the window's loss values.
LossBreakdown window_grad(const MiaeModel& m, const double* in, int l, LossTerm term,
                          Workspace& ws, GradBuffers& g) {
  const std::size_t C = m.channels();
  const std::size_t n = m.n_sensors();
  forward_into(m, in, l, ws);
  const double* out = ws.a[kLayers].data();
  LossBreakdown loss = loss_from_parts(m, in, out, l);

  window_delta(in, out, l, C, ws.delta.data());
  for (std::size_t i = 0; i < n; ++i) {
    double smu = 0.0, ssig = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      smu += m.mech.at(i, j) * (ws.delta[i] - ws.delta[j]);
      ssig += m.mech.at(i, j) * (ws.delta[n + i] - ws.delta[n + j]);
    }
    ws.s[i] = smu;
    ws.s[n + i] = ssig;
  }

  const double mse_w = term == LossTerm::MechOnly ? 0.0 : 2.0 / static_cast<double>(l * C);
  double mech_w = 0.0;
  if (term == LossTerm::MechOnly) mech_w = 1.0;
  if (term == LossTerm::Total) mech_w = m.gamma;

  auto& dy = ws.d[kLayers];
  for (int t = 0; t < l; ++t)
    for (std::size_t c = 0; c < C; ++c) {
      std::size_t e = static_cast<std::size_t>(t) * C + c;
      // d(mech)/dy = 4 sum_j w_ij (delta_i - delta_j) * 2 y; halves are paired
      // by sensor through ws.s.
      dy[e] = mse_w * (out[e] - in[e]) + mech_w * 8.0 * out[e] * ws.s[c];
    }

  for (int k = kLayers - 1; k >= 0; --k) {
    const int rows = m.dims[k + 1];
    const int cols = m.dims[k];
    auto& dnext = ws.d[k + 1];
    auto& dprev = ws.d[k];
    std::fill(dprev.begin(), dprev.end(), 0.0);
    const bool squash = k < kLayers - 1;
    for (int t = 0; t < l; ++t) {
      const double* at_next = ws.a[k + 1].data() + static_cast<std::size_t>(t) * rows;
      const double* at_prev = ws.a[k].data() + static_cast<std::size_t>(t) * cols;
      double* dn = dnext.data() + static_cast<std::size_t>(t) * rows;
      double* dp = dprev.data() + static_cast<std::size_t>(t) * cols;
      for (int r = 0; r < rows; ++r) {
        double dz = dn[r];
        if (squash) dz *= 1.0 - at_next[r] * at_next[r];
        g.b[k][r] += dz;
        double* gw = g.w[k].data() + static_cast<std::size_t>(r) * cols;
        const double* wr = m.weights[k].data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) {
          gw[c] += dz * at_prev[c];
          dp[c] += dz * wr[c];
        }
      }
    }
  }
  return loss;
}

}  // namespace

void MiaeModel::forward_row(const double* x, double* y) const {
  std::vector<double> cur(x, x + dims[0]);
  std::vector<double> next;
  for (int k = 0; k < kLayers; ++k) {
    next.resize(dims[k + 1]);
    apply_layer(weights[k], biases[k], dims[k + 1], dims[k], cur.data(), next.data(),
                k < kLayers - 1);
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), y);
}

void MiaeModel::forward_window(const double* in, double* out, int l_steps) const {
  const std::size_t C = channels();
  for (int t = 0; t < l_steps; ++t)
    forward_row(in + static_cast<std::size_t>(t) * C, out + static_cast<std::size_t>(t) * C);
}

std::vector<double> forward_dataset(const MiaeModel& model, const WindowDataset& dataset) {
  if (dataset.channels() != model.channels())
    throw Error(ErrorCode::InvalidArgument, "dataset channels do not match the model");
  std::vector<double> out(dataset.tensor.size());
  Workspace ws;
  ws.resize(model.dims, dataset.l);
  const std::size_t per = static_cast<std::size_t>(dataset.l) * dataset.channels();
  for (std::size_t b = 0; b < dataset.n_windows; ++b) {
    forward_into(model, dataset.window(b), dataset.l, ws);
    std::copy(ws.a[kLayers].begin(), ws.a[kLayers].end(), out.begin() + b * per);
  }
  return out;
}

void window_delta(const double* in, const double* out, int l_steps, std::size_t channels,
                  double* delta) {
  for (std::size_t c = 0; c < channels; ++c) delta[c] = 0.0;
  for (int t = 0; t < l_steps; ++t) {
    const double* x = in + static_cast<std::size_t>(t) * channels;
    const double* y = out + static_cast<std::size_t>(t) * channels;
    for (std::size_t c = 0; c < channels; ++c) delta[c] += y[c] * y[c] - x[c] * x[c];
  }
}

LossBreakdown window_loss(const MiaeModel& model, const double* in, const double* out,
                          int l_steps) {
  return loss_from_parts(model, in, out, l_steps);
}

double gradient_check(const MiaeModel& model, const double* window, int l_steps, LossTerm term) {
  Workspace ws;
  ws.resize(model.dims, l_steps);
  GradBuffers g;
  g.match(model);
  window_grad(model, window, l_steps, term, ws, g);

  MiaeModel probe = model;
  const double h = 1e-5;
  double scale = 0.0, worst = 0.0;
  std::vector<double> numeric_w;

  auto value = [&](const MiaeModel& m) {
    forward_into(m, window, l_steps, ws);
    return term_value(loss_from_parts(m, window, ws.a[kLayers].data(), l_steps), term);
  };

  std::vector<std::pair<const std::vector<double>*, std::vector<double>*>> pairs;
  for (int k = 0; k < kLayers; ++k) {
    pairs.push_back({&g.w[k], &probe.weights[k]});
    pairs.push_back({&g.b[k], &probe.biases[k]});
  }
  // First pass fixes the comparison scale at the larger of the two gradients'
  // infinity norms, then errors are measured against it.
  std::vector<std::vector<double>> numeric(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto& params = *pairs[p].second;
    numeric[p].resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      double keep = params[i];
      params[i] = keep + h;
      double up = value(probe);
      params[i] = keep - h;
      double down = value(probe);
      params[i] = keep;
      numeric[p][i] = (up - down) / (2.0 * h);
      scale = std::max({scale, std::fabs(numeric[p][i]), std::fabs((*pairs[p].first)[i])});
    }
  }
  if (scale < 1e-12) return 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t i = 0; i < numeric[p].size(); ++i)
      worst = std::max(worst, std::fabs(numeric[p][i] - (*pairs[p].first)[i]) / scale);
  return worst;
}

TrainOutcome train_miae(const WindowDataset& dataset, const MechWeightMatrix& mech,
                        const TrainConfig& cfg, unsigned long long seed) {
  if (!dataset.normalized)
    throw Error(ErrorCode::InvalidArgument, "training expects a normalized dataset");
  if (mech.n != dataset.n_sensors)
    throw Error(ErrorCode::InvalidArgument, "weight matrix size does not match dataset");
  if (dataset.n_windows < 2)
    throw Error(ErrorCode::InsufficientData, "need at least 2 windows to train and calibrate");

  const std::size_t C = dataset.channels();
  MiaeModel model;
  model.dims = cfg.arch.empty() ? default_architecture(dataset.n_sensors) : cfg.arch;
  if (model.dims.size() != 6 || model.dims.front() != static_cast<int>(C) ||
      model.dims.back() != static_cast<int>(C))
    throw Error(ErrorCode::Config, "architecture must have 6 layers with 2N outer widths");
  model.gamma = cfg.temp_halve_gamma ? cfg.gamma / 2.0 : cfg.gamma;
  model.l = dataset.l;
  model.seed = seed;
  model.mech = mech;
  model.stats = dataset.stats;

  Rng rng(seed);
  model.weights.resize(kLayers);
  model.biases.resize(kLayers);
  for (int k = 0; k < kLayers; ++k) {
    const int rows = model.dims[k + 1], cols = model.dims[k];
    model.weights[k].resize(static_cast<std::size_t>(rows) * cols);
    model.biases[k].assign(rows, 0.0);
    double limit = std::sqrt(6.0 / (rows + cols));
    for (auto& w : model.weights[k]) w = rng.uniform(-limit, limit);
  }

  // Threshold quality hinges on the calibration errors matching what unseen
  // spans of the record will produce. Two leaks are closed here. Overlapping
  // windows (stride < l) share segments, so every fit/calibration boundary
  // gets a buffer of skipped windows. A single calibration block samples one
  // stretch of the record, whose slow loading envelope need not represent the
  // rest, so the sample is spread over up to four blocks across the span.
  const std::size_t n_windows = dataset.n_windows;
  std::size_t n_calib = static_cast<std::size_t>(
      std::llround(cfg.calib_frac * static_cast<double>(n_windows)));
  n_calib = std::max<std::size_t>(1, std::min(n_calib, n_windows - 1));
  const std::size_t gap =
      dataset.stride > 0
          ? static_cast<std::size_t>((dataset.l - 1) / dataset.stride)
          : 0;
  enum class Role : unsigned char { Fit, Calib, Skip };
  std::vector<Role> role(n_windows, Role::Fit);
  std::size_t blocks = std::min<std::size_t>(4, std::max<std::size_t>(1, n_calib / 8));
  while (blocks > 1 && n_windows / blocks < n_calib / blocks + 2 * gap + 1) --blocks;
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::size_t end = (i + 1) * n_windows / blocks;
    std::size_t k = n_calib / blocks;
    if (i + 1 == blocks) k += n_calib % blocks;
    const std::size_t begin = end - k;
    for (std::size_t b = begin; b < end; ++b) role[b] = Role::Calib;
    for (std::size_t b = begin > gap ? begin - gap : 0; b < begin; ++b) role[b] = Role::Skip;
    for (std::size_t b = end; b < std::min(end + gap, n_windows); ++b) role[b] = Role::Skip;
  }
  std::vector<std::size_t> order;
  for (std::size_t b = 0; b < n_windows; ++b)
    if (role[b] == Role::Fit) order.push_back(b);
  const std::size_t n_train = order.size();
  if (n_train == 0)
    throw Error(ErrorCode::InsufficientData,
                "too few windows for a calibration split clear of the fit windows");

  GradBuffers grad, adam_m, adam_v;
  grad.match(model);
  adam_m.match(model);
  adam_v.match(model);
  Workspace ws;
  ws.resize(model.dims, dataset.l);

  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  long step = 0;

  TrainOutcome out;
  out.epoch_loss.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n_train; i > 1; --i)
      std::swap(order[i - 1], order[rng.index(i)]);

    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch) {
      std::size_t count = std::min<std::size_t>(cfg.batch, n_train - start);
      grad.zero();
      for (std::size_t i = 0; i < count; ++i) {
        LossBreakdown loss = window_grad(model, dataset.window(order[start + i]), dataset.l,
                                         LossTerm::Total, ws, grad);
        epoch_sum += loss.total;
      }
      const double inv = 1.0 / static_cast<double>(count);
      ++step;
      const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
      for (int k = 0; k < kLayers; ++k) {
        auto update = [&](std::vector<double>& params, std::vector<double>& gsum,
                          std::vector<double>& m1, std::vector<double>& m2) {
          for (std::size_t i = 0; i < params.size(); ++i) {
            double gv = gsum[i] * inv;
            m1[i] = b1 * m1[i] + (1.0 - b1) * gv;
            m2[i] = b2 * m2[i] + (1.0 - b2) * gv * gv;
            params[i] -= cfg.lr * (m1[i] / corr1) / (std::sqrt(m2[i] / corr2) + eps);
          }
        };
        update(model.weights[k], grad.w[k], adam_m.w[k], adam_v.w[k]);
        update(model.biases[k], grad.b[k], adam_m.b[k], adam_v.b[k]);
      }
    }
    double epoch_loss = epoch_sum / static_cast<double>(n_train);
    if (!std::isfinite(epoch_loss))
      throw Error(ErrorCode::TrainingDiverged,
                  "loss became non-finite at epoch " + std::to_string(epoch));
    out.epoch_loss.push_back(epoch_loss);
    if (log_level() >= 2 && (epoch % 25 == 0 || epoch + 1 == cfg.epochs))
      log_debug("epoch " + std::to_string(epoch) + " loss " + fmt_double(epoch_loss));
  }

  // Reference statistics. The fit split defines delta_hat and the norms; the
  // held-back calibration windows provide t_hat against them and the error
  // sample gamma_hat, since errors on windows the optimizer saw run low.
  std::size_t n_calib_eff = 0;
  for (std::size_t b = 0; b < n_windows; ++b)
    if (role[b] == Role::Calib) ++n_calib_eff;
  auto& refs = model.refs;
  refs.n_train = n_train;
  refs.n_calib = n_calib_eff;
  refs.n_sensors = dataset.n_sensors;
  refs.gamma_hat.assign(n_calib_eff * dataset.n_sensors, 0.0);
  refs.delta_hat_mean.assign(C, 0.0);
  refs.x_norm_mean.assign(C, 0.0);
  refs.t_hat.assign(C, 0.0);

  std::vector<double> delta(C);
  std::vector<double> calib_mean(C, 0.0);
  std::size_t calib_row = 0;
  for (std::size_t b = 0; b < n_windows; ++b) {
    if (role[b] == Role::Skip) continue;
    const double* x = dataset.window(b);
    forward_into(model, x, dataset.l, ws);
    const double* y = ws.a[kLayers].data();
    window_delta(x, y, dataset.l, C, delta.data());
    if (role[b] == Role::Fit) {
      for (std::size_t c = 0; c < C; ++c) {
        refs.delta_hat_mean[c] += delta[c];
        for (int t = 0; t < dataset.l; ++t) {
          double xv = x[static_cast<std::size_t>(t) * C + c];
          refs.x_norm_mean[c] += xv * xv;
        }
      }
    } else {
      for (std::size_t c = 0; c < C; ++c) calib_mean[c] += delta[c];
      for (std::size_t i = 0; i < dataset.n_sensors; ++i) {
        double acc = 0.0;
        for (int t = 0; t < dataset.l; ++t) {
          std::size_t e1 = static_cast<std::size_t>(t) * C + i;
          std::size_t e2 = static_cast<std::size_t>(t) * C + dataset.n_sensors + i;
          double d1 = y[e1] - x[e1];
          double d2 = y[e2] - x[e2];
          acc += d1 * d1 + d2 * d2;
        }
        refs.gamma_hat[calib_row * dataset.n_sensors + i] =
            acc / static_cast<double>(2 * dataset.l);
      }
      ++calib_row;
    }
  }
  for (std::size_t c = 0; c < C; ++c) {
    refs.delta_hat_mean[c] /= static_cast<double>(n_train);
    refs.x_norm_mean[c] /= static_cast<double>(n_train);
    calib_mean[c] /= static_cast<double>(n_calib_eff);
    if (refs.x_norm_mean[c] <= 0.0)
      throw Error(ErrorCode::DegenerateReference,
                  "channel " + std::to_string(c) + " has zero input norm");
    refs.t_hat[c] = std::fabs(calib_mean[c] - refs.delta_hat_mean[c]) / refs.x_norm_mean[c];
  }

  out.model = std::move(model);
  return out;
}

namespace {

void put_vec(std::ostringstream& out, const char* tag, const std::vector<double>& v) {
  out << tag;
  for (double x : v) out << ' ' << fmt_double(x);
  out << "\n";
}

struct Reader {
  std::istringstream in;
  std::string path;

  explicit Reader(std::string text, std::string origin)
      : in(std::move(text)), path(std::move(origin)) {}

  std::vector<std::string> expect(const std::string& tag, std::size_t args) {
    std::string line;
    if (!std::getline(in, line))
      throw Error(ErrorCode::CorruptModel, path + ": truncated before '" + tag + "'");
    auto cells = split(trim(line), ' ');
    if (cells.empty() || cells[0] != tag)
      throw Error(ErrorCode::CorruptModel, path + ": expected '" + tag + "' line");
    if (args != static_cast<std::size_t>(-1) && cells.size() != args + 1)
      throw Error(ErrorCode::CorruptModel, path + ": bad field count on '" + tag + "'");
    return cells;
  }

  std::vector<double> doubles(const std::string& tag, std::size_t count) {
    auto cells = expect(tag, count);
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = parse_double(cells[i + 1]);
    return v;
  }
};

}  // namespace

void save_model(const std::string& path, const MiaeModel& model) {
  std::ostringstream out;
  out << "midas-model v1\n";
  out << "meta seed " << model.seed << " gamma " << fmt_double(model.gamma) << " l " << model.l
      << "\n";
  out << "dims";
  for (int d : model.dims) out << ' ' << d;
  out << "\n";
  for (int k = 0; k < kLayers; ++k) {
    out << "layer " << k << ' ' << model.dims[k + 1] << ' ' << model.dims[k] << "\n";
    put_vec(out, "w", model.weights[k]);
    put_vec(out, "b", model.biases[k]);
  }
  out << "mech " << model.mech.n << "\n";
  put_vec(out, "maxabs", model.mech.max_abs);
  put_vec(out, "mechw", model.mech.w);
  out << "stats " << model.stats.channels() << "\n";
  put_vec(out, "mean", model.stats.mean);
  put_vec(out, "std", model.stats.stddev);
  out << "clamped";
  for (auto f : model.stats.clamped) out << ' ' << static_cast<int>(f);
  out << "\n";
  out << "refs " << model.refs.n_train << ' ' << model.refs.n_calib << ' '
      << model.refs.n_sensors << "\n";
  put_vec(out, "gammahat", model.refs.gamma_hat);
  put_vec(out, "deltahat", model.refs.delta_hat_mean);
  put_vec(out, "xnorm", model.refs.x_norm_mean);
  put_vec(out, "that", model.refs.t_hat);
  std::string body = out.str();
  body += "checksum " + to_hex(fnv1a64(body.data(), body.size())) + "\n";
  atomic_write_file(path, body);
}

MiaeModel load_model(const std::string& path) {
  std::string text = read_file(path);
  auto mark = text.rfind("checksum ");
  if (mark == std::string::npos || text.back() != '\n')
    throw Error(ErrorCode::CorruptModel, path + ": missing checksum");
  std::string body = text.substr(0, mark);
  std::string tail = trim(text.substr(mark));
  auto tail_cells = split(tail, ' ');
  if (tail_cells.size() != 2 || tail_cells[1] != to_hex(fnv1a64(body.data(), body.size())))
    throw Error(ErrorCode::CorruptModel, path + ": checksum mismatch");

  Reader r(std::move(body), path);
  {
    std::string line;
    if (!std::getline(r.in, line) || trim(line) != "midas-model v1")
      throw Error(ErrorCode::CorruptModel, path + ": unsupported model format or version");
  }
  MiaeModel m;
  try {
    auto meta = r.expect("meta", 6);
    if (meta[1] != "seed" || meta[3] != "gamma" || meta[5] != "l")
      throw Error(ErrorCode::CorruptModel, path + ": malformed meta line");
    m.seed = static_cast<unsigned long long>(parse_long(meta[2]));
    m.gamma = parse_double(meta[4]);
    m.l = static_cast<int>(parse_long(meta[6]));

    auto dims = r.expect("dims", 6);
    for (int i = 0; i < 6; ++i) m.dims.push_back(static_cast<int>(parse_long(dims[i + 1])));
    for (int d : m.dims)
      if (d < 1) throw Error(ErrorCode::CorruptModel, path + ": bad layer width");

    m.weights.resize(kLayers);
    m.biases.resize(kLayers);
    for (int k = 0; k < kLayers; ++k) {
      auto head = r.expect("layer", 3);
      if (parse_long(head[1]) != k || parse_long(head[2]) != m.dims[k + 1] ||
          parse_long(head[3]) != m.dims[k])
        throw Error(ErrorCode::CorruptModel, path + ": layer header mismatch");
      m.weights[k] =
          r.doubles("w", static_cast<std::size_t>(m.dims[k + 1]) * static_cast<std::size_t>(m.dims[k]));
      m.biases[k] = r.doubles("b", static_cast<std::size_t>(m.dims[k + 1]));
    }

    auto mech = r.expect("mech", 1);
    m.mech.n = static_cast<std::size_t>(parse_long(mech[1]));
    m.mech.max_abs = r.doubles("maxabs", m.mech.n);
    m.mech.w = r.doubles("mechw", m.mech.n * m.mech.n);

    auto stats = r.expect("stats", 1);
    std::size_t C = static_cast<std::size_t>(parse_long(stats[1]));
    m.stats.mean = r.doubles("mean", C);
    m.stats.stddev = r.doubles("std", C);
    auto clamped = r.expect("clamped", C);
    for (std::size_t c = 0; c < C; ++c)
      m.stats.clamped.push_back(static_cast<std::uint8_t>(parse_long(clamped[c + 1])));

    auto refs = r.expect("refs", 3);
    m.refs.n_train = static_cast<std::size_t>(parse_long(refs[1]));
    m.refs.n_calib = static_cast<std::size_t>(parse_long(refs[2]));
    m.refs.n_sensors = static_cast<std::size_t>(parse_long(refs[3]));
    m.refs.gamma_hat = r.doubles("gammahat", m.refs.n_calib * m.refs.n_sensors);
    m.refs.delta_hat_mean = r.doubles("deltahat", 2 * m.refs.n_sensors);
    m.refs.x_norm_mean = r.doubles("xnorm", 2 * m.refs.n_sensors);
    m.refs.t_hat = r.doubles("that", 2 * m.refs.n_sensors);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptModel) throw;
    throw Error(ErrorCode::CorruptModel, path + ": " + e.what());
  }

  if (m.mech.n != m.refs.n_sensors || m.dims.front() != static_cast<int>(2 * m.mech.n) ||
      m.stats.channels() != 2 * m.mech.n)
    throw Error(ErrorCode::CorruptModel, path + ": inconsistent section sizes");
  return m;
}

}  // namespace midas
