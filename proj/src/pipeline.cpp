#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "common.hpp"
#include "csvio.hpp"
#include "simkit.hpp"
#include "spirit.hpp"
#include "util.hpp"

namespace midas {

namespace fs = std::filesystem;

std::size_t DetectionOutput::damaged_windows() const {
  std::size_t n = 0;
  for (auto f : flags) n += f;
  return n;
}

std::string render_detection_report(const DetectionOutput& out) {
  std::ostringstream s;
  s << "detection-report v1\n";
  s << "method " << method_name(out.method) << "\n";
  s << "fpr " << fmt_double(out.fpr) << "\n";
  s << "q " << fmt_double(out.q) << "\n";
  s << "n_sensors " << out.n_sensors << "\n";
  s << "n_windows " << out.flags.size() << "\n";
  s << "damaged_windows " << out.damaged_windows() << "\n";
  double frac = out.flags.empty()
                    ? 0.0
                    : static_cast<double>(out.damaged_windows()) / out.flags.size();
  s << "damaged_fraction " << fmt_double(frac) << "\n";
  for (std::size_t i = 0; i < out.thresholds.size(); ++i)
    s << "threshold " << (i + 1) << ' ' << fmt_double(out.thresholds[i]) << "\n";
  for (std::size_t w = 0; w < out.flags.size(); ++w)
    s << "window " << w << " score " << fmt_double(out.scores[w]) << " anomalous "
      << out.counts[w] << " damaged " << static_cast<int>(out.flags[w]) << "\n";
  return s.str();
}

std::string render_localization_report(const LocalizationOutput& out) {
  std::ostringstream s;
  s << "localization-report v1\n";
  s << "method " << method_name(out.method) << "\n";
  s << "lambda " << fmt_double(out.scores.lambda) << "\n";
  s << "radius_cm " << fmt_double(out.radius_cm) << "\n";
  s << "mode " << out.mode << "\n";
  s << "n_sensors " << out.layout.size() << "\n";
  s << "ref_max_t_mu " << fmt_double(out.scores.ref_max_mu) << "\n";
  s << "ref_max_t_sigma " << fmt_double(out.scores.ref_max_sigma) << "\n";
  for (std::size_t i = 0; i < out.layout.size(); ++i)
    s << "sensor " << out.layout.ids[i] << " x " << fmt_double(out.layout.pos_cm[i].x) << " y "
      << fmt_double(out.layout.pos_cm[i].y) << " t_mu " << fmt_double(out.scores.t_mu[i])
      << " t_sigma " << fmt_double(out.scores.t_sigma[i]) << " p "
      << fmt_double(out.scores.p[i]) << "\n";
  if (out.have_map) {
    s << "peak_defined " << (out.map.peak_defined ? 1 : 0) << "\n";
    s << "peak_x " << fmt_double(out.map.peak.x) << "\n";
    s << "peak_y " << fmt_double(out.map.peak.y) << "\n";
  }
  s << "estimate_x " << fmt_double(out.estimate.x) << "\n";
  s << "estimate_y " << fmt_double(out.estimate.y) << "\n";
  if (out.have_truth) {
    s << "truth_x " << fmt_double(out.truth.x) << "\n";
    s << "truth_y " << fmt_double(out.truth.y) << "\n";
    s << "success " << (out.success ? 1 : 0) << "\n";
  }
  return s.str();
}

std::string render_evaluation_report(const EvaluationOutput& out) {
  std::ostringstream s;
  s << "evaluation-report v1\n";
  s << "method " << method_name(out.method) << "\n";
  s << "balance " << (out.balanced ? "smoteenn" : "none") << "\n";
  s << "knn_k " << out.knn_k << "\n";
  s << "samples_before_undamaged " << out.before_neg << "\n";
  s << "samples_before_damaged " << out.before_pos << "\n";
  s << "samples_after_undamaged " << out.after_neg << "\n";
  s << "samples_after_damaged " << out.after_pos << "\n";
  s << "tp " << out.metrics.tp << "\n";
  s << "fp " << out.metrics.fp << "\n";
  s << "fn " << out.metrics.fn << "\n";
  s << "tn " << out.metrics.tn << "\n";
  s << "accuracy " << fmt_double(out.metrics.accuracy) << "\n";
  s << "precision " << fmt_double(out.metrics.precision) << "\n";
  s << "recall " << fmt_double(out.metrics.recall) << "\n";
  s << "f1 " << fmt_double(out.metrics.f1) << "\n";
  if (out.metrics.auroc_defined)
    s << "auroc " << fmt_double(out.metrics.auroc) << "\n";
  else
    s << "auroc undefined\n";
  return s.str();
}

DetectionOutput detect_with_model(const MiaeModel& model, const WindowDataset& dataset,
                                  double fpr, double q, Method method) {
  ErrorMatrix reference;
  reference.m = model.refs.n_calib;
  reference.n = model.refs.n_sensors;
  reference.e = model.refs.gamma_hat;

  DetectionOutput out;
  out.method = method;
  out.fpr = fpr;
  out.q = q;
  out.n_sensors = reference.n;
  out.thresholds = calibrate_thresholds(reference, fpr);
  ErrorMatrix errors = reconstruction_errors(model, dataset);
  out.scores = window_scores(errors);
  out.counts = anomalous_sensor_counts(errors, out.thresholds);
  out.flags = classify_windows(errors, out.thresholds, q);
  return out;
}

namespace {

double resolve_radius(const LocalizeConfig& cfg, const SensorLayout& layout) {
  if (cfg.radius_cm > 0.0) return cfg.radius_cm;
  double pitch = layout.min_pitch_cm();
  if (!(pitch > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cannot derive a radius from the sensor layout");
  return pitch / 2.0;
}

LocalizationOutput finish_localization(DamageScores scores, const SensorLayout& layout,
                                       const LocalizeConfig& cfg, Method method) {
  LocalizationOutput out;
  out.method = method;
  out.layout = layout;
  out.scores = std::move(scores);
  out.radius_cm = resolve_radius(cfg, layout);
  if (layout.size() >= 3) {
    out.map = build_score_map(out.scores.p, layout, cfg.resolution);
    out.have_map = true;
  }
  if (layout.size() >= 10 && out.have_map) {
    out.mode = "peak";
    out.estimate = out.map.peak;
  } else {
    out.mode = "centroid";
    out.estimate = weighted_centroid(out.scores.p, layout);
  }
  return out;
}

}  // namespace

LocalizationOutput localize_with_model(const MiaeModel& model, const WindowDataset& dataset,
                                       const LocalizeConfig& cfg, Method method) {
  auto T = relative_change(mean_delta(model, dataset), model.refs);
  return finish_localization(damage_scores(T, model.refs.t_hat, cfg.lambda), dataset.layout,
                             cfg, method);
}

namespace {

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

ThresholdSet thresholds_for(const CompressConfig& cfg, const StrainSet& reference) {
  if (cfg.threshold_mode == "fixed")
    return fixed_thresholds(cfg.threshold_lo, cfg.threshold_hi, cfg.n_thresholds);
  return select_thresholds(reference, cfg.n_thresholds);
}

void normalize_for(WindowDataset& ds, const NormStats& stats) {
  if (ds.normalized) {
    if (ds.stats.mean != stats.mean || ds.stats.stddev != stats.stddev)
      throw Error(ErrorCode::InvalidArgument,
                  "dataset was normalized with different statistics");
    return;
  }
  normalize(ds, stats);
}

MiaeModel train_for_method(const WindowDataset& normalized, const MechWeightMatrix& mech,
                           const RunConfig& cfg, Method method) {
  TrainConfig tcfg = cfg.train;
  if (method == Method::Ae) tcfg.gamma = 0.0;
  auto outcome = train_miae(normalized, mech, tcfg, cfg.run.seed);
  log_info("trained " + std::string(method_name(method)) + " for " +
           std::to_string(tcfg.epochs) + " epochs; final loss " +
           fmt_double(outcome.epoch_loss.back()));
  if (log_level() >= 2) {
    double mse = 0.0, mechanics = 0.0;
    std::vector<double> y(static_cast<std::size_t>(normalized.l) * normalized.channels());
    for (std::size_t b = 0; b < normalized.n_windows; ++b) {
      outcome.model.forward_window(normalized.window(b), y.data(), normalized.l);
      auto loss = window_loss(outcome.model, normalized.window(b), y.data(), normalized.l);
      mse += loss.mse;
      mechanics += loss.mechanics;
    }
    double inv = 1.0 / static_cast<double>(normalized.n_windows);
    log_debug("loss split: mse " + fmt_double(mse * inv) + " mechanics " +
              fmt_double(mechanics * inv) + " (weighted " +
              fmt_double(outcome.model.gamma * mechanics * inv) + ")");
  }
  return std::move(outcome.model);
}

namespace {

ErrorMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows, std::size_t n) {
  ErrorMatrix em;
  em.m = rows.size();
  em.n = n;
  em.e.reserve(em.m * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorCode::InvalidArgument, "ragged sample row");
    em.e.insert(em.e.end(), r.begin(), r.end());
  }
  return em;
}

}  // namespace

EvaluationOutput evaluate_sets(const ErrorMatrix& heldout, const ErrorMatrix& damaged,
                               const std::vector<double>& thresholds, const DetectConfig& dcfg,
                               Method method, unsigned long long seed) {
  if (heldout.n != damaged.n)
    throw Error(ErrorCode::InvalidArgument, "sensor counts differ between datasets");
  LabeledSamples samples;
  for (std::size_t w = 0; w < heldout.m; ++w) {
    samples.x.emplace_back(heldout.e.begin() + w * heldout.n,
                           heldout.e.begin() + (w + 1) * heldout.n);
    samples.y.push_back(0);
  }
  for (std::size_t w = 0; w < damaged.m; ++w) {
    samples.x.emplace_back(damaged.e.begin() + w * damaged.n,
                           damaged.e.begin() + (w + 1) * damaged.n);
    samples.y.push_back(1);
  }

  EvaluationOutput out;
  out.method = method;
  out.knn_k = dcfg.knn_k;
  out.before_neg = heldout.m;
  out.before_pos = damaged.m;

  LabeledSamples final_set;
  if (dcfg.balance) {
    Rng rng(seed);
    final_set = smote_enn_balance(samples, dcfg.knn_k, rng);
    out.balanced = true;
  } else {
    final_set = std::move(samples);
  }
  for (auto label : final_set.y)
    label ? ++out.after_pos : ++out.after_neg;

  ErrorMatrix em = matrix_from_rows(final_set.x, heldout.n);
  auto flags = classify_windows(em, thresholds, dcfg.q);
  out.metrics = evaluate(flags, final_set.y, window_scores(em));
  return out;
}

SpiritContext build_spirit_context(const CompressedSet& train, const SensorLayout& layout,
                                   const RunConfig& cfg) {
  SpiritContext ctx;
  // Segment-level stats; window stats would overweight interior segments.
  auto unit = build_windows(train, 1, 1);
  unit.layout = layout;
  ctx.seg_stats = compute_stats(unit);

  auto seq = segment_sequence(train, ctx.seg_stats);
  const std::size_t C = 2 * train.sensor_count();
  const std::size_t S = train.segment_count();
  std::size_t calib = static_cast<std::size_t>(
      std::llround(cfg.train.calib_frac * static_cast<double>(S)));
  if (calib < 2) calib = 2;
  if (calib + 2 > S)
    throw Error(ErrorCode::InsufficientData,
                "need more segments to split references for the streaming baseline");
  const std::size_t fit = S - calib;
  const std::size_t half = calib / 2;

  ctx.fit_run = spirit_track(seq.data(), fit, C, cfg.spirit.k, cfg.spirit.forgetting);
  auto run_c1 = spirit_track(seq.data() + fit * C, half, C, cfg.spirit.k, cfg.spirit.forgetting);
  auto run_c2 = spirit_track(seq.data() + (fit + half) * C, calib - half, C, cfg.spirit.k,
                             cfg.spirit.forgetting);

  ctx.x_norm.assign(C, 0.0);
  for (std::size_t s = 0; s < fit; ++s)
    for (std::size_t c = 0; c < C; ++c) ctx.x_norm[c] += seq[s * C + c] * seq[s * C + c];
  for (double& v : ctx.x_norm) {
    v /= static_cast<double>(fit);
    if (!(v > 0.0))
      throw Error(ErrorCode::DegenerateReference, "zero-variance channel in training segments");
  }

  ctx.delta_hat = spirit_delta_mean(ctx.fit_run, run_c1);
  auto probe = spirit_delta_mean(ctx.fit_run, run_c2);
  ctx.t_hat.resize(C);
  for (std::size_t c = 0; c < C; ++c)
    ctx.t_hat[c] = std::fabs(probe[c] - ctx.delta_hat[c]) / ctx.x_norm[c];

  // Detection thresholds from the training windows under the frozen basis.
  auto train_ds = build_windows(train, cfg.window.l, cfg.window.stride);
  train_ds.layout = layout;
  normalize(train_ds, ctx.seg_stats);
  auto ref_errors =
      errors_from_outputs(train_ds, spirit_reconstruct_dataset(ctx.fit_run.state, train_ds));
  ctx.thresholds = calibrate_thresholds(ref_errors, cfg.detect.fpr);
  return ctx;
}

ErrorMatrix spirit_errors(const SpiritContext& ctx, const CompressedSet& test,
                          const SensorLayout& layout, const WindowConfig& wcfg) {
  auto ds = build_windows(test, wcfg.l, wcfg.stride);
  ds.layout = layout;
  normalize(ds, ctx.seg_stats);
  return errors_from_outputs(ds, spirit_reconstruct_dataset(ctx.fit_run.state, ds));
}

DetectionOutput spirit_detect(const SpiritContext& ctx, const CompressedSet& test,
                              const SensorLayout& layout, const RunConfig& cfg) {
  DetectionOutput out;
  out.method = Method::Spirit;
  out.fpr = cfg.detect.fpr;
  out.q = cfg.detect.q;
  out.n_sensors = test.sensor_count();
  out.thresholds = ctx.thresholds;
  auto errors = spirit_errors(ctx, test, layout, cfg.window);
  out.scores = window_scores(errors);
  out.counts = anomalous_sensor_counts(errors, ctx.thresholds);
  out.flags = classify_windows(errors, ctx.thresholds, cfg.detect.q);
  return out;
}

LocalizationOutput spirit_localize(const SpiritContext& ctx, const CompressedSet& test,
                                   const SensorLayout& layout, const RunConfig& cfg) {
  auto seq = segment_sequence(test, ctx.seg_stats);
  const std::size_t C = 2 * test.sensor_count();
  auto run = spirit_track(seq.data(), test.segment_count(), C, cfg.spirit.k,
                          cfg.spirit.forgetting);
  auto probe = spirit_delta_mean(ctx.fit_run, run);
  std::vector<double> T(C);
  for (std::size_t c = 0; c < C; ++c)
    T[c] = std::fabs(probe[c] - ctx.delta_hat[c]) / ctx.x_norm[c];
  return finish_localization(damage_scores(T, ctx.t_hat, cfg.localize.lambda), layout,
                             cfg.localize, Method::Spirit);
}

void cmd_simulate(const RunConfig& cfg) {
  Plate plate = make_plate(cfg.sim);
  DamageSpec damage = damage_from_config(cfg.damage);
  auto loading = generate_loading(cfg.sim, cfg.run.seed);
  auto streams = simulate_strains(plate, loading, damage, cfg.sim, cfg.run.seed + 1);
  ensure_dir(cfg.paths.out_dir);
  write_strain_csv(join(cfg.paths.out_dir, "strain.csv"), streams);
  write_layout_csv(join(cfg.paths.out_dir, "layout.csv"), plate.layout);
  log_info("simulated " + std::to_string(streams.sample_count()) + " samples on " +
           std::to_string(streams.sensor_count()) + " sensors");
}

void cmd_compress(const RunConfig& cfg) {
  auto streams = read_strain_csv(join(cfg.paths.data_dir, "strain.csv"));
  auto thresholds = thresholds_for(cfg.compress, streams);
  auto set = compress_set(streams, thresholds, cfg.compress.segment_len);
  ensure_dir(cfg.paths.out_dir);
  write_compressed_csv(join(cfg.paths.out_dir, "compressed.csv"), set);
  log_info("compressed into " + std::to_string(set.segment_count()) + " segments per sensor");
}

void cmd_window(const RunConfig& cfg) {
  auto set = read_compressed_csv(join(cfg.paths.data_dir, "compressed.csv"));
  auto dataset = build_windows(set, cfg.window.l, cfg.window.stride);
  dataset.layout = read_layout_csv(join(cfg.paths.data_dir, "layout.csv"));
  dataset.stats = compute_stats(dataset);
  save_dataset(join(cfg.paths.out_dir, "dataset"), dataset);
  log_info("built " + std::to_string(dataset.n_windows) + " windows");
}

void cmd_train(const RunConfig& cfg) {
  if (cfg.run.method == Method::Spirit)
    throw Error(ErrorCode::Config,
                "the streaming baseline keeps no model file; use baseline-spirit");
  auto dataset = load_dataset(join(cfg.paths.data_dir, "dataset"));
  auto raw = read_strain_csv(join(cfg.paths.data_dir, "strain.csv"));
  auto mech = build_weight_matrix(raw, dataset.layout, cfg.train.temp_center_scale);
  normalize_for(dataset, dataset.stats);
  MiaeModel model = train_for_method(dataset, mech, cfg, cfg.run.method);
  save_model(cfg.paths.model_file, model);
  log_info("model written to " + cfg.paths.model_file);
}

void cmd_detect(const RunConfig& cfg) {
  if (cfg.run.method == Method::Spirit)
    throw Error(ErrorCode::Config,
                "the streaming baseline keeps no model file; use baseline-spirit");
  auto model = load_model(cfg.paths.model_file);
  auto dataset = load_dataset(join(cfg.paths.data_dir, "dataset"));
  normalize_for(dataset, model.stats);
  auto out = detect_with_model(model, dataset, cfg.detect.fpr, cfg.detect.q, cfg.run.method);
  ensure_dir(cfg.paths.out_dir);
  atomic_write_file(join(cfg.paths.out_dir, "detection.txt"), render_detection_report(out));
}

void cmd_localize(const RunConfig& cfg) {
  if (cfg.run.method == Method::Spirit)
    throw Error(ErrorCode::Config,
                "the streaming baseline keeps no model file; use baseline-spirit");
  auto model = load_model(cfg.paths.model_file);
  auto dataset = load_dataset(join(cfg.paths.data_dir, "dataset"));
  normalize_for(dataset, model.stats);
  auto out = localize_with_model(model, dataset, cfg.localize, cfg.run.method);
  if (cfg.damage.kind != "none") {
    out.have_truth = true;
    out.truth = {cfg.damage.center_x_cm, cfg.damage.center_y_cm};
    out.success = localization_success(out.estimate, out.truth, out.radius_cm);
  }
  ensure_dir(cfg.paths.out_dir);
  atomic_write_file(join(cfg.paths.out_dir, "localization.txt"),
                    render_localization_report(out));
  if (out.have_map) {
    write_scoremap_csv(join(cfg.paths.out_dir, "scoremap.csv"), out.map);
    if (cfg.localize.emit_pgm) write_scoremap_pgm(join(cfg.paths.out_dir, "scoremap.pgm"), out.map);
  }
}

void cmd_evaluate(const RunConfig& cfg) {
  if (cfg.run.method == Method::Spirit)
    throw Error(ErrorCode::Config,
                "the streaming baseline keeps no model file; use baseline-spirit");
  auto model = load_model(cfg.paths.model_file);
  auto heldout = load_dataset(join(cfg.paths.data_dir, "heldout/dataset"));
  auto damaged = load_dataset(join(cfg.paths.data_dir, "damaged/dataset"));
  normalize_for(heldout, model.stats);
  normalize_for(damaged, model.stats);

  ErrorMatrix reference;
  reference.m = model.refs.n_calib;
  reference.n = model.refs.n_sensors;
  reference.e = model.refs.gamma_hat;
  auto thresholds = calibrate_thresholds(reference, cfg.detect.fpr);

  auto out = evaluate_sets(reconstruction_errors(model, heldout),
                           reconstruction_errors(model, damaged), thresholds, cfg.detect,
                           cfg.run.method, cfg.run.seed);
  ensure_dir(cfg.paths.out_dir);
  atomic_write_file(join(cfg.paths.out_dir, "evaluation.txt"), render_evaluation_report(out));
}

void cmd_pipeline(const RunConfig& cfg) {
  const auto& out_dir = cfg.paths.out_dir;
  Plate plate = make_plate(cfg.sim);
  DamageSpec damage = damage_from_config(cfg.damage);
  if (damage.kind == DamageSpec::Kind::None)
    log_warn("pipeline damage kind is 'none'; the damaged stream will be healthy");

  // One continuous loading record split in time, as on a monitored structure:
  // the model trains on the head of the recording and is evaluated on the
  // rest, with damage applied only to the final span.
  SimConfig whole = cfg.sim;
  whole.duration_s = cfg.pipeline.train_duration_s + cfg.pipeline.heldout_duration_s +
                     cfg.pipeline.damaged_duration_s;
  auto loading = generate_loading(whole, cfg.run.seed);
  auto count_for = [&](double duration_s) {
    return static_cast<std::size_t>(std::llround(duration_s / cfg.sim.timestep_s));
  };
  const std::size_t n_train_s = count_for(cfg.pipeline.train_duration_s);
  const std::size_t n_heldout_s = count_for(cfg.pipeline.heldout_duration_s);
  const std::size_t n_damaged_s = loading.series.size() - n_train_s - n_heldout_s;

  auto train_streams = simulate_strains(plate, slice_loading(loading, 0, n_train_s),
                                        DamageSpec{}, cfg.sim, cfg.run.seed + 1);
  auto heldout_streams =
      simulate_strains(plate, slice_loading(loading, n_train_s, n_heldout_s), DamageSpec{},
                       cfg.sim, cfg.run.seed + 2);
  auto damaged_streams =
      simulate_strains(plate, slice_loading(loading, n_train_s + n_heldout_s, n_damaged_s),
                       damage, cfg.sim, cfg.run.seed + 3);

  auto thresholds = thresholds_for(cfg.compress, train_streams);
  auto train_set = compress_set(train_streams, thresholds, cfg.compress.segment_len);
  auto heldout_set = compress_set(heldout_streams, thresholds, cfg.compress.segment_len);
  auto damaged_set = compress_set(damaged_streams, thresholds, cfg.compress.segment_len);

  ensure_dir(out_dir);
  write_layout_csv(join(out_dir, "layout.csv"), plate.layout);
  for (auto [name, set] : {std::pair<const char*, const CompressedSet*>{"train", &train_set},
                           {"heldout", &heldout_set},
                           {"damaged", &damaged_set}}) {
    std::string dir = (fs::path(out_dir) / name).string();
    ensure_dir(dir);
    write_compressed_csv((fs::path(dir) / "compressed.csv").string(), *set);
  }

  auto train_ds = build_windows(train_set, cfg.window.l, cfg.window.stride);
  auto heldout_ds = build_windows(heldout_set, cfg.window.l, cfg.window.stride);
  auto damaged_ds = build_windows(damaged_set, cfg.window.l, cfg.window.stride);
  train_ds.layout = heldout_ds.layout = damaged_ds.layout = plate.layout;
  auto stats = compute_stats(train_ds);
  train_ds.stats = heldout_ds.stats = damaged_ds.stats = stats;
  for (auto [name, ds] : {std::pair<const char*, const WindowDataset*>{"train", &train_ds},
                          {"heldout", &heldout_ds},
                          {"damaged", &damaged_ds}})
    save_dataset((fs::path(out_dir) / name / "dataset").string(), *ds);

  DetectionOutput det_heldout, det_damaged;
  LocalizationOutput loc;
  EvaluationOutput eval;
  std::string model_line = "model none\n";

  if (cfg.run.method == Method::Spirit) {
    auto ctx = build_spirit_context(train_set, plate.layout, cfg);
    det_heldout = spirit_detect(ctx, heldout_set, plate.layout, cfg);
    det_damaged = spirit_detect(ctx, damaged_set, plate.layout, cfg);
    eval = evaluate_sets(spirit_errors(ctx, heldout_set, plate.layout, cfg.window),
                         spirit_errors(ctx, damaged_set, plate.layout, cfg.window),
                         ctx.thresholds, cfg.detect, Method::Spirit, cfg.run.seed);
    loc = spirit_localize(ctx, damaged_set, plate.layout, cfg);
  } else {
    auto mech = build_weight_matrix(train_streams, plate.layout, cfg.train.temp_center_scale);
    normalize(train_ds, stats);
    normalize(heldout_ds, stats);
    normalize(damaged_ds, stats);
    MiaeModel model = train_for_method(train_ds, mech, cfg, cfg.run.method);
    save_model(cfg.paths.model_file, model);
    model_line = "model " + cfg.paths.model_file + "\n";

    det_heldout = detect_with_model(model, heldout_ds, cfg.detect.fpr, cfg.detect.q,
                                    cfg.run.method);
    det_damaged = detect_with_model(model, damaged_ds, cfg.detect.fpr, cfg.detect.q,
                                    cfg.run.method);
    eval = evaluate_sets(reconstruction_errors(model, heldout_ds),
                         reconstruction_errors(model, damaged_ds), det_heldout.thresholds,
                         cfg.detect, cfg.run.method, cfg.run.seed);
    loc = localize_with_model(model, damaged_ds, cfg.localize, cfg.run.method);
  }

  if (cfg.damage.kind != "none") {
    loc.have_truth = true;
    loc.truth = {cfg.damage.center_x_cm, cfg.damage.center_y_cm};
    loc.success = localization_success(loc.estimate, loc.truth, loc.radius_cm);
  }

  atomic_write_file(join(out_dir, "detection_heldout.txt"),
                    render_detection_report(det_heldout));
  atomic_write_file(join(out_dir, "detection_damaged.txt"),
                    render_detection_report(det_damaged));
  atomic_write_file(join(out_dir, "evaluation.txt"), render_evaluation_report(eval));
  atomic_write_file(join(out_dir, "localization.txt"), render_localization_report(loc));
  if (loc.have_map) {
    write_scoremap_csv(join(out_dir, "scoremap.csv"), loc.map);
    if (cfg.localize.emit_pgm) write_scoremap_pgm(join(out_dir, "scoremap.pgm"), loc.map);
  }

  std::ostringstream summary;
  summary << "pipeline-summary v1\n";
  summary << "method " << method_name(cfg.run.method) << "\n";
  summary << "seed " << cfg.run.seed << "\n";
  summary << "n_sensors " << plate.layout.size() << "\n";
  summary << "train_windows " << train_ds.n_windows << "\n";
  summary << "heldout_windows " << heldout_ds.n_windows << "\n";
  summary << "damaged_windows " << damaged_ds.n_windows << "\n";
  summary << "heldout_flagged " << det_heldout.damaged_windows() << "\n";
  summary << "damaged_flagged " << det_damaged.damaged_windows() << "\n";
  summary << "f1 " << fmt_double(eval.metrics.f1) << "\n";
  if (eval.metrics.auroc_defined)
    summary << "auroc " << fmt_double(eval.metrics.auroc) << "\n";
  else
    summary << "auroc undefined\n";
  summary << "estimate_x " << fmt_double(loc.estimate.x) << "\n";
  summary << "estimate_y " << fmt_double(loc.estimate.y) << "\n";
  if (loc.have_truth) {
    summary << "truth_x " << fmt_double(loc.truth.x) << "\n";
    summary << "truth_y " << fmt_double(loc.truth.y) << "\n";
    summary << "success " << (loc.success ? 1 : 0) << "\n";
  }
  summary << model_line;
  atomic_write_file(join(out_dir, "summary.txt"), summary.str());
}

void cmd_baseline_spirit(const RunConfig& cfg) {
  RunConfig local = cfg;
  local.run.method = Method::Spirit;
  cmd_pipeline(local);
}

}  // namespace midas
