#include "config.hpp"

#include <functional>
#include <map>

#include "common.hpp"
#include "util.hpp"

namespace midas {

Method parse_method(const std::string& name) {
  if (name == "miae") return Method::Miae;
  if (name == "ae") return Method::Ae;
  if (name == "spirit") return Method::Spirit;
  throw Error(ErrorCode::Config, "unknown method '" + name + "' (expected miae|ae|spirit)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Miae: return "miae";
    case Method::Ae: return "ae";
    case Method::Spirit: return "spirit";
  }
  return "?";
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::Config, "bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  for (const auto& cell : split(v, ','))
    out.push_back(static_cast<int>(parse_long(trim(cell))));
  return out;
}

// One setter per valid "section.key"; lookups outside the table are config errors.
using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"paths.data_dir", [](RunConfig& c, const std::string& v) { c.paths.data_dir = v; }},
      {"paths.out_dir", [](RunConfig& c, const std::string& v) { c.paths.out_dir = v; }},
      {"paths.model_file", [](RunConfig& c, const std::string& v) { c.paths.model_file = v; }},

      {"run.seed", [](RunConfig& c, const std::string& v) { c.run.seed = static_cast<unsigned long long>(parse_long(v)); }},
      {"run.method", [](RunConfig& c, const std::string& v) { c.run.method = parse_method(v); }},

      {"sim.nx", [](RunConfig& c, const std::string& v) { c.sim.nx = static_cast<int>(parse_long(v)); }},
      {"sim.ny", [](RunConfig& c, const std::string& v) { c.sim.ny = static_cast<int>(parse_long(v)); }},
      {"sim.pitch_x_cm", [](RunConfig& c, const std::string& v) { c.sim.pitch_x_cm = parse_double(v); }},
      {"sim.pitch_y_cm", [](RunConfig& c, const std::string& v) { c.sim.pitch_y_cm = parse_double(v); }},
      {"sim.margin_cm", [](RunConfig& c, const std::string& v) { c.sim.margin_cm = parse_double(v); }},
      {"sim.gain_span", [](RunConfig& c, const std::string& v) { c.sim.gain_span = parse_double(v); }},
      {"sim.duration_s", [](RunConfig& c, const std::string& v) { c.sim.duration_s = parse_double(v); }},
      {"sim.timestep_s", [](RunConfig& c, const std::string& v) { c.sim.timestep_s = parse_double(v); }},
      {"sim.n_components", [](RunConfig& c, const std::string& v) { c.sim.n_components = static_cast<int>(parse_long(v)); }},
      {"sim.amp_mean", [](RunConfig& c, const std::string& v) { c.sim.amp_mean = parse_double(v); }},
      {"sim.amp_std", [](RunConfig& c, const std::string& v) { c.sim.amp_std = parse_double(v); }},
      {"sim.freq_mean_hz", [](RunConfig& c, const std::string& v) { c.sim.freq_mean_hz = parse_double(v); }},
      {"sim.freq_std_hz", [](RunConfig& c, const std::string& v) { c.sim.freq_std_hz = parse_double(v); }},
      {"sim.dc_scale", [](RunConfig& c, const std::string& v) { c.sim.dc_scale = parse_double(v); }},
      {"sim.noise_pct", [](RunConfig& c, const std::string& v) { c.sim.noise_pct = parse_double(v); }},
      {"sim.delta_t_c", [](RunConfig& c, const std::string& v) { c.sim.delta_t_c = parse_double(v); }},
      {"sim.thermal_coeff", [](RunConfig& c, const std::string& v) { c.sim.thermal_coeff = parse_double(v); }},
      {"sim.base_temp_c", [](RunConfig& c, const std::string& v) { c.sim.base_temp_c = parse_double(v); }},

      {"damage.kind", [](RunConfig& c, const std::string& v) { c.damage.kind = v; }},
      {"damage.center_x_cm", [](RunConfig& c, const std::string& v) { c.damage.center_x_cm = parse_double(v); }},
      {"damage.center_y_cm", [](RunConfig& c, const std::string& v) { c.damage.center_y_cm = parse_double(v); }},
      {"damage.radius_cm", [](RunConfig& c, const std::string& v) { c.damage.radius_cm = parse_double(v); }},
      {"damage.amplification", [](RunConfig& c, const std::string& v) { c.damage.amplification = parse_double(v); }},
      {"damage.attenuation", [](RunConfig& c, const std::string& v) { c.damage.attenuation = parse_double(v); }},

      {"compress.segment_len", [](RunConfig& c, const std::string& v) { c.compress.segment_len = static_cast<int>(parse_long(v)); }},
      {"compress.threshold_mode", [](RunConfig& c, const std::string& v) { c.compress.threshold_mode = v; }},
      {"compress.n_thresholds", [](RunConfig& c, const std::string& v) { c.compress.n_thresholds = static_cast<int>(parse_long(v)); }},
      {"compress.threshold_lo", [](RunConfig& c, const std::string& v) { c.compress.threshold_lo = parse_double(v); }},
      {"compress.threshold_hi", [](RunConfig& c, const std::string& v) { c.compress.threshold_hi = parse_double(v); }},

      {"window.l", [](RunConfig& c, const std::string& v) { c.window.l = static_cast<int>(parse_long(v)); }},
      {"window.stride", [](RunConfig& c, const std::string& v) { c.window.stride = static_cast<int>(parse_long(v)); }},

      {"train.gamma", [](RunConfig& c, const std::string& v) { c.train.gamma = parse_double(v); }},
      {"train.lr", [](RunConfig& c, const std::string& v) { c.train.lr = parse_double(v); }},
      {"train.epochs", [](RunConfig& c, const std::string& v) { c.train.epochs = static_cast<int>(parse_long(v)); }},
      {"train.batch", [](RunConfig& c, const std::string& v) { c.train.batch = static_cast<int>(parse_long(v)); }},
      {"train.calib_frac", [](RunConfig& c, const std::string& v) { c.train.calib_frac = parse_double(v); }},
      {"train.arch", [](RunConfig& c, const std::string& v) { c.train.arch = parse_int_list(v); }},
      {"train.temp_center_scale", [](RunConfig& c, const std::string& v) { c.train.temp_center_scale = parse_double(v); }},
      {"train.temp_halve_gamma", [](RunConfig& c, const std::string& v) { c.train.temp_halve_gamma = parse_bool(v, "train.temp_halve_gamma"); }},

      {"detect.fpr", [](RunConfig& c, const std::string& v) { c.detect.fpr = parse_double(v); }},
      {"detect.q", [](RunConfig& c, const std::string& v) { c.detect.q = parse_double(v); }},
      {"detect.balance", [](RunConfig& c, const std::string& v) { c.detect.balance = parse_bool(v, "detect.balance"); }},
      {"detect.knn_k", [](RunConfig& c, const std::string& v) { c.detect.knn_k = static_cast<int>(parse_long(v)); }},

      {"localize.lambda", [](RunConfig& c, const std::string& v) { c.localize.lambda = parse_double(v); }},
      {"localize.resolution", [](RunConfig& c, const std::string& v) { c.localize.resolution = static_cast<int>(parse_long(v)); }},
      {"localize.radius_cm", [](RunConfig& c, const std::string& v) { c.localize.radius_cm = parse_double(v); }},
      {"localize.delta_mode", [](RunConfig& c, const std::string& v) { c.localize.delta_mode = v; }},
      {"localize.emit_pgm", [](RunConfig& c, const std::string& v) { c.localize.emit_pgm = parse_bool(v, "localize.emit_pgm"); }},

      {"spirit.k", [](RunConfig& c, const std::string& v) { c.spirit.k = static_cast<int>(parse_long(v)); }},
      {"spirit.forgetting", [](RunConfig& c, const std::string& v) { c.spirit.forgetting = parse_double(v); }},

      {"pipeline.train_duration_s", [](RunConfig& c, const std::string& v) { c.pipeline.train_duration_s = parse_double(v); }},
      {"pipeline.heldout_duration_s", [](RunConfig& c, const std::string& v) { c.pipeline.heldout_duration_s = parse_double(v); }},
      {"pipeline.damaged_duration_s", [](RunConfig& c, const std::string& v) { c.pipeline.damaged_duration_s = parse_double(v); }},
  };
  return table;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::Config, msg);
}

}  // namespace

void apply_config_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  require(it != setters().end(), "unknown key '" + key + "'");
  it->second(cfg, value);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::string section;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      require(line.back() == ']', where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), where + ": empty section name");
      continue;
    }
    auto eq = line.find('=');
    require(eq != std::string::npos, where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), where + ": empty key");
    require(!section.empty(), where + ": key outside any [section]");
    try {
      apply_config_setting(cfg, section + "." + key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, where + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::Config, "cannot read config file: " + path);
  }
  return parse_config_text(text, path);
}

void RunConfig::validate() const {
  require(sim.nx >= 1 && sim.ny >= 1, "sim grid must be at least 1x1");
  require(sim.nx * sim.ny >= 2, "need at least 2 sensors");
  require(sim.pitch_x_cm > 0 && sim.pitch_y_cm > 0, "sensor pitch must be positive");
  require(sim.margin_cm >= 0, "sim.margin_cm must be >= 0");
  require(sim.duration_s > 0, "sim.duration_s must be positive");
  require(sim.timestep_s > 0, "sim.timestep_s must be positive");
  require(sim.n_components >= 1, "sim.n_components must be >= 1");
  require(sim.noise_pct >= 0, "sim.noise_pct must be >= 0");
  require(sim.gain_span >= 0 && sim.gain_span < 10, "sim.gain_span out of range");

  require(damage.kind == "none" || damage.kind == "crack" || damage.kind == "boundary",
          "damage.kind must be none|crack|boundary");
  require(damage.radius_cm > 0, "damage.radius_cm must be positive");
  if (damage.kind == "crack")
    require(damage.amplification > 1.0 && damage.attenuation == 1.0,
            "crack damage needs amplification > 1 and attenuation = 1");
  if (damage.kind == "boundary")
    require(damage.attenuation < 1.0 && damage.attenuation > 0.0,
            "boundary damage needs attenuation in (0, 1)");

  require(compress.segment_len >= 2, "compress.segment_len must be >= 2");
  require(compress.n_thresholds >= 3, "compress.n_thresholds must be >= 3");
  require(compress.threshold_mode == "auto" || compress.threshold_mode == "fixed",
          "compress.threshold_mode must be auto|fixed");
  if (compress.threshold_mode == "fixed")
    require(compress.threshold_lo < compress.threshold_hi,
            "compress threshold bounds must be increasing");

  require(window.l >= 1, "window.l must be >= 1");
  require(window.stride >= 1, "window.stride must be >= 1");

  require(train.gamma >= 0, "train.gamma must be >= 0");
  require(train.lr > 0, "train.lr must be positive");
  require(train.epochs >= 1, "train.epochs must be >= 1");
  require(train.batch >= 1, "train.batch must be >= 1");
  require(train.calib_frac > 0 && train.calib_frac < 1, "train.calib_frac must be in (0,1)");
  require(train.arch.empty() || train.arch.size() == 6, "train.arch must list 6 layer sizes");
  for (int d : train.arch) require(d >= 1, "train.arch entries must be >= 1");
  require(train.temp_center_scale >= 0 && train.temp_center_scale <= 1,
          "train.temp_center_scale must be in [0,1]");

  require(detect.fpr > 0 && detect.fpr < 1, "detect.fpr must be in (0,1)");
  require(detect.q > 0 && detect.q < 1, "detect.q must be in (0,1)");
  require(detect.knn_k >= 1, "detect.knn_k must be >= 1");

  require(localize.lambda >= 0 && localize.lambda <= 1, "localize.lambda must be in [0,1]");
  require(localize.resolution >= 2, "localize.resolution must be >= 2");
  require(localize.radius_cm >= 0, "localize.radius_cm must be >= 0");
  require(localize.delta_mode == "temporal" || localize.delta_mode == "elementwise",
          "localize.delta_mode must be temporal|elementwise");

  require(spirit.k >= 1, "spirit.k must be >= 1");
  require(spirit.forgetting > 0 && spirit.forgetting <= 1, "spirit.forgetting must be in (0,1]");

  require(pipeline.train_duration_s > 0 && pipeline.heldout_duration_s > 0 &&
              pipeline.damaged_duration_s > 0,
          "pipeline durations must be positive");
}

}  // namespace midas
