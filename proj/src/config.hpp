#pragma once

#include <string>
#include <vector>

namespace midas {

enum class Method { Miae, Ae, Spirit };

Method parse_method(const std::string& name);
const char* method_name(Method m);

struct PathsConfig {
  std::string data_dir = "data";
  std::string out_dir = "out";
  std::string model_file = "out/model.midas";
};

struct RunSection {
  unsigned long long seed = 42;
  Method method = Method::Miae;
};

struct SimConfig {
  int nx = 10;                // sensor grid columns
  int ny = 6;                 // sensor grid rows
  double pitch_x_cm = 5.0;
  double pitch_y_cm = 7.2;
  double margin_cm = 5.0;     // plate border beyond the sensor grid
  double gain_span = 0.3;     // spatial gain field: 1 + span*mode_shape
  double duration_s = 600.0;
  double timestep_s = 0.025;
  int n_components = 100;     // sinusoids summed into the loading
  double amp_mean = 1.0;
  double amp_std = 0.3;
  double freq_mean_hz = 1.0;
  double freq_std_hz = 0.3;
  double dc_scale = 2.4;      // static offset = dc_scale * RMS of fluctuating sum
  double noise_pct = 0.005;   // multiplicative gaussian noise fraction
  double delta_t_c = 0.0;     // temperature offset from base
  double thermal_coeff = 11e-6;
  double base_temp_c = 25.0;
};

struct DamageConfig {
  std::string kind = "none";  // none | crack | boundary
  double center_x_cm = 0.0;
  double center_y_cm = 0.0;
  double radius_cm = 5.0;
  double amplification = 1.0;
  double attenuation = 1.0;
};

struct CompressConfig {
  int segment_len = 200;
  std::string threshold_mode = "auto";  // auto: from data mean; fixed: lo..hi
  int n_thresholds = 7;
  double threshold_lo = 30.0;
  double threshold_hi = 175.0;
};

struct WindowConfig {
  int l = 12;
  int stride = 2;
};

struct TrainConfig {
  double gamma = 0.05;
  double lr = 1e-3;
  int epochs = 500;
  int batch = 32;
  double calib_frac = 0.25;        // tail share of windows held for references
  std::vector<int> arch;           // empty = derive from sensor count
  double temp_center_scale = 0.0;  // 0 disables center-sensor peak scaling
  bool temp_halve_gamma = false;
};

struct DetectConfig {
  double fpr = 0.05;
  double q = 0.1;
  bool balance = true;  // SMOTEENN before metric computation
  int knn_k = 5;
};

struct LocalizeConfig {
  double lambda = 0.5;
  int resolution = 100;
  double radius_cm = 0.0;              // 0 = half the minimum sensor pitch
  std::string delta_mode = "temporal"; // temporal | elementwise
  bool emit_pgm = true;
};

struct SpiritConfig {
  int k = 2;
  double forgetting = 0.995;
};

struct PipelineConfig {
  double train_duration_s = 3050.0;
  double heldout_duration_s = 1250.0;
  double damaged_duration_s = 250.0;
};

struct RunConfig {
  PathsConfig paths;
  RunSection run;
  SimConfig sim;
  DamageConfig damage;
  CompressConfig compress;
  WindowConfig window;
  TrainConfig train;
  DetectConfig detect;
  LocalizeConfig localize;
  SpiritConfig spirit;
  PipelineConfig pipeline;

  /// Range checks shared by every entry point; throws Error(Config).
  void validate() const;
};

/// Parses the INI-style config. Unknown sections or keys are errors,
/// as are malformed values. Missing keys keep their defaults.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// Applies one "section.key" = value pair; throws Error(Config) on unknown
/// keys or malformed values. Callers re-validate() once all overrides land.
void apply_config_setting(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace midas
