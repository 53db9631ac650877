#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "midas/midas.h"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> sets;       // --set key=value, applied first
  std::vector<std::string> flag_sets;  // dedicated flags, applied last
  std::string model_path;              // info subcommand only
  midas_status (*stage)(const midas_config*) = nullptr;
  bool info = false;
};

int fail(midas_status st) {
  std::fprintf(stderr, "midas: %s: %s\n", midas_status_name(st), midas_last_error());
  return midas_status_is_validation_error(st) ? 1 : 2;
}

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("-c,--config", a.config, "INI configuration file");
  sub->add_option("-D,--set", a.sets, "override one section.key=value (repeatable)");
  auto push = [&a](const char* key) {
    return [&a, key](const std::string& v) {
      a.flag_sets.push_back(std::string(key) + "=" + v);
    };
  };
  sub->add_option_function<std::string>("--seed", push("run.seed"), "random seed");
  sub->add_option_function<std::string>("--method", push("run.method"), "miae|ae|spirit");
  sub->add_option_function<std::string>("--data", push("paths.data_dir"), "input directory");
  sub->add_option_function<std::string>("--out", push("paths.out_dir"), "output directory");
  sub->add_option_function<std::string>("--model", push("paths.model_file"), "model file path");
  sub->add_option_function<std::string>("--gamma", push("train.gamma"),
                                        "mechanics loss weight");
  sub->add_option_function<std::string>("--epochs", push("train.epochs"), "training epochs");
  sub->add_option_function<std::string>("--fpr", push("detect.fpr"),
                                        "per-sensor false positive rate");
  sub->add_option_function<std::string>("--q", push("detect.q"),
                                        "sensor fraction that flags a window");
  sub->add_option_function<std::string>("--lambda", push("localize.lambda"),
                                        "mu/sigma blend for damage scores");
}

int apply_sets(midas_config* cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "midas: expected section.key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    midas_status st =
        midas_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != MIDAS_OK) return fail(st);
  }
  return 0;
}

int run_stage(const Args& a) {
  midas_config* cfg = nullptr;
  if (a.config.empty()) {
    cfg = midas_config_create();
    if (!cfg) {
      std::fprintf(stderr, "midas: out of memory\n");
      return 2;
    }
  } else {
    midas_status st = midas_config_load(a.config.c_str(), &cfg);
    if (st != MIDAS_OK) return fail(st);
  }
  int rc = apply_sets(cfg, a.sets);
  if (rc == 0) rc = apply_sets(cfg, a.flag_sets);
  if (rc == 0) {
    midas_status st = a.stage(cfg);
    if (st != MIDAS_OK) rc = fail(st);
  }
  midas_config_free(cfg);
  return rc;
}

int run_info(const Args& a) {
  midas_model* model = nullptr;
  midas_status st = midas_model_load(a.model_path.c_str(), &model);
  if (st != MIDAS_OK) return fail(st);
  size_t sensors = 0, channels = 0, window = 0;
  double gamma = 0.0;
  midas_model_info(model, &sensors, &channels, &window, &gamma);
  std::printf("sensors %zu\nchannels %zu\nwindow_len %zu\ngamma %g\n", sensors, channels,
              window, gamma);
  midas_model_free(model);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strain monitoring: simulate, compress, train, detect, localize"};
  app.require_subcommand(1);
  app.set_version_flag("--version", midas_version());

  Args a;
  struct Cmd {
    const char* name;
    const char* help;
    midas_status (*fn)(const midas_config*);
  };
  const Cmd cmds[] = {
      {"simulate", "generate strain and sensor layout CSVs", midas_run_simulate},
      {"compress", "fit per-segment threshold dwell curves", midas_run_compress},
      {"window", "slice compressed segments into model windows", midas_run_window},
      {"train", "train the autoencoder and write the model file", midas_run_train},
      {"detect", "flag damaged windows with a trained model", midas_run_detect},
      {"localize", "score sensors and map the damage location", midas_run_localize},
      {"evaluate", "balanced detection metrics from heldout and damaged sets",
       midas_run_evaluate},
      {"pipeline", "run the full chain from simulation to localization", midas_run_pipeline},
      {"baseline-spirit", "full chain with the streaming-projection baseline",
       midas_run_baseline_spirit},
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, a);
    sub->callback([&a, fn = c.fn] { a.stage = fn; });
  }

  auto* info = app.add_subcommand("info", "print a model file's shape and settings");
  info->add_option("model", a.model_path, "model file")->required();
  info->callback([&a] { a.info = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Bad command lines are validation failures; help and version stay 0.
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (a.info) return run_info(a);
  return run_stage(a);
}
