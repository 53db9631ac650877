#include "midas/midas.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "common.hpp"
#include "config.hpp"
#include "miae.hpp"
#include "pipeline.hpp"

struct midas_config {
  midas::RunConfig cfg;
};

struct midas_model {
  midas::MiaeModel model;
};

namespace {

thread_local std::string t_last_error;

// The public enum mirrors ErrorCode shifted by one to make room for MIDAS_OK.
static_assert(MIDAS_E_INVALID_ARGUMENT ==
              static_cast<int>(midas::ErrorCode::InvalidArgument) + 1);
static_assert(MIDAS_E_CONFIG == static_cast<int>(midas::ErrorCode::Config) + 1);
static_assert(MIDAS_E_CORRUPT_MODEL == static_cast<int>(midas::ErrorCode::CorruptModel) + 1);
static_assert(MIDAS_E_INTERNAL == static_cast<int>(midas::ErrorCode::Internal) + 1);

midas_status status_from(midas::ErrorCode code) {
  return static_cast<midas_status>(static_cast<int>(code) + 1);
}

template <typename Fn>
midas_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return MIDAS_OK;
  } catch (const midas::Error& e) {
    t_last_error = e.what();
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return MIDAS_E_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return MIDAS_E_INTERNAL;
  }
}

midas_status fail_null(const char* what) {
  t_last_error = std::string(what) + " must not be null";
  return MIDAS_E_INVALID_ARGUMENT;
}

midas_status run_stage(const midas_config* cfg, void (*stage)(const midas::RunConfig&)) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] {
    cfg->cfg.validate();
    stage(cfg->cfg);
  });
}

}  // namespace

extern "C" {

const char* midas_version(void) { return "1.0.0"; }

const char* midas_last_error(void) { return t_last_error.c_str(); }

const char* midas_status_name(midas_status status) {
  if (status == MIDAS_OK) return "ok";
  int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(midas::ErrorCode::Internal)) return "unknown";
  return midas::error_code_name(static_cast<midas::ErrorCode>(code));
}

int midas_status_is_validation_error(midas_status status) {
  if (status == MIDAS_OK) return 0;
  int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(midas::ErrorCode::Internal)) return 0;
  return midas::is_validation_error(static_cast<midas::ErrorCode>(code)) ? 1 : 0;
}

midas_config* midas_config_create(void) {
  return new (std::nothrow) midas_config{};
}

midas_status midas_config_load(const char* path, midas_config** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return guarded([&] {
    auto cfg = std::make_unique<midas_config>();
    cfg->cfg = midas::load_config(path);
    *out = cfg.release();
  });
}

midas_status midas_config_set(midas_config* cfg, const char* key, const char* value) {
  if (!cfg) return fail_null("cfg");
  if (!key) return fail_null("key");
  if (!value) return fail_null("value");
  return guarded([&] { midas::apply_config_setting(cfg->cfg, key, value); });
}

midas_status midas_config_validate(const midas_config* cfg) {
  if (!cfg) return fail_null("cfg");
  return guarded([&] { cfg->cfg.validate(); });
}

void midas_config_free(midas_config* cfg) { delete cfg; }

midas_status midas_run_simulate(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_simulate);
}
midas_status midas_run_compress(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_compress);
}
midas_status midas_run_window(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_window);
}
midas_status midas_run_train(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_train);
}
midas_status midas_run_detect(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_detect);
}
midas_status midas_run_localize(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_localize);
}
midas_status midas_run_evaluate(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_evaluate);
}
midas_status midas_run_pipeline(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_pipeline);
}
midas_status midas_run_baseline_spirit(const midas_config* cfg) {
  return run_stage(cfg, midas::cmd_baseline_spirit);
}

midas_status midas_model_load(const char* path, midas_model** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return guarded([&] {
    auto handle = std::make_unique<midas_model>();
    handle->model = midas::load_model(path);
    *out = handle.release();
  });
}

void midas_model_free(midas_model* model) { delete model; }

midas_status midas_model_info(const midas_model* model, size_t* n_sensors,
                              size_t* channels, size_t* window_len, double* gamma) {
  if (!model) return fail_null("model");
  if (n_sensors) *n_sensors = model->model.n_sensors();
  if (channels) *channels = model->model.channels();
  if (window_len) *window_len = static_cast<size_t>(model->model.l);
  if (gamma) *gamma = model->model.gamma;
  t_last_error.clear();
  return MIDAS_OK;
}

midas_status midas_model_forward(const midas_model* model, const double* input,
                                 size_t n_rows, double* output) {
  if (!model) return fail_null("model");
  if (!input) return fail_null("input");
  if (!output) return fail_null("output");
  return guarded([&] {
    const std::size_t c = model->model.channels();
    for (std::size_t r = 0; r < n_rows; ++r)
      model->model.forward_row(input + r * c, output + r * c);
  });
}

}  // extern "C"
