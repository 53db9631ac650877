#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "midas/midas.h"

namespace {

namespace fs = std::filesystem;

struct ConfigHandle {
  midas_config* cfg = midas_config_create();
  ~ConfigHandle() { midas_config_free(cfg); }
  void set(const char* key, const std::string& value) {
    REQUIRE(midas_config_set(cfg, key, value.c_str()) == MIDAS_OK);
  }
};

fs::path fresh_dir(const char* leaf) {
  fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small array and a short record so the whole chain stays fast.
void set_small_run(ConfigHandle& h, const fs::path& dir) {
  h.set("paths.out_dir", dir.string());
  h.set("paths.data_dir", dir.string());
  h.set("paths.model_file", (dir / "model.midas").string());
  h.set("sim.nx", "5");
  h.set("sim.ny", "2");
  h.set("sim.duration_s", "200");
  h.set("train.epochs", "10");
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("version and status names are stable") {
  REQUIRE(midas_version() != nullptr);
  CHECK(std::string(midas_version()) == "1.0.0");

  CHECK(std::string(midas_status_name(MIDAS_OK)) == "ok");
  CHECK(std::string(midas_status_name(MIDAS_E_CONFIG)) == "Config");
  CHECK(std::string(midas_status_name(MIDAS_E_CORRUPT_MODEL)) == "CorruptModel");
  CHECK(std::string(midas_status_name(static_cast<midas_status>(99))) == "unknown");

  CHECK(midas_status_is_validation_error(MIDAS_E_INVALID_ARGUMENT) == 1);
  CHECK(midas_status_is_validation_error(MIDAS_E_CONFIG) == 1);
  CHECK(midas_status_is_validation_error(MIDAS_E_IO) == 0);
  CHECK(midas_status_is_validation_error(MIDAS_E_CORRUPT_MODEL) == 0);
  CHECK(midas_status_is_validation_error(MIDAS_OK) == 0);
  CHECK(midas_status_is_validation_error(static_cast<midas_status>(99)) == 0);
}

TEST_CASE("config handles validate overrides and reject junk") {
  ConfigHandle h;
  REQUIRE(h.cfg != nullptr);
  CHECK(midas_config_validate(h.cfg) == MIDAS_OK);

  CHECK(midas_config_set(h.cfg, "run.seed", "7") == MIDAS_OK);
  CHECK(midas_config_set(h.cfg, "detect.fpr", "0.1") == MIDAS_OK);

  CHECK(midas_config_set(h.cfg, "no.such_key", "1") != MIDAS_OK);
  CHECK(std::string(midas_last_error()).size() > 0);
  CHECK(midas_config_set(h.cfg, "run.seed", "banana") != MIDAS_OK);

  CHECK(midas_config_set(h.cfg, "sim.nx", "0") == MIDAS_OK);
  midas_status bad = midas_config_validate(h.cfg);
  CHECK(bad == MIDAS_E_CONFIG);
  CHECK(midas_status_is_validation_error(bad) == 1);
  CHECK(std::string(midas_last_error()).find("nx") != std::string::npos);

  CHECK(midas_config_set(nullptr, "run.seed", "1") == MIDAS_E_INVALID_ARGUMENT);
  CHECK(midas_config_set(h.cfg, nullptr, "1") == MIDAS_E_INVALID_ARGUMENT);
  CHECK(midas_config_set(h.cfg, "run.seed", nullptr) == MIDAS_E_INVALID_ARGUMENT);
  CHECK(midas_config_validate(nullptr) == MIDAS_E_INVALID_ARGUMENT);
  CHECK(std::string(midas_last_error()).find("null") != std::string::npos);
}

TEST_CASE("loading a missing config file is a validation error") {
  midas_config* sentinel = reinterpret_cast<midas_config*>(0x1);
  midas_config* out = sentinel;
  midas_status st = midas_config_load("/nonexistent/midas.cfg", &out);
  CHECK(st == MIDAS_E_CONFIG);
  CHECK(out == sentinel);
  CHECK(midas_status_is_validation_error(st) == 1);
  CHECK(midas_config_load(nullptr, &out) == MIDAS_E_INVALID_ARGUMENT);
  CHECK(midas_config_load("x", nullptr) == MIDAS_E_INVALID_ARGUMENT);
}

TEST_CASE("the error message clears after a success") {
  ConfigHandle h;
  CHECK(midas_config_set(h.cfg, "no.such_key", "1") != MIDAS_OK);
  CHECK(std::string(midas_last_error()).size() > 0);
  CHECK(midas_config_validate(h.cfg) == MIDAS_OK);
  CHECK(std::string(midas_last_error()).empty());
}

TEST_CASE("stages chain through the shared library") {
  fs::path dir = fresh_dir("midas_capi_chain");
  ConfigHandle h;
  set_small_run(h, dir);

  // Running train before any dataset exists is a runtime failure, not a
  // validation one.
  midas_status early = midas_run_train(h.cfg);
  CHECK(early == MIDAS_E_IO);
  CHECK(midas_status_is_validation_error(early) == 0);

  REQUIRE(midas_run_simulate(h.cfg) == MIDAS_OK);
  CHECK(fs::exists(dir / "strain.csv"));
  CHECK(fs::exists(dir / "layout.csv"));
  REQUIRE(midas_run_compress(h.cfg) == MIDAS_OK);
  CHECK(fs::exists(dir / "compressed.csv"));
  REQUIRE(midas_run_window(h.cfg) == MIDAS_OK);
  CHECK(fs::exists(dir / "dataset"));
  REQUIRE(midas_run_train(h.cfg) == MIDAS_OK);
  REQUIRE(fs::exists(dir / "model.midas"));

  midas_model* model = nullptr;
  REQUIRE(midas_model_load((dir / "model.midas").string().c_str(), &model) == MIDAS_OK);
  size_t n_sensors = 0, channels = 0, window_len = 0;
  double gamma = -1.0;
  REQUIRE(midas_model_info(model, &n_sensors, &channels, &window_len, &gamma) == MIDAS_OK);
  CHECK(n_sensors == 10);
  CHECK(channels == 20);
  CHECK(window_len == 12);
  CHECK(gamma == 0.05);
  CHECK(midas_model_info(model, nullptr, nullptr, nullptr, nullptr) == MIDAS_OK);

  // Forward pass: same result out of place and in place.
  std::vector<double> input(3 * channels);
  for (size_t i = 0; i < input.size(); ++i) input[i] = 0.1 * static_cast<double>(i % 7) - 0.3;
  std::vector<double> out1(input.size()), inplace(input);
  REQUIRE(midas_model_forward(model, input.data(), 3, out1.data()) == MIDAS_OK);
  REQUIRE(midas_model_forward(model, inplace.data(), 3, inplace.data()) == MIDAS_OK);
  for (size_t i = 0; i < input.size(); ++i) {
    CHECK(std::isfinite(out1[i]));
    CHECK(out1[i] == inplace[i]);
  }

  CHECK(midas_model_forward(model, nullptr, 1, out1.data()) == MIDAS_E_INVALID_ARGUMENT);
  CHECK(midas_model_forward(nullptr, input.data(), 1, out1.data()) ==
        MIDAS_E_INVALID_ARGUMENT);
  midas_model_free(model);
  midas_model_free(nullptr);

  fs::remove_all(dir);
}

TEST_CASE("corrupt model files are rejected") {
  fs::path dir = fresh_dir("midas_capi_corrupt");
  fs::path file = dir / "junk.midas";
  std::ofstream(file) << "not a model\n1 2 3\n";
  midas_model* model = nullptr;
  midas_status st = midas_model_load(file.string().c_str(), &model);
  CHECK(st == MIDAS_E_CORRUPT_MODEL);
  CHECK(model == nullptr);
  CHECK(midas_model_load("/nonexistent/model.midas", &model) == MIDAS_E_IO);
  fs::remove_all(dir);
}

TEST_SUITE_END();
