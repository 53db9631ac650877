#include <string>

#include "doctest.h"
#include "common.hpp"
#include "config.hpp"

using namespace midas;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults validate") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.run.seed == 42);
  CHECK(cfg.compress.segment_len == 200);
  CHECK(cfg.window.l == 12);
  CHECK(cfg.window.stride == 2);
  CHECK(cfg.train.gamma == 0.05);
  CHECK(cfg.detect.fpr == 0.05);
  CHECK(cfg.detect.q == 0.1);
  CHECK(cfg.localize.lambda == 0.5);
}

TEST_CASE("ini text parses sections, comments and overrides") {
  const char* text =
      "# top comment\n"
      "[run]\n"
      "seed = 7\n"
      "method = spirit\n"
      "\n"
      "[sim]\n"
      "nx = 4\n"
      "ny = 3\n"
      "; alt comment\n"
      "noise_pct = 0.01\n"
      "[damage]\n"
      "kind = crack\n"
      "center_x_cm = 12.5\n";
  RunConfig cfg = parse_config_text(text, "inline");
  CHECK(cfg.run.seed == 7);
  CHECK(cfg.run.method == Method::Spirit);
  CHECK(cfg.sim.nx == 4);
  CHECK(cfg.sim.ny == 3);
  CHECK(cfg.sim.noise_pct == 0.01);
  CHECK(cfg.damage.kind == "crack");
  CHECK(cfg.damage.center_x_cm == 12.5);
  CHECK(cfg.window.l == 12);
}

TEST_CASE("unknown section or key is an error") {
  CHECK_THROWS_AS(parse_config_text("[nope]\nx = 1\n", "inline"), Error);
  CHECK_THROWS_AS(parse_config_text("[run]\nbogus = 1\n", "inline"), Error);
  try {
    parse_config_text("[run]\nseed = x\n", "inline");
    FAIL("expected parse failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("inline") != std::string::npos);
  }
}

TEST_CASE("apply_config_setting mirrors file keys") {
  RunConfig cfg;
  apply_config_setting(cfg, "train.gamma", "0.25");
  apply_config_setting(cfg, "run.method", "ae");
  apply_config_setting(cfg, "pipeline.train_duration_s", "900");
  CHECK(cfg.train.gamma == 0.25);
  CHECK(cfg.run.method == Method::Ae);
  CHECK(cfg.pipeline.train_duration_s == 900.0);
  CHECK_THROWS_AS(apply_config_setting(cfg, "train.nope", "1"), Error);
  CHECK_THROWS_AS(apply_config_setting(cfg, "nodot", "1"), Error);
}

TEST_CASE("validate rejects out-of-range values") {
  RunConfig cfg;
  cfg.detect.fpr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.detect.fpr = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.window.l = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.window.stride = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.compress.segment_len = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.train.calib_frac = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.sim.nx = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.damage.kind = "weird";
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.localize.lambda = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.spirit.k = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("method names round-trip") {
  CHECK(parse_method("miae") == Method::Miae);
  CHECK(parse_method("ae") == Method::Ae);
  CHECK(parse_method("spirit") == Method::Spirit);
  CHECK(std::string(method_name(Method::Miae)) == "miae");
  CHECK_THROWS_AS(parse_method("pca"), Error);
}

TEST_SUITE_END();
