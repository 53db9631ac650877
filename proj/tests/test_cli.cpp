#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

// The binary under test; the build passes its location as a macro.
#ifndef MIDAS_CLI_PATH
#error "MIDAS_CLI_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "midas_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch() / ("stdout." + std::to_string(counter));
  fs::path err = scratch() / ("stderr." + std::to_string(counter));
  ++counter;
  std::string cmd = "MIDAS_LOG=0 '" + std::string(MIDAS_CLI_PATH) + "' " + args + " > '" +
                    out.string() + "' 2> '" + err.string() + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Small array, short record: enough segments for a couple of windows.
std::string small_sim_args(const fs::path& dir, double duration_s) {
  std::ostringstream s;
  s << "--out '" << dir.string() << "' --data '" << dir.string() << "'"
    << " --set sim.nx=5 --set sim.ny=2 --set sim.duration_s=" << duration_s;
  return s.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("version and help exit cleanly") {
  RunResult v = run_cli("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);

  RunResult h = run_cli("--help");
  CHECK(h.exit_code == 0);
  CHECK(h.out.find("pipeline") != std::string::npos);
  CHECK(h.out.find("simulate") != std::string::npos);
  CHECK(h.out.find("info") != std::string::npos);
}

TEST_CASE("bad command lines exit 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("no-such-command").exit_code == 1);
  RunResult r = run_cli("simulate --no-such-flag");
  CHECK(r.exit_code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("a missing config file exits 1 and writes nothing") {
  fs::path dir = scratch() / "missing_cfg";
  RunResult r = run_cli("simulate -c '" + (dir / "absent.cfg").string() + "' --out '" +
                        (dir / "out").string() + "'");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("Config") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("malformed and unknown overrides exit 1") {
  fs::path dir = scratch() / "bad_set";
  RunResult bad = run_cli("simulate --set foo --out '" + dir.string() + "'");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("section.key=value") != std::string::npos);

  RunResult unknown = run_cli("simulate --set bogus.key=1 --out '" + dir.string() + "'");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("Config") != std::string::npos);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("too few segments for one window fails validation") {
  fs::path dir = scratch() / "short_record";
  fs::create_directories(dir);
  // 55 s at 40 Hz is 11 segments, one short of a 12-step window.
  REQUIRE(run_cli("simulate " + small_sim_args(dir, 55)).exit_code == 0);
  REQUIRE(run_cli("compress " + small_sim_args(dir, 55)).exit_code == 0);
  RunResult r = run_cli("window " + small_sim_args(dir, 55));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("InsufficientData") != std::string::npos);
}

TEST_CASE("training with no room for calibration fails validation") {
  fs::path dir = scratch() / "one_window";
  fs::create_directories(dir);
  // 65 s gives 13 segments: exactly one window, nothing left to fit on once
  // a calibration window is held back.
  std::string args = small_sim_args(dir, 65);
  REQUIRE(run_cli("simulate " + args).exit_code == 0);
  REQUIRE(run_cli("compress " + args).exit_code == 0);
  REQUIRE(run_cli("window " + args).exit_code == 0);
  RunResult r = run_cli("train " + args + " --model '" + (dir / "m.midas").string() + "'");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("InsufficientData") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "m.midas"));
}

TEST_CASE("the demo pipeline produces its artifacts") {
  fs::path dir = scratch() / "demo";
  fs::path cfg_file = scratch() / "demo.cfg";
  {
    std::ofstream cfg(cfg_file);
    cfg << "[run]\nseed = 1\n\n[sim]\nnx = 5\nny = 2\n\n"
        << "[pipeline]\ntrain_duration_s = 300\nheldout_duration_s = 120\n"
        << "damaged_duration_s = 120\n\n"
        << "[damage]\nkind = crack\ncenter_x_cm = 15\ncenter_y_cm = 8\n"
        << "radius_cm = 6\namplification = 2.5\n";
  }
  // Flag overrides beat --set overrides, which beat the config file.
  RunResult r = run_cli("pipeline -c '" + cfg_file.string() + "' --set run.seed=2 --seed 3" +
                        " --out '" + dir.string() + "' --model '" +
                        (dir / "model.midas").string() + "' --epochs 60");
  REQUIRE(r.exit_code == 0);

  for (const char* name :
       {"summary.txt", "detection_heldout.txt", "detection_damaged.txt", "evaluation.txt",
        "localization.txt", "scoremap.csv", "layout.csv", "model.midas"})
    CHECK(fs::exists(dir / name));
  CHECK(fs::exists(dir / "train" / "dataset"));
  CHECK(fs::exists(dir / "heldout" / "compressed.csv"));

  std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("seed 3") != std::string::npos);
  CHECK(summary.find("method miae") != std::string::npos);
  CHECK(summary.find("n_sensors 10") != std::string::npos);

  RunResult info = run_cli("info '" + (dir / "model.midas").string() + "'");
  CHECK(info.exit_code == 0);
  CHECK(info.out.find("sensors 10") != std::string::npos);
  CHECK(info.out.find("channels 20") != std::string::npos);
  CHECK(info.out.find("window_len 12") != std::string::npos);

  RunResult gone = run_cli("info '" + (dir / "no_model.midas").string() + "'");
  CHECK(gone.exit_code == 2);
}

TEST_SUITE_END();
