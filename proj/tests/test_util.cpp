#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "common.hpp"
#include "rng.hpp"
#include "util.hpp"

using namespace midas;

TEST_SUITE_BEGIN("util");

TEST_CASE("fmt_double round-trips exactly") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    double v = std::ldexp(mant(gen), expo(gen));
    CHECK(parse_double(fmt_double(v)) == v);
  }
  CHECK(parse_double(fmt_double(0.1)) == 0.1);
  CHECK(fmt_double(0.0) == "0");
  CHECK(parse_double(fmt_double(-1.0 / 3.0)) == -1.0 / 3.0);
}

TEST_CASE("parse_double rejects junk") {
  CHECK_THROWS_AS(parse_double("abc"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
  CHECK(parse_double("  2.5 ") == 2.5);
}

TEST_CASE("parse_long rejects junk and fractions") {
  CHECK(parse_long("42") == 42);
  CHECK(parse_long("-7") == -7);
  CHECK_THROWS_AS(parse_long("4.2"), Error);
  CHECK_THROWS_AS(parse_long("x"), Error);
}

TEST_CASE("trim and split behave on edges") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
  auto parts = split("a,b,,c", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[2] == "");
  CHECK(split("", ',').size() == 1);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  // Reference digests for the 64-bit FNV-1a parameters.
  CHECK(fnv1a64("", 0) == 14695981039346656037ull);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("to_hex is fixed-width lowercase") {
  CHECK(to_hex(0) == "0000000000000000");
  CHECK(to_hex(0xdeadbeefull) == "00000000deadbeef");
}

TEST_CASE("atomic_write_file replaces content completely") {
  std::string path = "util_atomic_test.txt";
  atomic_write_file(path, "first version, longer than the second");
  atomic_write_file(path, "short");
  CHECK(read_file(path) == "short");
  CHECK(file_exists(path));
  std::remove(path.c_str());
  CHECK_FALSE(file_exists(path));
}

TEST_CASE("rng streams are deterministic per seed") {
  Rng a(123), b(123), c(124);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    double x = a.uniform(), y = b.uniform(), z = c.uniform();
    same = same && (x == y);
    diff = diff || (x != z);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("rng gaussian moments are sane") {
  Rng g(9);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    sum += z;
    sq += z * z;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("rng index stays in range and covers values") {
  Rng g(5);
  std::vector<int> seen(10, 0);
  for (int i = 0; i < 1000; ++i) {
    std::size_t k = g.index(10);
    REQUIRE(k < 10);
    ++seen[k];
  }
  for (int v : seen) CHECK(v > 0);
}

TEST_SUITE_END();
