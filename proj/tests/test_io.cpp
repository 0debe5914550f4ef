#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "cqnls/config.hpp"
#include "cqnls/snapshot.hpp"

using namespace cqnls;

TEST_CASE("config: full document round trip") {
  std::string doc = R"(
# sample document
[grid]
d = 3
m = 32
L = 24.5

[model]
beta = 1.5

[evolution]
dt = 2e-3
t_end = 1.0
eps = 0.02
sigma = 3.0
solver = ifrk4
dealias = true
nonlinear = true
diag_every = 50
snapshot_times = 0.5, 1.0
seed = 99

[audits]
phases = conj2, mixed
dyad_lo = 0.25
dyad_hi = 4
n_samples = 5000
mixed_C = 16

[output]
dir = /tmp
prefix = sample
)";
  RunConfig rc = parse_config(doc);
  CHECK(rc.sim.d == 3);
  CHECK(rc.sim.m == 32);
  CHECK(rc.sim.L == doctest::Approx(24.5));
  CHECK(rc.sim.beta == doctest::Approx(1.5));
  CHECK(rc.sim.dt == doctest::Approx(2e-3));
  CHECK(rc.sim.solver == Solver::ifrk4);
  CHECK(rc.sim.dealias_rhs);
  CHECK(rc.sim.diag_every == 50);
  REQUIRE(rc.sim.snapshot_times.size() == 2);
  CHECK(rc.sim.snapshot_times[1] == doctest::Approx(1.0));
  CHECK(rc.sim.seed == 99);
  REQUIRE(rc.audits.phases.size() == 2);
  CHECK(rc.audits.phases[1] == "mixed");
  CHECK(rc.audits.dyad_lo == doctest::Approx(0.25));
  CHECK(rc.out_dir == "/tmp");
  CHECK(rc.prefix == "sample");
  CHECK(rc.text == doc);
  CHECK(!rc.use_raw);
}

TEST_CASE("config: raw coefficients normalize to beta") {
  RunConfig rc = parse_config("[model]\nalpha1 = 2\nalpha3 = 3\nalpha5 = 1\n");
  CHECK(rc.use_raw);
  CHECK(rc.sim.beta == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("config: errors carry positions and reasons") {
  auto expect_fail = [](const std::string& doc, const std::string& needle) {
    try {
      (void)parse_config(doc);
      FAIL("expected ConfigError for: ", doc);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_fail("[grid]\nd = banana\n", "number");
  expect_fail("[grid]\nd = 2.5\n", "integer");
  expect_fail("[grid]\nd = banana\n", "line 2");
  expect_fail("[grid]\nm = 48\n", "power of two");
  expect_fail("[nosuch]\nx = 1\n", "unknown section");
  expect_fail("[grid]\nq = 1\n", "unknown key");
  expect_fail("x = 1\n", "outside any section");
  expect_fail("[evolution]\nsolver = rk45\n", "strang|ifrk4|both");
  expect_fail("[model]\nbeta = 1\nalpha1 = 2\n", "both beta and raw");
  expect_fail("[grid]\nd =\n", "empty value");
  expect_fail("[evolution]\nnonlinear = maybe\n", "boolean");
}

TEST_CASE("snapshot: write/read round trip preserves everything") {
  Grid g(2, 16, 8.0);
  SnapshotFile s;
  s.d = 2;
  s.m = 16;
  s.L = 8.0;
  s.t = 1.75;
  s.tag = "psi";
  s.u2_mean = -0.0125;
  s.beta = 2.0;
  s.data.resize(g.size());
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (auto& z : s.data) z = cplx(nd(rng), nd(rng));

  std::string path = "/tmp/cqnls_test_snapshot.cqns";
  write_snapshot(path, s);
  SnapshotFile r = read_snapshot(path);
  CHECK(r.d == s.d);
  CHECK(r.m == s.m);
  CHECK(r.L == s.L);
  CHECK(r.t == s.t);
  CHECK(r.tag == s.tag);
  CHECK(r.u2_mean == s.u2_mean);
  CHECK(r.beta == s.beta);
  REQUIRE(r.data.size() == s.data.size());
  for (std::size_t i = 0; i < s.data.size(); ++i) CHECK(r.data[i] == s.data[i]);
  std::remove(path.c_str());
}

TEST_CASE("snapshot: corruption is detected") {
  SnapshotFile s;
  s.d = 1;
  s.m = 8;
  s.L = 4.0;
  s.data.assign(8, cplx(1.0, -1.0));
  std::string path = "/tmp/cqnls_test_corrupt.cqns";
  write_snapshot(path, s);

  // flip one payload byte
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(80);
    char c;
    f.seekg(80);
    f.get(c);
    c ^= 0x40;
    f.seekp(80);
    f.put(c);
  }
  CHECK_THROWS_AS((void)read_snapshot(path), SnapshotFormatError);

  // truncation
  write_snapshot(path, s);
  {
    std::ifstream in(path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(all.data(), static_cast<std::streamsize>(all.size() / 2));
  }
  CHECK_THROWS_AS((void)read_snapshot(path), SnapshotFormatError);

  // bad magic
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "NOTASNAPSHOTFILE____________________________________";
  }
  CHECK_THROWS_AS((void)read_snapshot(path), SnapshotFormatError);
  std::remove(path.c_str());
}

TEST_CASE("crc32 of a known vector") {
  // standard test vector: crc32("123456789") = 0xCBF43926
  const char* s = "123456789";
  CHECK(crc32_bytes(s, 9) == 0xCBF43926u);
}
