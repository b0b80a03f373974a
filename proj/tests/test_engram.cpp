#include <doctest.h>

#include <cmath>
#include <set>

#include "gsnn/engram.hpp"

using namespace gsnn;

TEST_CASE("allocation draws exactly K distinct members with tagged tail") {
  EngramRegistry reg(1000, 0.05, 0.15);
  const Engram& e = reg.allocate("Biden", SymbolKind::Entity, 42);
  CHECK(e.size() == 50);  // K = lambda * N
  std::set<NeuronId> uniq(e.members.begin(), e.members.end());
  CHECK(uniq.size() == 50);
  for (NeuronId id : e.members) CHECK(id < 1000);
  CHECK(e.inhibitory_count() == 8);  // round(0.15 * 50)
  // Inhibitory members are the tail of the draw.
  for (std::size_t i = 0; i < 42; ++i) CHECK(e.inhibitory[i] == 0);
  for (std::size_t i = 42; i < 50; ++i) CHECK(e.inhibitory[i] == 1);
}

TEST_CASE("rho_inh = 0 gives an all-excitatory engram") {
  EngramRegistry reg(1000, 0.05, 0.0);
  const Engram& e = reg.allocate("X", SymbolKind::Entity, 1);
  CHECK(e.inhibitory_count() == 0);
}

TEST_CASE("allocation is deterministic per (seed, label) and order-independent") {
  EngramRegistry a(1000, 0.05, 0.15);
  EngramRegistry b(1000, 0.05, 0.15);
  a.allocate("first", SymbolKind::Entity, 42);
  a.allocate("second", SymbolKind::Entity, 42);
  b.allocate("second", SymbolKind::Entity, 42);  // reversed allocation order
  b.allocate("first", SymbolKind::Entity, 42);
  CHECK(a.at("first").members == b.at("first").members);
  CHECK(a.at("second").members == b.at("second").members);
  CHECK(a.at("first").members != a.at("second").members);
}

TEST_CASE("duplicate labels and non-integral K are errors") {
  EngramRegistry reg(1000, 0.05, 0.15);
  reg.allocate("dup", SymbolKind::Entity, 1);
  CHECK_THROWS_AS(reg.allocate("dup", SymbolKind::Entity, 1), ConfigError);
  EngramRegistry bad(1000, 0.0505, 0.15);
  CHECK_THROWS_AS(bad.allocate("x", SymbolKind::Entity, 1), ConfigError);
  CHECK_THROWS_AS(reg.at("missing"), ExperimentError);
}

TEST_CASE("similarity calibration: pattern firing 1, silence 0, all-fire 0") {
  const std::uint32_t n = 1000;
  const double lambda = 0.05;
  EngramRegistry reg(n, lambda, 0.15);
  const Engram& m = reg.allocate("M", SymbolKind::Entity, 7);

  RasterStep exact;
  exact.fired.assign(m.members.begin(), m.members.end());
  std::sort(exact.fired.begin(), exact.fired.end());
  CHECK(std::abs(similarity(m, exact, n, lambda) - 1.0) < 1e-12);

  RasterStep silent;
  CHECK(similarity(m, silent, n, lambda) == 0.0);

  RasterStep all;
  for (NeuronId i = 0; i < n; ++i) all.fired.push_back(i);
  CHECK(std::abs(similarity(m, all, n, lambda)) < 1e-12);
}

TEST_CASE("similarity is bounded above by 1") {
  const std::uint32_t n = 200;
  EngramRegistry reg(n, 0.1, 0.0);
  const Engram& m = reg.allocate("M", SymbolKind::Entity, 9);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    RasterStep step;
    for (NeuronId i = 0; i < n; ++i)
      if (rng.next_double() < 0.3) step.fired.push_back(i);
    CHECK(similarity(m, step, n, 0.1) <= 1.0 + 1e-12);
  }
}

TEST_CASE("cross-engram similarity is zero in expectation (Monte Carlo)") {
  const std::uint32_t n = 1000;
  const double lambda = 0.05;
  const int trials = 300;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    EngramRegistry reg(n, lambda, 0.0);
    const Engram& a = reg.allocate("a", SymbolKind::Entity, 1000 + t);
    const Engram& b = reg.allocate("b", SymbolKind::Entity, 1000 + t);
    RasterStep fire_b;
    fire_b.fired.assign(b.members.begin(), b.members.end());
    std::sort(fire_b.fired.begin(), fire_b.fired.end());
    double s = similarity(a, fire_b, n, lambda);
    sum += s;
    sum_sq += s * s;
  }
  double mean = sum / trials;
  double sd = std::sqrt((sum_sq / trials - mean * mean) / (trials - 1));
  CHECK(std::abs(mean) <= 3.0 * sd);
}

TEST_CASE("smoothed similarity equals the raw value for a constant raster") {
  const std::uint32_t n = 100;
  const double lambda = 0.1;
  EngramRegistry reg(n, lambda, 0.0);
  const Engram& m = reg.allocate("M", SymbolKind::Entity, 3);

  // Constant raster: members fire every step -> trace pinned at 1 there, 0
  // elsewhere, exactly the indicator.
  RasterStep step;
  step.fired.assign(m.members.begin(), m.members.end());
  std::sort(step.fired.begin(), step.fired.end());
  Vec trace = Vec::Zero(n);
  for (NeuronId id : m.members) trace[id] = 1.0;
  CHECK(similarity(m, trace, n, lambda) ==
        doctest::Approx(similarity(m, step, n, lambda)).epsilon(1e-15));

  // Constant silence: both zero.
  Vec zero = Vec::Zero(n);
  RasterStep silent;
  CHECK(similarity(m, zero, n, lambda) == similarity(m, silent, n, lambda));
}

TEST_CASE("trace log records per-watch rows matching direct similarity calls") {
  EngramRegistry reg(100, 0.05, 0.0);
  reg.allocate("a", SymbolKind::Entity, 1);
  reg.allocate("b", SymbolKind::Entity, 1);
  reg.allocate("c", SymbolKind::Relation, 1);

  TraceLog log;
  log.set_watch({"a", "b", "c"});
  RasterStep step;
  step.t_ms = 5.0;
  step.fired.assign(reg.at("a").members.begin(), reg.at("a").members.end());
  std::sort(step.fired.begin(), step.fired.end());
  log.record(reg, step, step.t_ms);
  REQUIRE(log.rows() == 1);
  REQUIRE(log.columns().size() == 3);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(log.raw(0, c) == similarity(reg.at(log.columns()[c]), step, 100, 0.05));

  TraceLog all;  // empty watch list = all registered engrams
  all.record(reg, step, 0.0);
  CHECK(all.columns().size() == 3);
}
