#include <doctest.h>

#include <sstream>

#include "gsnn/config.hpp"

using namespace gsnn;

TEST_CASE("defaults carry the published model constants") {
  SimParams p;
  CHECK(p.c_m_nf == 30.0);
  CHECK(p.tau_m_ms == 30.0);
  CHECK(p.v_reset_mv == -65.0);
  CHECK(p.v_threshold_mv == -35.0);
  CHECK(p.tau_ref_ms == 10.0);
  CHECK(p.tau_s_ms == 30.0);
  CHECK(p.tau_w_ms == 20.0);
  CHECK(p.a_plus == 1.1);
  CHECK(p.a_minus == 0.95);
  CHECK(p.c_r == 10.0);
  CHECK(p.c_p == -10.0);
  CHECK(p.t_r_ms == 5.0);
  CHECK(p.conductance_us() == 1.0);  // g = C_m / tau_m
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("config stream parsing, overrides and echo round-trip") {
  SimParams p;
  std::istringstream in(
      "# comment line\n"
      "\n"
      "dt_ms = 0.5\n"
      "n_neurons = 2000\n"
      "lambda = 0.025\n"
      "reset_between_triples = false\n");
  CHECK(apply_config_stream(in, p, "<test>") == 4);
  CHECK(p.dt_ms == 0.5);
  CHECK(p.n_neurons == 2000);
  CHECK(p.lambda == 0.025);
  CHECK(p.reset_between_triples == false);
  CHECK(p.engram_size() == 50);

  // Echo -> reparse -> identical echo.
  std::string echoed = echo_config(p);
  SimParams q;
  std::istringstream in2(echoed);
  apply_config_stream(in2, q, "<echo>");
  CHECK(echo_config(q) == echoed);
}

TEST_CASE("unknown keys and malformed lines are config errors") {
  SimParams p;
  std::istringstream bad_key("no_such_key = 1\n");
  CHECK_THROWS_AS(apply_config_stream(bad_key, p, "<test>"), ConfigError);
  std::istringstream bad_line("dt_ms 0.5\n");
  CHECK_THROWS_AS(apply_config_stream(bad_line, p, "<test>"), ConfigError);
  CHECK_THROWS_AS(set_param(p, "dt_ms", "abc"), ConfigError);
}

TEST_CASE("validation rejects inconsistent parameter sets") {
  SimParams p;
  p.lambda = 0.033;  // 33 members per 1000 neurons? 0.033*1000 = 33: fine
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0333;  // 33.3 members: not integral
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = SimParams{};
  p.theta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SimParams{};
  p.theta = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = SimParams{};
  p.dt_ms = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = SimParams{};
  p.dt_ms = 3.0;  // does not divide the 100 ms windows? 100/3 is fractional
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = SimParams{};
  p.rho_inh = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
