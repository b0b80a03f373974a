#include <doctest.h>

#include <cmath>

#include "gsnn/network.hpp"

using namespace gsnn;

namespace {

SimParams tiny_params(std::uint32_t n = 10) {
  SimParams p;
  p.n_neurons = n;
  p.lambda = 1.0 / n;  // K = 1, keeps validate() happy for tiny arenas
  return p;
}

/// Closed-form membrane response to a constant drive from rest:
/// V(t) = V_s + (I/g)(1 - exp(-t/tau_m)).
double analytic_v(const SimParams& p, double drive_mv, double t_ms) {
  return p.v_reset_mv + drive_mv * (1.0 - std::exp(-t_ms / p.tau_m_ms));
}

}  // namespace

TEST_CASE("zero input holds the resting potential exactly") {
  Network net(tiny_params());
  Vec ext = Vec::Zero(10);
  for (int s = 0; s < 500; ++s) {
    auto step = step_network(net, ext, PlasticityMode::Off);
    CHECK(step.fired.empty());
  }
  for (int i = 0; i < 10; ++i) CHECK(net.state.v[i] == -65.0);
}

TEST_CASE("constant subthreshold drive converges to V_reset + I/g and never fires") {
  SimParams p = tiny_params();
  p.dt_ms = 0.1;
  Network net(p);
  Vec ext = Vec::Constant(10, 20.0);  // I/g = 20 mV < 30 mV gap
  double max_err = 0.0;
  bool fired_any = false;
  const int n_steps = 3000;  // 300 ms
  for (int s = 0; s < n_steps; ++s) {
    auto step = step_network(net, ext, PlasticityMode::Off);
    fired_any |= !step.fired.empty();
    // state.v now holds V((s+1)*dt)
    double expected = analytic_v(p, 20.0, (s + 1) * p.dt_ms);
    max_err = std::max(max_err, std::abs(net.state.v[0] - expected));
  }
  CHECK(!fired_any);
  CHECK(net.state.v[0] == doctest::Approx(-45.0).epsilon(1e-3));
  CHECK(max_err < 0.01 * 20.0);  // Euler error < 1% of I/g at dt = 0.1
}

TEST_CASE("suprathreshold drive fires near the analytic crossing time, then clamps") {
  SimParams p = tiny_params();
  p.dt_ms = 0.1;
  Network net(p);
  Vec ext = Vec::Constant(10, 40.0);  // I/g = 40 mV
  // Analytic threshold crossing: 40(1 - e^{-t/30}) = 30  =>  t = 30 ln 4.
  const double t_star = 30.0 * std::log(4.0);  // 41.588830833596715
  double first_spike = -1.0;
  Raster raster;
  for (int s = 0; s < 1200; ++s) {
    auto step = step_network(net, ext, PlasticityMode::Off);
    if (!step.fired.empty() && first_spike < 0) first_spike = step.t_ms;
    raster.push_back(step);
  }
  REQUIRE(first_spike >= 0);
  CHECK(std::abs(first_spike - t_star) < 1.0);

  // After the spike the potential clamps at V_reset for tau_ref.
  auto spike_step = static_cast<std::size_t>(std::llround(first_spike / p.dt_ms));
  for (std::size_t s = spike_step + 1; s <= spike_step + 100; ++s) {
    CHECK(raster[s].fired.empty());
  }
}

TEST_CASE("no neuron fires twice within the refractory period") {
  SimParams p = tiny_params();
  Network net(p);
  Vec ext = Vec::Constant(10, 5000.0);  // far above threshold every step
  std::vector<double> last(10, -1e300);
  for (int s = 0; s < 300; ++s) {
    auto step = step_network(net, ext, PlasticityMode::Off);
    for (NeuronId id : step.fired) {
      if (last[id] > -1e300) CHECK(step.t_ms - last[id] > p.tau_ref_ms);
      last[id] = step.t_ms;
    }
  }
  CHECK(last[0] > 0);  // did fire repeatedly
}

TEST_CASE("raster matches the threshold indicator of an independent Euler replica") {
  SimParams p = tiny_params();
  Network net(p);
  const double drive = 37.0;
  Vec ext = Vec::Constant(10, drive);

  // Test-side replica of the update rule, with explicit indicator handling.
  double v = p.v_reset_mv;
  double refractory = 0.0;
  for (int s = 0; s < 400; ++s) {
    auto step = step_network(net, ext, PlasticityMode::Off);
    bool fired_engine =
        std::binary_search(step.fired.begin(), step.fired.end(), NeuronId{0});
    bool fired_replica = false;
    if (refractory > 0) {
      v = p.v_reset_mv;
      refractory = std::max(0.0, refractory - p.dt_ms);
    } else {
      v += (p.dt_ms / p.tau_m_ms) * (-(v - p.v_reset_mv) + drive);
      if (v >= p.v_threshold_mv) {  // sigma = 1 iff pre-reset V crosses threshold
        fired_replica = true;
        v = p.v_reset_mv;
        refractory = p.tau_ref_ms;
      }
    }
    CHECK(fired_engine == fired_replica);
  }
}

TEST_CASE("non-finite drive raises a simulation fault naming the neuron") {
  Network net(tiny_params());
  Vec ext = Vec::Zero(10);
  ext[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step_network(net, ext, PlasticityMode::Off), SimError);
}

TEST_CASE("run_window: zero duration leaves the state untouched") {
  Network net(tiny_params());
  Vec before = net.state.v;
  Raster raster;
  RunHooks hooks;
  hooks.raster = &raster;
  run_window(net, {}, 0.0, PlasticityMode::Off, hooks);
  CHECK(raster.empty());
  CHECK(net.state.v == before);
  CHECK(net.state.clock_ms == 0.0);
}

TEST_CASE("run_window rejects durations that are not multiples of dt") {
  Network net(tiny_params());
  CHECK_THROWS_AS(run_window(net, {}, 0.5, PlasticityMode::Off), ConfigError);
}

TEST_CASE("membrane potential never drops below V_reset under inhibitory drive") {
  Network net(tiny_params());
  Vec ext = Vec::Constant(10, -500.0);
  for (int s = 0; s < 100; ++s) step_network(net, ext, PlasticityMode::Off);
  for (int i = 0; i < 10; ++i) CHECK(net.state.v[i] >= -65.0);
}
