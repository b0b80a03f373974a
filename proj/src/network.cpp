#include "gsnn/network.hpp"

#include <algorithm>
#include <cmath>

namespace gsnn {

void NetworkState::init(std::uint32_t n, double v_reset_mv) {
  v = Vec::Constant(n, v_reset_mv);
  refractory_ms = Vec::Zero(n);
  trace = Vec::Zero(n);
  last_spike_ms = Vec::Constant(n, -1e300);
  inhibitory.assign(n, 0);
  polarity_locked.assign(n, 0);
  clock_ms = 0.0;
  prev_fired.clear();
  recent_spikes.clear();
}

void NetworkState::reset_transient(double v_reset_mv) {
  v.setConstant(v_reset_mv);
  refractory_ms.setZero();
  trace.setZero();
  last_spike_ms.setConstant(-1e300);
  prev_fired.clear();
  recent_spikes.clear();
  // Restart the local clock: runs that begin from rest are bit-identical
  // wherever they sit in an experiment, which keeps trials order-independent.
  clock_ms = 0.0;
}

Network::Network(SimParams p) : params(p) {
  params.validate();
  state.init(params.n_neurons, params.v_reset_mv);
  synapses = SynapseTable(params.n_neurons);
  registry = EngramRegistry(params.n_neurons, params.lambda, params.rho_inh);
}

void Network::apply_polarity(const Engram& e) {
  // First membership fixes a neuron's polarity; overlapping engrams cannot
  // flip it later (Dale-style constraint on outgoing synapse signs).
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    NeuronId id = e.members[i];
    if (state.polarity_locked[id]) continue;
    state.polarity_locked[id] = 1;
    state.inhibitory[id] = e.inhibitory[i];
  }
}

namespace {

/// Nearest-neighbour pair updates for every neuron fired this step against
/// the most recent spike of each partner within the STDP window. In stdp
/// mode the delta goes straight to the weight; in rstdp mode it accumulates
/// into the eligibility trace. Deltas carry the presynaptic polarity sign so
/// potentiation always strengthens the synapse's efficacy |w|.
void pair_spikes(Network& net, const std::vector<NeuronId>& fired, double t_ms,
                 PlasticityMode mode) {
  const SimParams& p = net.params;
  auto& st = net.state;
  auto& syn = net.synapses;
  for (NeuronId f : fired) {
    for (const SpikeStamp& rec : st.recent_spikes) {
      NeuronId j = rec.id;
      if (j == f) continue;
      if (st.last_spike_ms[j] != rec.t_ms) continue;  // stale entry; j refired later
      double dt_pre = rec.t_ms - t_ms;  // j as pre, f as post: negative
      double pot = stdp_delta(dt_pre, p);
      double dep = stdp_delta(-dt_pre, p);
      double pot_signed = st.inhibitory[j] ? -pot : pot;
      double dep_signed = st.inhibitory[f] ? -dep : dep;
      if (mode == PlasticityMode::Stdp) {
        if (pot != 0.0) syn.add_weight(j, f, pot_signed, p.w_max, st.inhibitory[j]);
        if (dep != 0.0) syn.add_weight(f, j, dep_signed, p.w_max, st.inhibitory[f]);
      } else {
        if (pot != 0.0) syn.add_eligibility(j, f, pot_signed);
        if (dep != 0.0) syn.add_eligibility(f, j, dep_signed);
      }
    }
  }
}

}  // namespace

RasterStep step_network(Network& net, const Vec& ext_drive_na, PlasticityMode mode) {
  const SimParams& p = net.params;
  NetworkState& st = net.state;
  const auto n = static_cast<NeuronId>(st.v.size());
  const double t = st.clock_ms;
  const double g = p.conductance_us();
  const double euler = p.dt_ms / p.tau_m_ms;

  // Total drive [nA]: synaptic current from sigma(t-1) plus external input.
  Vec drive = ext_drive_na;
  for (NeuronId pre : st.prev_fired) net.synapses.propagate(pre, p.unit_pulse_na, drive);

  RasterStep out;
  out.t_ms = t;
  for (NeuronId i = 0; i < n; ++i) {
    if (st.refractory_ms[i] > 0.0) {
      st.v[i] = p.v_reset_mv;  // clamped while refractory
      st.refractory_ms[i] = std::max(0.0, st.refractory_ms[i] - p.dt_ms);
      continue;
    }
    double vi = st.v[i] + euler * (-(st.v[i] - p.v_reset_mv) + drive[i] / g);
    if (!std::isfinite(vi))
      throw SimError("non-finite membrane potential at neuron " + std::to_string(i) +
                     ", t=" + std::to_string(t) + " ms");
    if (vi < p.v_reset_mv) vi = p.v_reset_mv;  // inhibition floors at rest
    if (vi >= p.v_threshold_mv) {
      out.fired.push_back(i);
      st.v[i] = p.v_reset_mv;
      st.refractory_ms[i] = p.tau_ref_ms;
    } else {
      st.v[i] = vi;
    }
  }

  // Smoothed-readout traces: exponential decay, reset to 1 on spike.
  st.trace *= std::exp(-p.dt_ms / p.sim_tau_ms);
  for (NeuronId i : out.fired) st.trace[i] = 1.0;

  if (mode != PlasticityMode::Off) {
    // Advance plasticity time first: this step's decay applies to the old
    // eligibility, then fresh pairings accumulate undecayed.
    net.synapses.tick(p.dt_ms, p.tau_e_ms);
    pair_spikes(net, out.fired, t, mode);
    if (mode == PlasticityMode::Rstdp) {
      double r = reward_signal(t, net.reward, p);
      if (r != 0.0) net.synapses.apply_reward(r, p.eta, p.w_max, st.inhibitory);
    }
  }

  // Spike bookkeeping for the next step's pairings and propagation.
  for (NeuronId i : out.fired) {
    st.last_spike_ms[i] = t;
    st.recent_spikes.push_back({t, i});
  }
  while (!st.recent_spikes.empty() &&
         st.recent_spikes.front().t_ms <= t - p.tau_w_ms)
    st.recent_spikes.pop_front();
  st.prev_fired = out.fired;
  st.clock_ms = t + p.dt_ms;
  return out;
}

namespace {

struct DriveChange {
  std::int64_t step;
  NeuronId id;
  double delta_na;
};

std::vector<DriveChange> compile_plans(const std::vector<StimulusPlan>& plans,
                                       double t0, double dt, std::int64_t n_steps) {
  std::vector<DriveChange> changes;
  for (const auto& plan : plans) {
    for (const auto& [id, events] : plan.trains) {
      for (const auto& ev : events) {
        // Event is active at sample instants in [t, t + pulse).
        auto on = static_cast<std::int64_t>(std::ceil((ev.t_ms - t0) / dt - 1e-9));
        auto off = static_cast<std::int64_t>(std::ceil((ev.t_ms + plan.pulse_ms - t0) / dt - 1e-9));
        on = std::max<std::int64_t>(on, 0);
        off = std::min(off, n_steps);
        if (on >= off) continue;
        changes.push_back({on, id, ev.i_na});
        if (off < n_steps) changes.push_back({off, id, -ev.i_na});
      }
    }
  }
  std::stable_sort(changes.begin(), changes.end(), [](const DriveChange& a, const DriveChange& b) {
    return a.step != b.step ? a.step < b.step : a.id < b.id;
  });
  return changes;
}

}  // namespace

void run_window(Network& net, const std::vector<StimulusPlan>& plans,
                double duration_ms, PlasticityMode mode, const RunHooks& hooks) {
  const double dt = net.params.dt_ms;
  const auto n_steps = static_cast<std::int64_t>(std::llround(duration_ms / dt));
  if (std::abs(static_cast<double>(n_steps) * dt - duration_ms) > 1e-6)
    throw ConfigError("run_window: duration must be a multiple of dt");
  if (n_steps == 0) return;

  auto changes = compile_plans(plans, net.state.clock_ms, dt, n_steps);
  Vec ext = Vec::Zero(net.state.v.size());
  std::size_t cursor = 0;
  for (std::int64_t s = 0; s < n_steps; ++s) {
    while (cursor < changes.size() && changes[cursor].step == s) {
      ext[changes[cursor].id] += changes[cursor].delta_na;
      ++cursor;
    }
    RasterStep step = step_network(net, ext, mode);
    if (hooks.trace_log)
      hooks.trace_log->record(net.registry, step, net.state.trace, step.t_ms);
    bool keep_going = !hooks.on_step || hooks.on_step(step);
    if (hooks.raster) hooks.raster->push_back(std::move(step));
    if (!keep_going) break;
  }
}

}  // namespace gsnn
