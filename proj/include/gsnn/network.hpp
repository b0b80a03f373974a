#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "gsnn/common.hpp"
#include "gsnn/config.hpp"
#include "gsnn/engram.hpp"
#include "gsnn/plasticity.hpp"
#include "gsnn/raster.hpp"
#include "gsnn/stimulus.hpp"
#include "gsnn/synapses.hpp"

namespace gsnn {

/// Timestamped spike used by nearest-neighbour STDP pairing.
struct SpikeStamp {
  double t_ms;
  NeuronId id;
};

/// All per-neuron dynamic variables (structure-of-arrays) plus the
/// simulation clock and the short spike history the plasticity rule needs.
struct NetworkState {
  Vec v;                 ///< membrane potential [mV]
  Vec refractory_ms;     ///< remaining refractory time, >= 0
  Vec trace;             ///< per-neuron spike trace for smoothed similarity
  Vec last_spike_ms;     ///< most recent spike time (-inf if none)
  std::vector<std::uint8_t> inhibitory;       ///< global neuron polarity
  std::vector<std::uint8_t> polarity_locked;  ///< polarity fixed by first membership
  double clock_ms = 0.0;
  std::vector<NeuronId> prev_fired;      ///< sigma(t-1), ascending
  std::deque<SpikeStamp> recent_spikes;  ///< spikes within the STDP window

  void init(std::uint32_t n, double v_reset_mv);
  /// Reset transient dynamics (potentials, refractoriness, traces, spike
  /// history). Keeps the clock and polarity.
  void reset_transient(double v_reset_mv);
};

enum class PlasticityMode { Off, Stdp, Rstdp };

/// One experiment's complete mutable context.
struct Network {
  SimParams params;
  NetworkState state;
  SynapseTable synapses;
  EngramRegistry registry;
  RewardSchedule reward;

  explicit Network(SimParams p);
  Network() = default;

  /// Mark an engram's tagged members inhibitory in the global polarity map.
  /// Conflicts (a neuron already excitatory via an earlier engram) keep the
  /// first assignment.
  void apply_polarity(const Engram& e);
};

/// Hooks for observers of a run; any pointer may be null.
struct RunHooks {
  Raster* raster = nullptr;      ///< every step appended
  TraceLog* trace_log = nullptr; ///< similarity recorded every step
  /// Called after every step; return false to stop the window early.
  std::function<bool(const RasterStep&)> on_step;
};

/// Advance the network by exactly one step of params.dt_ms.
/// `ext_drive_na` is the external current sampled at the current clock.
/// Returns the fired set (ascending) and stamps it with the step time.
RasterStep step_network(Network& net, const Vec& ext_drive_na, PlasticityMode mode);

/// Drive the network for `duration_ms` (a multiple of dt) under the given
/// stimulation plans and plasticity mode. Event times in the plans are
/// absolute; anything outside [clock, clock + duration) is ignored.
void run_window(Network& net, const std::vector<StimulusPlan>& plans,
                double duration_ms, PlasticityMode mode, const RunHooks& hooks = {});

}  // namespace gsnn
