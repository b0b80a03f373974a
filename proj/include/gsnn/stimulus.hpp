#pragma once

#include <cstdint>
#include <vector>

#include "gsnn/common.hpp"
#include "gsnn/engram.hpp"

namespace gsnn {

/// One current-injection event: `i_na` nanoamps applied for the configured
/// pulse duration starting at `t_ms`.
struct StimulusEvent {
  double t_ms = 0.0;
  double i_na = 0.0;

  bool operator==(const StimulusEvent&) const = default;
};

/// Per-neuron injection schedule over one stimulation window.
struct StimulusPlan {
  double window_begin_ms = 0.0;
  double window_end_ms = 0.0;
  double rate_hz = 0.0;
  double pulse_ms = 1.0;
  /// (neuron, events sorted by time), neurons ascending.
  std::vector<std::pair<NeuronId, std::vector<StimulusEvent>>> trains;

  std::size_t total_events() const;
  bool operator==(const StimulusPlan&) const = default;
};

/// Independent homogeneous Poisson event trains for every member of the
/// engram; deterministic given the seed. Throws on an empty engram.
StimulusPlan poisson_stimulus(const Engram& engram, double rate_hz,
                              double window_begin_ms, double window_end_ms,
                              double amplitude_na, double pulse_ms,
                              std::uint64_t seed);

}  // namespace gsnn
