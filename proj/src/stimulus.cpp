#include "gsnn/stimulus.hpp"

#include <algorithm>

namespace gsnn {

std::size_t StimulusPlan::total_events() const {
  std::size_t n = 0;
  for (const auto& [id, events] : trains) n += events.size();
  return n;
}

StimulusPlan poisson_stimulus(const Engram& engram, double rate_hz,
                              double window_begin_ms, double window_end_ms,
                              double amplitude_na, double pulse_ms,
                              std::uint64_t seed) {
  if (engram.members.empty())
    throw ExperimentError("poisson_stimulus: engram '" + engram.label +
                          "' has no members (unallocated symbol)");
  if (rate_hz < 0) throw ConfigError("poisson_stimulus: rate must be >= 0");
  if (window_end_ms < window_begin_ms)
    throw ConfigError("poisson_stimulus: window must be well-ordered");

  StimulusPlan plan;
  plan.window_begin_ms = window_begin_ms;
  plan.window_end_ms = window_end_ms;
  plan.rate_hz = rate_hz;
  plan.pulse_ms = pulse_ms;
  if (rate_hz == 0.0) return plan;

  std::vector<NeuronId> members = engram.members;
  std::sort(members.begin(), members.end());
  const double mean_gap_ms = 1000.0 / rate_hz;
  plan.trains.reserve(members.size());
  for (NeuronId id : members) {
    // Per-neuron stream keyed by (seed, neuron id): stable under any
    // iteration order and across regenerations.
    Rng rng(splitmix64(seed ^ splitmix64(0x5757000000000000ULL + id)));
    std::vector<StimulusEvent> events;
    double t = window_begin_ms + rng.next_exponential(mean_gap_ms);
    while (t < window_end_ms) {
      events.push_back({t, amplitude_na});
      t += rng.next_exponential(mean_gap_ms);
    }
    if (!events.empty()) plan.trains.emplace_back(id, std::move(events));
  }
  return plan;
}

}  // namespace gsnn
