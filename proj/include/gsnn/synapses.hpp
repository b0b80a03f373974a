#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsnn/common.hpp"

namespace gsnn {

/// One directed synapse. `w` carries the sign of the presynaptic neuron
/// (excitatory sources in [0, w_max], inhibitory in [-w_max, 0]); `e` is the
/// eligibility trace. `last_update` is the plasticity-step at which `e` was
/// last realized (decay is applied lazily).
struct Synapse {
  NeuronId post = 0;
  std::uint32_t last_update = 0;
  double w = 0.0;
  double e = 0.0;
  std::uint8_t in_active_set = 0;
};

/// Sparse synapse store: one adjacency row per presynaptic neuron, each an
/// append-only vector with an open-addressing index keyed by postsynaptic
/// id. Entries exist only for pairs instantiated by co-activity; there is no
/// dense N x N storage. A single simulation owns the table (single-writer);
/// concurrent reads of a frozen table are safe.
class SynapseTable {
 public:
  SynapseTable() = default;
  explicit SynapseTable(std::uint32_t n_neurons) : rows_(n_neurons) {}

  std::uint32_t n_neurons() const { return static_cast<std::uint32_t>(rows_.size()); }
  std::size_t size() const { return n_synapses_; }

  /// Weight lookup; zero if the synapse does not exist.
  double weight(NeuronId pre, NeuronId post) const;
  /// Eligibility with decay realized to the current plasticity step.
  double eligibility(NeuronId pre, NeuronId post) const;
  bool exists(NeuronId pre, NeuronId post) const;

  /// Accumulate `w * unit_pulse` of every outgoing synapse of `pre` into
  /// `drive_na` (indexed by postsynaptic neuron).
  void propagate(NeuronId pre, double unit_pulse_na, Vec& drive_na) const;

  /// Direct weight update with clamping: excitatory-source weights stay in
  /// [0, w_max], inhibitory-source in [-w_max, 0]. Creates the synapse if
  /// absent. `signed_delta` must already carry the source polarity sign.
  void add_weight(NeuronId pre, NeuronId post, double signed_delta, double w_max,
                  bool inhibitory_pre);

  /// Accumulate a pairing outcome into the eligibility trace (decay realized
  /// first). Creates the synapse if absent.
  void add_eligibility(NeuronId pre, NeuronId post, double signed_delta);

  /// Advance plasticity time by one step of `dt`; eligibility decays by the
  /// Euler factor (1 - dt/tau_e) per step, applied lazily.
  void tick(double dt_ms, double tau_e_ms);

  /// R-max update: w += eta * R * e for every synapse with live eligibility,
  /// clamped to the polarity bounds. A no-op when R == 0.
  void apply_reward(double r, double eta, double w_max,
                    const std::vector<std::uint8_t>& inhibitory);

  /// Clear all eligibility traces (trial isolation).
  void reset_eligibility();

  /// Mean weight between two neuron populations: sum of w over existing
  /// (pre in `pre_ids`) x (post in `post_ids`) synapses divided by the full
  /// |pre|*|post| pair count.
  double mean_weight(const std::vector<NeuronId>& pre_ids,
                     const std::vector<NeuronId>& post_ids) const;

  /// FNV-1a hash over (pre, post, w, e) of every synapse carrying a nonzero
  /// weight or eligibility (an all-zero entry is semantically absent), decay
  /// realized, rows traversed in postsynaptic order; used for bit-exactness
  /// checks.
  std::uint64_t state_hash() const;

  /// CSV export `pre_id,post_id,weight,eligibility`, rows sorted by (pre, post).
  void write_csv(const std::string& path) const;

  std::uint32_t plasticity_step() const { return now_; }

  /// Row sorted by postsynaptic id (copy; for export and inspection).
  std::vector<Synapse> sorted_row(NeuronId pre) const;
  const std::vector<Synapse>& row(NeuronId pre) const { return rows_[pre].entries; }

  // Snapshot support: raw access with decay realized / restored verbatim.
  void realize_all_decay() const;
  void restore(std::uint32_t now, std::vector<std::vector<Synapse>> rows);

 private:
  struct Row {
    std::vector<Synapse> entries;        // append order
    std::vector<std::uint32_t> buckets;  // open addressing, idx+1 (0 = empty)

    Synapse* find(NeuronId post);
    const Synapse* find(NeuronId post) const;
    Synapse& insert(NeuronId post, std::uint32_t now);  // must not exist
    void rehash(std::size_t capacity);
  };

  const Synapse* find(NeuronId pre, NeuronId post) const;
  Synapse& find_or_create(NeuronId pre, NeuronId post);
  void realize(Synapse& s) const;

  mutable std::vector<Row> rows_;
  std::vector<std::pair<NeuronId, NeuronId>> active_;  // synapses with e != 0
  std::size_t n_synapses_ = 0;
  std::uint32_t now_ = 0;       // plasticity step counter
  double decay_per_step_ = 1.0; // (1 - dt/tau_e) of the last tick
};

}  // namespace gsnn
