#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsnn/kg.hpp"
#include "gsnn/network.hpp"

namespace gsnn {

/// Sequential-stimulation protocol for one triple: head, relation and tail
/// populations are driven in turn, each for `window_ms`, `repetitions`
/// times. With gap_ms = 0 consecutive windows abut, so spike pairs across
/// population boundaries fall inside the STDP window.
struct EncodingProtocol {
  double window_ms = 100.0;
  double gap_ms = 0.0;
  double rate_hz = 1000.0;
  double amplitude_na = 240.0;
  double pulse_ms = 1.0;
  std::uint32_t repetitions = 3;
  bool reset_between_triples = true;

  static EncodingProtocol from(const SimParams& p);
};

/// Drive A, then R, then B with Poisson input under STDP.
void encode_triple(Network& net, const std::string& head, const std::string& relation,
                   const std::string& tail, const EncodingProtocol& proto,
                   const RunHooks& hooks = {});

/// Encode every triple in a deterministic seeded-shuffle order.
/// `progress` (optional) is called after each triple with (done, total).
void encode_graph(Network& net, const std::vector<Triple>& triples,
                  const EncodingProtocol& proto,
                  const std::function<void(std::size_t, std::size_t)>& progress = {});

// ---------------------------------------------------------------------------
// Reward-driven transitivity training
// ---------------------------------------------------------------------------

struct TrialOutcome {
  Triple query;
  bool truth = false;         ///< ground-truth answer from relation metadata
  bool answered_yes = false;  ///< smoothed Sim of the tail crossed theta
  bool correct = false;
  double peak_sim = 0.0;      ///< peak smoothed Sim of the queried tail
  double reward = 0.0;        ///< emitted signal: C_r iff correct, else C_p
};

struct EpochStats {
  std::uint32_t epoch = 0;
  double accuracy = 0.0;
  double mean_reward = 0.0;
};

struct TrainingResult {
  std::vector<EpochStats> epochs;
  std::vector<TrialOutcome> last_epoch_trials;
  std::size_t n_positive_queries = 0;
  std::size_t n_negative_queries = 0;
};

/// Masked-query set: masked triples that are chain completions of the train
/// set (truth = relation transitivity), balanced 1:1 with chain-derived
/// negative queries over non-transitive relations.
struct TransitivityQuery {
  Triple triple;
  bool truth = false;
};
std::vector<TransitivityQuery> build_query_set(const DatasetSplit& split,
                                               const RelationMetaMap& meta,
                                               std::uint64_t seed);

/// One reward-modulated trial per masked query per epoch: cue head+relation,
/// read the tail's smoothed similarity against theta, deliver C_r on a
/// correct answer and C_p otherwise, and let R-STDP convert eligibility into
/// weight change during the reward window. Neuron state and eligibility are
/// reset between trials; weights persist.
TrainingResult train_transitivity(Network& net, const DatasetSplit& split,
                                  const RelationMetaMap& meta, std::uint32_t epochs);

// ---------------------------------------------------------------------------
// Induction (conceptualization)
// ---------------------------------------------------------------------------

struct EmergentTriple {
  Triple triple;
  double mean_w_head_rel = 0.0;
  double mean_w_rel_tail = 0.0;
  bool new_head_rel = false;
  bool new_rel_tail = false;
};

struct InductionReport {
  std::vector<EmergentTriple> emergent;  // strongest first

  bool contains(const Triple& t) const;
  void write_tsv(const std::string& path) const;
};

/// Mean synaptic weight between every ordered engram pair (row = source).
Eigen::MatrixXd engram_mean_weights(const Network& net);

/// Co-stimulate the listed engrams with STDP enabled for `duration_ms`,
/// then report candidate emergent triples: (head, relation, tail) not in
/// `encoded`, whose head->relation and relation->tail mean weights both sit
/// at or above the report threshold with at least one of the two links newly
/// crossing it during co-stimulation.
InductionReport run_induction(Network& net, const std::vector<Triple>& encoded,
                              const std::vector<std::string>& costim_labels,
                              double duration_ms);

// ---------------------------------------------------------------------------
// Inhibitory-ratio sweep
// ---------------------------------------------------------------------------

struct SweepPoint {
  double ratio = 0.0;
  std::vector<double> accuracies;  // one per seed
  double median_accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;

  double peak_ratio() const;
  void write_csv(const std::string& path) const;
};

/// For each inhibitory ratio: rebuild the arena, encode the train split and
/// run transitivity training, recording the final-epoch accuracy, for each
/// of `seeds`. Points run in parallel on up to `jobs` threads; results are
/// deterministic and keyed by (ratio, seed).
SweepResult sweep_inhibitory_ratio(const SimParams& base,
                                   const std::vector<Triple>& triples,
                                   const RelationMetaMap& meta,
                                   const std::vector<double>& ratios,
                                   std::uint32_t epochs_per_point,
                                   const std::vector<std::uint64_t>& seeds,
                                   unsigned jobs = 1, double mask_fraction = 0.3);

}  // namespace gsnn
