#pragma once

#include <string>
#include <vector>

#include "gsnn/engram.hpp"
#include "gsnn/network.hpp"

namespace gsnn {

/// Cue-based retrieval result. Candidates are every watched entity engram
/// other than the cue pair, ranked by peak smoothed similarity within the
/// readout window; the answer set is the candidates at or above theta.
struct QueryResult {
  std::string head;
  std::string relation;
  double theta = 0.5;
  double cue_ms = 0.0;
  double readout_ms = 0.0;

  struct Candidate {
    std::string label;
    double peak_sim = 0.0;            ///< peak smoothed Sim in the readout window
    double time_to_threshold_ms = -1; ///< first crossing of theta; -1 if never
  };
  std::vector<Candidate> candidates;  // sorted by peak_sim descending
  std::vector<std::string> answers;   // labels with peak_sim >= theta
  TraceLog trace;                     // full similarity traces of the trial

  bool contains_answer(const std::string& label) const;
};

/// Stimulate head+relation for the cue window, run through the readout
/// window with plasticity off, and rank candidates. The network's dynamic
/// state is snapshotted and restored: a query never perturbs weights,
/// eligibility or neuron state.
QueryResult query(Network& net, const std::string& head, const std::string& relation,
                  double theta);

/// True iff `tail` lands in the answer set of query(head, relation).
/// The full query result (with the tail's trace) is returned through `out`
/// when non-null.
bool verify_triple(Network& net, const std::string& head, const std::string& relation,
                   const std::string& tail, double theta, QueryResult* out = nullptr);

/// Write the similarity time series backing a result as CSV
/// (`time_ms,label,sim`) and the ranked candidates as JSON.
void export_reasoning_trace(const QueryResult& result, const std::string& csv_path,
                            const std::string& json_path);

}  // namespace gsnn
