#include "gsnn/query.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gsnn/stimulus.hpp"

namespace gsnn {

bool QueryResult::contains_answer(const std::string& label) const {
  return std::find(answers.begin(), answers.end(), label) != answers.end();
}

QueryResult query(Network& net, const std::string& head, const std::string& relation,
                  double theta) {
  const SimParams& p = net.params;
  const Engram& h = net.registry.at(head);
  const Engram& r = net.registry.at(relation);

  // Snapshot dynamic state; queries are side-effect-free.
  NetworkState saved = net.state;

  QueryResult result;
  result.head = head;
  result.relation = relation;
  result.theta = theta;
  result.cue_ms = p.cue_ms;
  result.readout_ms = p.readout_ms;

  net.state.reset_transient(p.v_reset_mv);
  double t0 = net.state.clock_ms;
  std::vector<StimulusPlan> cue;
  cue.push_back(poisson_stimulus(h, p.stim_rate_hz, t0, t0 + p.cue_ms,
                                 p.stim_amplitude_na, p.stim_pulse_ms,
                                 seed_for(p.seed, "query-cue:" + head)));
  cue.push_back(poisson_stimulus(r, p.stim_rate_hz, t0, t0 + p.cue_ms,
                                 p.stim_amplitude_na, p.stim_pulse_ms,
                                 seed_for(p.seed, "query-cue:" + relation)));

  RunHooks hooks;
  hooks.trace_log = &result.trace;
  run_window(net, cue, p.cue_ms, PlasticityMode::Off, hooks);
  run_window(net, {}, p.readout_ms, PlasticityMode::Off, hooks);

  // Peaks are taken over the whole trial: recall may complete during the
  // cue and needs no self-sustained firing to count.
  double t_end = t0 + p.cue_ms + p.readout_ms;
  for (const auto& label : net.registry.labels()) {
    if (label == head || label == relation) continue;
    if (net.registry.at(label).kind != SymbolKind::Entity) continue;
    QueryResult::Candidate c;
    c.label = label;
    c.peak_sim = result.trace.peak_smoothed(label, t0, t_end);
    c.time_to_threshold_ms = result.trace.time_to_threshold(label, theta, t0, t_end);
    if (c.time_to_threshold_ms >= 0) c.time_to_threshold_ms -= t0;
    result.candidates.push_back(std::move(c));
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const auto& a, const auto& b) { return a.peak_sim > b.peak_sim; });
  for (const auto& c : result.candidates)
    if (c.peak_sim >= theta) result.answers.push_back(c.label);

  net.state = std::move(saved);
  return result;
}

bool verify_triple(Network& net, const std::string& head, const std::string& relation,
                   const std::string& tail, double theta, QueryResult* out) {
  net.registry.at(tail);  // unbound tail is an error, not a "no"
  QueryResult res = query(net, head, relation, theta);
  bool found = res.contains_answer(tail);
  if (out) *out = std::move(res);
  return found;
}

void export_reasoning_trace(const QueryResult& result, const std::string& csv_path,
                            const std::string& json_path) {
  result.trace.write_csv(csv_path, result.trace.has_smoothed());

  nlohmann::json doc;
  doc["head"] = result.head;
  doc["relation"] = result.relation;
  doc["theta"] = result.theta;
  doc["cue_ms"] = result.cue_ms;
  doc["readout_ms"] = result.readout_ms;
  auto& arr = doc["candidates"] = nlohmann::json::array();
  for (const auto& c : result.candidates)
    arr.push_back({{"label", c.label},
                   {"peak_sim", c.peak_sim},
                   {"time_to_threshold_ms", c.time_to_threshold_ms}});
  doc["answers"] = result.answers;
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot write query result JSON: " + json_path);
  out << doc.dump(2) << "\n";
}

}  // namespace gsnn
