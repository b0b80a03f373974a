#include "gsnn/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "gsnn/stimulus.hpp"

namespace gsnn {

EncodingProtocol EncodingProtocol::from(const SimParams& p) {
  EncodingProtocol proto;
  proto.window_ms = p.window_ms;
  proto.gap_ms = p.gap_ms;
  proto.rate_hz = p.stim_rate_hz;
  proto.amplitude_na = p.stim_amplitude_na;
  proto.pulse_ms = p.stim_pulse_ms;
  proto.repetitions = p.repetitions;
  proto.reset_between_triples = p.reset_between_triples;
  return proto;
}

void encode_triple(Network& net, const std::string& head, const std::string& relation,
                   const std::string& tail, const EncodingProtocol& proto,
                   const RunHooks& hooks) {
  if (proto.repetitions == 0) return;
  const std::string slots[3] = {head, relation, tail};
  const std::string key = "enc:" + head + "\x1f" + relation + "\x1f" + tail;
  for (std::uint32_t rep = 0; rep < proto.repetitions; ++rep) {
    // Quench residual activity between repetitions so the tail of one pass
    // cannot pair backwards with the head of the next.
    if (rep > 0 && proto.reset_between_triples)
      net.state.reset_transient(net.params.v_reset_mv);
    for (int slot = 0; slot < 3; ++slot) {
      const Engram& e = net.registry.at(slots[slot]);
      double t0 = net.state.clock_ms;
      StimulusPlan plan = poisson_stimulus(
          e, proto.rate_hz, t0, t0 + proto.window_ms, proto.amplitude_na,
          proto.pulse_ms,
          seed_for(net.params.seed,
                   key + ":" + std::to_string(rep) + ":" + std::to_string(slot)));
      run_window(net, {plan}, proto.window_ms, PlasticityMode::Stdp, hooks);
      if (proto.gap_ms > 0)
        run_window(net, {}, proto.gap_ms, PlasticityMode::Stdp, hooks);
    }
  }
  if (proto.reset_between_triples) net.state.reset_transient(net.params.v_reset_mv);
}

void encode_graph(Network& net, const std::vector<Triple>& triples,
                  const EncodingProtocol& proto,
                  const std::function<void(std::size_t, std::size_t)>& progress) {
  for (const auto& t : triples)
    for (const auto* label : {&t.head, &t.relation, &t.tail})
      if (!net.registry.contains(*label))
        throw ExperimentError("encode_graph: symbol '" + *label + "' is not bound");

  std::vector<std::size_t> order(triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed_for(net.params.seed, "encode-order"));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  std::size_t done = 0;
  for (std::size_t idx : order) {
    const Triple& t = triples[idx];
    encode_triple(net, t.head, t.relation, t.tail, proto);
    if (progress) progress(++done, triples.size());
  }
}

// ---------------------------------------------------------------------------
// Transitivity training
// ---------------------------------------------------------------------------

namespace {

using PairSet = std::set<std::pair<std::string, std::string>>;

struct RelationIndex {
  PairSet pairs;                                       // (head, tail) in train
  std::map<std::string, std::vector<std::string>> adj; // head -> tails
};

bool has_two_chain(const RelationIndex& ri, const std::string& a, const std::string& c) {
  auto it = ri.adj.find(a);
  if (it == ri.adj.end()) return false;
  for (const auto& b : it->second) {
    if (b == a || b == c) continue;
    if (ri.pairs.count({b, c})) return true;
  }
  return false;
}

}  // namespace

std::vector<TransitivityQuery> build_query_set(const DatasetSplit& split,
                                               const RelationMetaMap& meta,
                                               std::uint64_t seed) {
  std::map<std::string, RelationIndex> index;
  for (const auto& t : split.train) {
    auto& ri = index[t.relation];
    ri.pairs.insert({t.head, t.tail});
    ri.adj[t.head].push_back(t.tail);
  }
  std::set<Triple> known(split.train.begin(), split.train.end());
  known.insert(split.masked.begin(), split.masked.end());

  auto meta_of = [&](const std::string& rel) -> const RelationMeta& {
    auto it = meta.find(rel);
    if (it == meta.end())
      throw ExperimentError("relation '" + rel + "' has no transitivity metadata");
    return it->second;
  };

  // Positives: masked triples answerable as chain completions of the train set.
  std::vector<TransitivityQuery> queries;
  for (const auto& t : split.masked) {
    if (!meta_of(t.relation).is_transitive) continue;
    auto it = index.find(t.relation);
    if (it == index.end()) continue;
    if (t.head != t.tail && has_two_chain(it->second, t.head, t.tail))
      queries.push_back({t, true});
  }
  std::size_t n_positive = queries.size();

  // Chain-derived negatives over non-transitive relations, class-balanced.
  std::vector<Triple> pool;
  for (const auto& [rel, ri] : index) {
    if (meta_of(rel).is_transitive) continue;
    for (const auto& [a, tails] : ri.adj)
      for (const auto& b : tails) {
        auto jt = ri.adj.find(b);
        if (jt == ri.adj.end()) continue;
        for (const auto& c : jt->second) {
          Triple cand{a, rel, c};
          if (a == c || known.count(cand)) continue;
          pool.push_back(std::move(cand));
        }
      }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  Rng rng(seed_for(seed, "negative-queries"));
  for (std::size_t i = pool.size(); i > 1; --i)
    std::swap(pool[i - 1], pool[rng.next_below(i)]);
  for (std::size_t i = 0; i < n_positive && !pool.empty(); ++i)
    queries.push_back({pool[i % pool.size()], false});
  return queries;
}

namespace {

/// One reward-modulated question trial. Returns the outcome; weights are
/// the only state that survives (neuron state and eligibility are cleared).
TrialOutcome run_trial(Network& net, const TransitivityQuery& q, std::uint32_t epoch,
                       std::size_t trial_idx) {
  const SimParams& p = net.params;
  const Engram& head = net.registry.at(q.triple.head);
  const Engram& rel = net.registry.at(q.triple.relation);
  const Engram& tail = net.registry.at(q.triple.tail);

  net.state.reset_transient(p.v_reset_mv);
  net.synapses.reset_eligibility();
  net.reward.clear();

  const std::string tag = "trial:" + std::to_string(epoch) + ":" + std::to_string(trial_idx);
  double t0 = net.state.clock_ms;
  std::vector<StimulusPlan> cue;
  cue.push_back(poisson_stimulus(head, p.stim_rate_hz, t0, t0 + p.cue_ms,
                                 p.stim_amplitude_na, p.stim_pulse_ms,
                                 seed_for(p.seed, tag + ":h:" + q.triple.head)));
  cue.push_back(poisson_stimulus(rel, p.stim_rate_hz, t0, t0 + p.cue_ms,
                                 p.stim_amplitude_na, p.stim_pulse_ms,
                                 seed_for(p.seed, tag + ":r:" + q.triple.relation)));
  // The trial ends at the first theta crossing of the tail's smoothed
  // similarity, or after the readout window.
  TrialOutcome out;
  out.query = q.triple;
  out.truth = q.truth;
  double peak = -1e300;
  RunHooks watch_tail;
  watch_tail.on_step = [&](const RasterStep&) {
    double sim = similarity(tail, net.state.trace, p.n_neurons, p.lambda);
    peak = std::max(peak, sim);
    if (sim >= p.theta) {
      out.answered_yes = true;
      return false;
    }
    return true;
  };
  run_window(net, cue, p.cue_ms, PlasticityMode::Rstdp, watch_tail);
  if (!out.answered_yes)
    run_window(net, {}, p.readout_ms, PlasticityMode::Rstdp, watch_tail);
  out.peak_sim = peak;
  out.correct = out.answered_yes == q.truth;

  // Deliver the signal and let R-STDP convert eligibility within T_R.
  double t_answer = net.state.clock_ms;
  if (out.correct) {
    net.reward.deliver_reward(t_answer);
    out.reward = p.c_r;
  } else {
    net.reward.deliver_punish(t_answer);
    out.reward = p.c_p;
  }
  run_window(net, {}, p.t_r_ms + p.dt_ms, PlasticityMode::Rstdp);
  net.reward.clear();
  return out;
}

}  // namespace

TrainingResult train_transitivity(Network& net, const DatasetSplit& split,
                                  const RelationMetaMap& meta, std::uint32_t epochs) {
  TrainingResult result;
  if (epochs == 0) return result;

  auto queries = build_query_set(split, meta, net.params.seed);
  for (const auto& q : queries) (q.truth ? result.n_positive_queries : result.n_negative_queries)++;
  if (queries.empty())
    throw ExperimentError(
        "train_transitivity: no masked chain-completion queries; check the "
        "dataset's chain structure and mask fraction");

  for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
    std::vector<std::size_t> order(queries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed_for(net.params.seed, "trial-order:" + std::to_string(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);

    std::size_t n_correct = 0;
    double reward_sum = 0.0;
    std::vector<TrialOutcome> outcomes;
    outcomes.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      TrialOutcome out = run_trial(net, queries[order[k]], epoch, k);
      n_correct += out.correct;
      reward_sum += out.reward;
      outcomes.push_back(std::move(out));
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.accuracy = static_cast<double>(n_correct) / static_cast<double>(order.size());
    stats.mean_reward = reward_sum / static_cast<double>(order.size());
    result.epochs.push_back(stats);
    if (epoch + 1 == epochs) result.last_epoch_trials = std::move(outcomes);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Induction
// ---------------------------------------------------------------------------

Eigen::MatrixXd engram_mean_weights(const Network& net) {
  const auto& reg = net.registry;
  const auto m = static_cast<Eigen::Index>(reg.size());
  std::vector<std::vector<std::uint32_t>> member_of(net.params.n_neurons);
  std::vector<double> pop_size(m);
  for (Eigen::Index ei = 0; ei < m; ++ei) {
    const Engram& e = reg.at(reg.labels()[ei]);
    pop_size[ei] = static_cast<double>(e.members.size());
    for (NeuronId id : e.members) member_of[id].push_back(static_cast<std::uint32_t>(ei));
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, m);
  for (NeuronId pre = 0; pre < net.synapses.n_neurons(); ++pre) {
    if (member_of[pre].empty()) continue;
    for (const Synapse& s : net.synapses.row(pre))
      for (auto ei : member_of[pre])
        for (auto ej : member_of[s.post]) sums(ei, ej) += s.w;
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sums(i, j) /= pop_size[i] * pop_size[j];
  return sums;
}

bool InductionReport::contains(const Triple& t) const {
  return std::any_of(emergent.begin(), emergent.end(),
                     [&](const EmergentTriple& e) { return e.triple == t; });
}

void InductionReport::write_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write induction report: " + path);
  out << "head\trelation\ttail\tmean_w_head_rel\tmean_w_rel_tail\tnew_head_rel\tnew_rel_tail\n";
  out.precision(17);
  for (const auto& e : emergent)
    out << e.triple.head << '\t' << e.triple.relation << '\t' << e.triple.tail << '\t'
        << e.mean_w_head_rel << '\t' << e.mean_w_rel_tail << '\t' << e.new_head_rel
        << '\t' << e.new_rel_tail << '\n';
}

InductionReport run_induction(Network& net, const std::vector<Triple>& encoded,
                              const std::vector<std::string>& costim_labels,
                              double duration_ms) {
  InductionReport report;
  if (duration_ms == 0.0) return report;
  const SimParams& p = net.params;
  for (const auto& label : costim_labels) net.registry.at(label);

  Eigen::MatrixXd before = engram_mean_weights(net);

  net.state.reset_transient(p.v_reset_mv);
  double t0 = net.state.clock_ms;
  std::vector<StimulusPlan> plans;
  for (const auto& label : costim_labels)
    plans.push_back(poisson_stimulus(net.registry.at(label), p.stim_rate_hz, t0,
                                     t0 + duration_ms, p.stim_amplitude_na,
                                     p.stim_pulse_ms,
                                     seed_for(p.seed, "costim:" + label)));
  run_window(net, plans, duration_ms, PlasticityMode::Stdp);
  net.state.reset_transient(p.v_reset_mv);

  Eigen::MatrixXd after = engram_mean_weights(net);

  std::set<Triple> known(encoded.begin(), encoded.end());
  const auto& labels = net.registry.labels();
  const double thr = p.report_mean_w;
  for (std::size_t ri = 0; ri < labels.size(); ++ri) {
    if (net.registry.at(labels[ri]).kind != SymbolKind::Relation) continue;
    for (std::size_t hi = 0; hi < labels.size(); ++hi) {
      if (hi == ri || net.registry.at(labels[hi]).kind != SymbolKind::Entity) continue;
      if (after(hi, ri) < thr) continue;
      for (std::size_t ti = 0; ti < labels.size(); ++ti) {
        if (ti == ri || ti == hi) continue;
        if (net.registry.at(labels[ti]).kind != SymbolKind::Entity) continue;
        if (after(ri, ti) < thr) continue;
        bool new_hr = before(hi, ri) < thr;
        bool new_rt = before(ri, ti) < thr;
        if (!new_hr && !new_rt) continue;  // knowledge that was already encoded
        Triple t{labels[hi], labels[ri], labels[ti]};
        if (known.count(t)) continue;
        report.emergent.push_back(
            {t, after(hi, ri), after(ri, ti), new_hr, new_rt});
      }
    }
  }
  std::stable_sort(report.emergent.begin(), report.emergent.end(),
                   [](const EmergentTriple& a, const EmergentTriple& b) {
                     return std::min(a.mean_w_head_rel, a.mean_w_rel_tail) >
                            std::min(b.mean_w_head_rel, b.mean_w_rel_tail);
                   });
  return report;
}

// ---------------------------------------------------------------------------
// Inhibitory sweep
// ---------------------------------------------------------------------------

double SweepResult::peak_ratio() const {
  double best_ratio = 0.0;
  double best_acc = -1.0;
  for (const auto& pt : points)
    if (pt.median_accuracy > best_acc) {
      best_acc = pt.median_accuracy;
      best_ratio = pt.ratio;
    }
  return best_ratio;
}

void SweepResult::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write sweep CSV: " + path);
  out << "ratio,median_accuracy";
  if (!points.empty())
    for (std::size_t s = 0; s < points.front().accuracies.size(); ++s)
      out << ",accuracy_seed" << s;
  out << "\n";
  out.precision(17);
  for (const auto& pt : points) {
    out << pt.ratio << ',' << pt.median_accuracy;
    for (double a : pt.accuracies) out << ',' << a;
    out << '\n';
  }
}

SweepResult sweep_inhibitory_ratio(const SimParams& base,
                                   const std::vector<Triple>& triples,
                                   const RelationMetaMap& meta,
                                   const std::vector<double>& ratios,
                                   std::uint32_t epochs_per_point,
                                   const std::vector<std::uint64_t>& seeds,
                                   unsigned jobs, double mask_fraction) {
  struct Task {
    std::size_t ratio_idx;
    std::size_t seed_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < ratios.size(); ++r)
    for (std::size_t s = 0; s < seeds.size(); ++s) tasks.push_back({r, s});

  std::vector<std::vector<double>> acc(ratios.size(),
                                       std::vector<double>(seeds.size(), 0.0));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        SimParams p = base;
        p.rho_inh = ratios[tasks[i].ratio_idx];
        p.seed = seeds[tasks[i].seed_idx];
        p.epochs = epochs_per_point;
        Network net(p);
        bind_symbols(triples, net);
        DatasetSplit split = mask_split(triples, mask_fraction, p.seed);
        encode_graph(net, split.train, EncodingProtocol::from(p));
        TrainingResult tr = train_transitivity(net, split, meta, epochs_per_point);
        acc[tasks[i].ratio_idx][tasks[i].seed_idx] =
            tr.epochs.empty() ? 0.0 : tr.epochs.back().accuracy;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    SweepPoint pt;
    pt.ratio = ratios[r];
    pt.accuracies = acc[r];
    std::vector<double> sorted = acc[r];
    std::sort(sorted.begin(), sorted.end());
    pt.median_accuracy = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0)
      pt.median_accuracy = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    result.points.push_back(std::move(pt));
  }
  return result;
}

}  // namespace gsnn
