#include "gsnn/engram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace gsnn {

std::uint32_t Engram::inhibitory_count() const {
  std::uint32_t n = 0;
  for (auto f : inhibitory) n += f;
  return n;
}

const Engram& EngramRegistry::at(const std::string& label) const {
  auto it = engrams_.find(label);
  if (it == engrams_.end())
    throw ExperimentError("unknown symbol: '" + label + "' (not bound to an engram)");
  return it->second;
}

const Engram& EngramRegistry::allocate(const std::string& label, SymbolKind kind,
                                       std::uint64_t seed) {
  if (label.empty()) throw ConfigError("engram label must be non-empty");
  if (contains(label)) throw ConfigError("duplicate engram label: '" + label + "'");
  double kf = lambda_ * static_cast<double>(n_neurons_);
  if (std::abs(kf - std::llround(kf)) > 1e-9 || std::llround(kf) < 1)
    throw ConfigError("lambda * n_neurons must be a positive integer");
  const auto k = static_cast<std::uint32_t>(std::llround(kf));

  // Partial Fisher-Yates over [0, N) with sparse swap bookkeeping, so the
  // draw is O(K) even for large arenas.
  Rng rng(seed_for(seed, label));
  std::unordered_map<std::uint32_t, std::uint32_t> moved;
  auto slot = [&](std::uint32_t i) {
    auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  Engram e;
  e.label = label;
  e.kind = kind;
  e.members.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::uint32_t>(rng.next_below(n_neurons_ - i));
    e.members.push_back(slot(j));
    moved[j] = slot(i);
  }
  // Inhibitory members are the tail of the shuffled draw.
  const auto n_inh = static_cast<std::uint32_t>(std::llround(rho_inh_ * k));
  e.inhibitory.assign(k, 0);
  for (std::uint32_t i = k - n_inh; i < k; ++i) e.inhibitory[i] = 1;

  order_.push_back(label);
  return engrams_.emplace(label, std::move(e)).first->second;
}

void EngramRegistry::add(Engram e) {
  if (contains(e.label)) throw ConfigError("duplicate engram label: '" + e.label + "'");
  order_.push_back(e.label);
  std::string key = e.label;
  engrams_.emplace(std::move(key), std::move(e));
}

double similarity(const Engram& m, const Vec& activation, std::uint32_t n_neurons,
                  double lambda) {
  // sum_i (phi_i - lambda) sigma_i  =  sum_{i in m} sigma_i - lambda * sum_i sigma_i
  double member_sum = 0.0;
  for (NeuronId id : m.members) member_sum += activation[id];
  double total = activation.sum();
  double norm = static_cast<double>(n_neurons) * lambda * (1.0 - lambda);
  return (member_sum - lambda * total) / norm;
}

double similarity(const Engram& m, const RasterStep& step, std::uint32_t n_neurons,
                  double lambda) {
  double member_sum = 0.0;
  if (!step.fired.empty()) {
    // step.fired is sorted ascending; count members via binary search.
    for (NeuronId id : m.members)
      member_sum += std::binary_search(step.fired.begin(), step.fired.end(), id) ? 1.0 : 0.0;
  }
  double total = static_cast<double>(step.fired.size());
  double norm = static_cast<double>(n_neurons) * lambda * (1.0 - lambda);
  return (member_sum - lambda * total) / norm;
}

void TraceLog::ensure_columns(const EngramRegistry& reg) {
  if (!columns_.empty()) return;
  columns_ = watch_.empty() ? reg.labels() : watch_;
}

std::size_t TraceLog::column_of(const std::string& label) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == label) return i;
  throw ExperimentError("trace log does not watch '" + label + "'");
}

void TraceLog::record(const EngramRegistry& reg, const RasterStep& step, double t_ms) {
  ensure_columns(reg);
  times_.push_back(t_ms);
  for (const auto& label : columns_)
    raw_.push_back(similarity(reg.at(label), step, reg.n_neurons(), reg.lambda()));
}

void TraceLog::record(const EngramRegistry& reg, const RasterStep& step, const Vec& trace,
                      double t_ms) {
  record(reg, step, t_ms);
  for (const auto& label : columns_)
    smoothed_.push_back(similarity(reg.at(label), trace, reg.n_neurons(), reg.lambda()));
}

namespace {
double peak_in(const std::vector<double>& data, const std::vector<double>& times,
               std::size_t ncol, std::size_t col, double t0, double t1) {
  double best = -1e300;
  for (std::size_t r = 0; r < times.size(); ++r)
    if (times[r] >= t0 && times[r] <= t1) best = std::max(best, data[r * ncol + col]);
  return best;
}
}  // namespace

double TraceLog::peak_raw(const std::string& label, double t0, double t1) const {
  return peak_in(raw_, times_, columns_.size(), column_of(label), t0, t1);
}

double TraceLog::peak_smoothed(const std::string& label, double t0, double t1) const {
  return peak_in(smoothed_, times_, columns_.size(), column_of(label), t0, t1);
}

double TraceLog::time_to_threshold(const std::string& label, double threshold, double t0,
                                   double t1) const {
  std::size_t col = column_of(label);
  for (std::size_t r = 0; r < times_.size(); ++r)
    if (times_[r] >= t0 && times_[r] <= t1 &&
        smoothed_[r * columns_.size() + col] >= threshold)
      return times_[r];
  return -1.0;
}

void TraceLog::write_csv(const std::string& path, bool smoothed_column) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace CSV: " + path);
  out << (smoothed_column ? "time_ms,label,sim,sim_smoothed\n" : "time_ms,label,sim\n");
  out.precision(17);
  for (std::size_t r = 0; r < times_.size(); ++r)
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      out << times_[r] << ',' << columns_[c] << ',' << raw_[r * columns_.size() + c];
      if (smoothed_column) out << ',' << smoothed_[r * columns_.size() + c];
      out << '\n';
    }
  if (!out) throw IoError("error writing trace CSV: " + path);
}

void write_registry_json(const EngramRegistry& reg, const std::string& path) {
  nlohmann::json doc;
  doc["n_neurons"] = reg.n_neurons();
  doc["lambda"] = reg.lambda();
  doc["rho_inh"] = reg.rho_inh();
  doc["memory_load"] = reg.memory_load();
  auto& arr = doc["engrams"] = nlohmann::json::array();
  for (const auto& label : reg.labels()) {
    const Engram& e = reg.at(label);
    nlohmann::json j;
    j["label"] = e.label;
    j["kind"] = e.kind == SymbolKind::Relation ? "relation" : "entity";
    j["members"] = e.members;
    j["inhibitory"] = e.inhibitory;
    arr.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write registry JSON: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace gsnn
