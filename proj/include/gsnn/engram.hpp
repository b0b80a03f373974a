#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsnn/common.hpp"
#include "gsnn/config.hpp"
#include "gsnn/raster.hpp"

namespace gsnn {

enum class SymbolKind : std::uint8_t { Entity = 0, Relation = 1 };

/// A population-coded symbol: K = lambda*N neuron indices with
/// per-member excitatory/inhibitory tags. Members are stored in draw
/// order; the inhibitory members are the last round(rho_inh*K) drawn.
struct Engram {
  std::string label;
  SymbolKind kind = SymbolKind::Entity;
  std::vector<NeuronId> members;      // draw order
  std::vector<std::uint8_t> inhibitory;  // parallel to members

  std::uint32_t size() const { return static_cast<std::uint32_t>(members.size()); }
  std::uint32_t inhibitory_count() const;
};

/// Registry of all engrams sharing one neuron arena of N neurons.
class EngramRegistry {
 public:
  EngramRegistry() = default;
  EngramRegistry(std::uint32_t n_neurons, double lambda, double rho_inh)
      : n_neurons_(n_neurons), lambda_(lambda), rho_inh_(rho_inh) {}

  std::uint32_t n_neurons() const { return n_neurons_; }
  double lambda() const { return lambda_; }
  double rho_inh() const { return rho_inh_; }
  std::size_t size() const { return order_.size(); }
  /// Memory load alpha = M / N.
  double memory_load() const {
    return n_neurons_ ? static_cast<double>(order_.size()) / n_neurons_ : 0.0;
  }

  bool contains(const std::string& label) const { return engrams_.count(label) != 0; }
  const Engram& at(const std::string& label) const;
  const std::vector<std::string>& labels() const { return order_; }  // insertion order

  /// Draw K members uniformly without replacement, seeded by
  /// (seed, label) so allocation is independent of call order.
  const Engram& allocate(const std::string& label, SymbolKind kind, std::uint64_t seed);

  void add(Engram e);  // used by snapshot load

 private:
  std::uint32_t n_neurons_ = 0;
  double lambda_ = 0.0;
  double rho_inh_ = 0.0;
  std::map<std::string, Engram> engrams_;
  std::vector<std::string> order_;
};

/// Instantaneous similarity between engram `m` and a firing state:
///   Sim^m = 1/(N*lambda*(1-lambda)) * sum_i (phi_i^m - lambda) * sigma_i
/// `activation` may be a 0/1 spike indicator (raw similarity) or a decaying
/// per-neuron spike trace (smoothed similarity); the expression is linear.
double similarity(const Engram& m, const Vec& activation, std::uint32_t n_neurons,
                  double lambda);

/// Raw similarity straight from one raster step.
double similarity(const Engram& m, const RasterStep& step, std::uint32_t n_neurons,
                  double lambda);

/// Time series of per-engram similarity values (raw and smoothed),
/// exportable as CSV `time_ms,label,sim`.
class TraceLog {
 public:
  void set_watch(std::vector<std::string> labels) { watch_ = std::move(labels); }
  const std::vector<std::string>& watch() const { return watch_; }

  /// Append one row with raw Sim per watched engram (all registered
  /// engrams when the watch list is empty).
  void record(const EngramRegistry& reg, const RasterStep& step, double t_ms);
  /// Append one row using both the raster (raw) and the trace vector (smoothed).
  void record(const EngramRegistry& reg, const RasterStep& step, const Vec& trace,
              double t_ms);

  std::size_t rows() const { return times_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<double>& times() const { return times_; }
  double raw(std::size_t row, std::size_t col) const { return raw_[row * columns_.size() + col]; }
  double smoothed(std::size_t row, std::size_t col) const {
    return smoothed_[row * columns_.size() + col];
  }
  bool has_smoothed() const { return !smoothed_.empty(); }

  double peak_raw(const std::string& label, double t_begin, double t_end) const;
  double peak_smoothed(const std::string& label, double t_begin, double t_end) const;
  /// First time within [t_begin, t_end] at which the smoothed similarity of
  /// `label` reaches `threshold`; negative if never.
  double time_to_threshold(const std::string& label, double threshold, double t_begin,
                           double t_end) const;

  /// CSV rows `time_ms,label,sim` (raw similarity, one row per sample/label).
  void write_csv(const std::string& path, bool smoothed_column = false) const;

 private:
  void ensure_columns(const EngramRegistry& reg);
  std::size_t column_of(const std::string& label) const;

  std::vector<std::string> watch_;
  std::vector<std::string> columns_;
  std::vector<double> times_;
  std::vector<double> raw_;
  std::vector<double> smoothed_;
};

/// Registry JSON export: label, kind, member ids, polarity flags.
void write_registry_json(const EngramRegistry& reg, const std::string& path);

}  // namespace gsnn
