#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "gsnn/common.hpp"

namespace gsnn {

/// All model and experiment parameters. Field defaults are the published
/// model constants; everything is overridable through a key=value config
/// file and/or command-line flags (flags win).
struct SimParams {
  // --- LIF neuron ---------------------------------------------------------
  double dt_ms = 1.0;           ///< integration step (explicit Euler)
  double c_m_nf = 30.0;         ///< membrane capacitance C_m [nF]
  double tau_m_ms = 30.0;       ///< membrane time constant tau_m = C_m / g [ms]
  double v_reset_mv = -65.0;    ///< reset / resting potential (V_s = V_reset)
  double v_threshold_mv = -35.0;
  double tau_ref_ms = 10.0;     ///< absolute refractory period

  // --- STDP ----------------------------------------------------------------
  double tau_s_ms = 30.0;  ///< STDP decay constant
  double tau_w_ms = 20.0;  ///< STDP pairing window half-width
  double a_plus = 1.1;     ///< potentiation learning rate
  double a_minus = 0.95;   ///< depression learning rate

  // --- R-STDP ---------------------------------------------------------------
  double c_r = 10.0;       ///< reward signal magnitude
  double c_p = -10.0;      ///< punishment signal magnitude
  double t_r_ms = 5.0;     ///< reward/punish window T_R
  double tau_e_ms = 100.0; ///< eligibility trace time constant
  double eta = 1.0;        ///< global R-STDP learning-rate scale

  // --- Synapses --------------------------------------------------------------
  double w_max = 5.0;          ///< |weight| bound; excitatory in [0,w_max], inhibitory in [-w_max,0]
  double unit_pulse_na = 3.0;  ///< current injected per unit weight per presynaptic spike [nA]

  // --- Engram arena ----------------------------------------------------------
  std::uint32_t n_neurons = 1000;
  double lambda = 0.05;   ///< engram sparsity; K = lambda * N must be integral
  double rho_inh = 0.15;  ///< inhibitory fraction within each engram

  // --- Readout ----------------------------------------------------------------
  double theta = 0.5;          ///< answer threshold on smoothed similarity
  double theta_neg = 0.2;      ///< negative-control threshold
  double sim_tau_ms = 20.0;    ///< similarity smoothing time constant

  // --- Poisson stimulation ------------------------------------------------------
  double stim_rate_hz = 1000.0;
  double stim_amplitude_na = 240.0;
  double stim_pulse_ms = 1.0;  ///< duration of each injected current pulse

  // --- Encoding protocol ----------------------------------------------------
  double window_ms = 100.0;  ///< per-population stimulation window
  double gap_ms = 0.0;       ///< gap between consecutive windows
  std::uint32_t repetitions = 3;
  bool reset_between_triples = true;  ///< clear transient neuron state between triples

  // --- Query / trial structure ------------------------------------------------
  double cue_ms = 100.0;
  double readout_ms = 100.0;

  // --- Training / induction -----------------------------------------------------
  std::uint32_t epochs = 20;
  double costim_ms = 300.0;      ///< induction co-stimulation duration
  double report_mean_w = 1.0;    ///< emergent-edge mean-weight report threshold

  std::uint64_t seed = 42;

  /// Membrane conductance g = C_m / tau_m [uS]; with Table-default values
  /// this is exactly 1, so currents in nA read directly as mV of drive.
  double conductance_us() const { return c_m_nf / tau_m_ms; }

  /// Engram population size K = lambda * N (validated integral).
  std::uint32_t engram_size() const;

  /// Throws ConfigError on any inconsistent setting.
  void validate() const;
};

/// Parse `key = value` lines (, `#` comments) from a stream into `p`.
/// Unknown keys raise ConfigError. Returns the number of keys applied.
int apply_config_stream(std::istream& in, SimParams& p, const std::string& origin);

/// Load a config file on top of the given defaults.
SimParams load_config_file(const std::string& path, SimParams base = {});

/// Set a single parameter by key (used for flag overrides). Throws on
/// unknown key or malformed value.
void set_param(SimParams& p, const std::string& key, const std::string& value);

/// Serialize the full effective configuration as a key=value document.
std::string echo_config(const SimParams& p);

}  // namespace gsnn
