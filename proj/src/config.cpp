#include "gsnn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace gsnn {
namespace {

struct ParamEntry {
  std::function<std::string(const SimParams&)> get;
  std::function<void(SimParams&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

#define DOUBLE_PARAM(name, field)                                        \
  {                                                                      \
    name, ParamEntry {                                                   \
      [](const SimParams& p) { return fmt_double(p.field); },            \
          [](SimParams& p, const std::string& v) {                       \
            p.field = to_double(name, v);                                \
          }                                                              \
    }                                                                    \
  }

#define U32_PARAM(name, field)                                              \
  {                                                                         \
    name, ParamEntry {                                                      \
      [](const SimParams& p) { return std::to_string(p.field); },           \
          [](SimParams& p, const std::string& v) {                          \
            p.field = static_cast<std::uint32_t>(to_u64(name, v));          \
          }                                                                 \
    }                                                                       \
  }

#define U64_PARAM(name, field)                                              \
  {                                                                         \
    name, ParamEntry {                                                      \
      [](const SimParams& p) { return std::to_string(p.field); },           \
          [](SimParams& p, const std::string& v) { p.field = to_u64(name, v); } \
    }                                                                       \
  }

#define BOOL_PARAM(name, field)                                              \
  {                                                                          \
    name, ParamEntry {                                                       \
      [](const SimParams& p) { return std::string(p.field ? "true" : "false"); }, \
          [](SimParams& p, const std::string& v) { p.field = to_bool(name, v); }  \
    }                                                                        \
  }

// Ordered map so echoed configs are stable and diffable.
const std::map<std::string, ParamEntry>& param_table() {
  static const std::map<std::string, ParamEntry> table = {
      DOUBLE_PARAM("dt_ms", dt_ms),
      DOUBLE_PARAM("c_m_nf", c_m_nf),
      DOUBLE_PARAM("tau_m_ms", tau_m_ms),
      DOUBLE_PARAM("v_reset_mv", v_reset_mv),
      DOUBLE_PARAM("v_threshold_mv", v_threshold_mv),
      DOUBLE_PARAM("tau_ref_ms", tau_ref_ms),
      DOUBLE_PARAM("tau_s_ms", tau_s_ms),
      DOUBLE_PARAM("tau_w_ms", tau_w_ms),
      DOUBLE_PARAM("a_plus", a_plus),
      DOUBLE_PARAM("a_minus", a_minus),
      DOUBLE_PARAM("c_r", c_r),
      DOUBLE_PARAM("c_p", c_p),
      DOUBLE_PARAM("t_r_ms", t_r_ms),
      DOUBLE_PARAM("tau_e_ms", tau_e_ms),
      DOUBLE_PARAM("eta", eta),
      DOUBLE_PARAM("w_max", w_max),
      DOUBLE_PARAM("unit_pulse_na", unit_pulse_na),
      U32_PARAM("n_neurons", n_neurons),
      DOUBLE_PARAM("lambda", lambda),
      DOUBLE_PARAM("rho_inh", rho_inh),
      DOUBLE_PARAM("theta", theta),
      DOUBLE_PARAM("theta_neg", theta_neg),
      DOUBLE_PARAM("sim_tau_ms", sim_tau_ms),
      DOUBLE_PARAM("stim_rate_hz", stim_rate_hz),
      DOUBLE_PARAM("stim_amplitude_na", stim_amplitude_na),
      DOUBLE_PARAM("stim_pulse_ms", stim_pulse_ms),
      DOUBLE_PARAM("window_ms", window_ms),
      DOUBLE_PARAM("gap_ms", gap_ms),
      U32_PARAM("repetitions", repetitions),
      BOOL_PARAM("reset_between_triples", reset_between_triples),
      DOUBLE_PARAM("cue_ms", cue_ms),
      DOUBLE_PARAM("readout_ms", readout_ms),
      U32_PARAM("epochs", epochs),
      DOUBLE_PARAM("costim_ms", costim_ms),
      DOUBLE_PARAM("report_mean_w", report_mean_w),
      U64_PARAM("seed", seed),
  };
  return table;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::uint32_t SimParams::engram_size() const {
  double k = lambda * static_cast<double>(n_neurons);
  return static_cast<std::uint32_t>(std::llround(k));
}

void SimParams::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(dt_ms > 0, "dt_ms must be > 0");
  require(tau_m_ms > 0 && c_m_nf > 0, "tau_m_ms and c_m_nf must be > 0");
  require(tau_ref_ms >= 0, "tau_ref_ms must be >= 0");
  require(v_threshold_mv > v_reset_mv, "v_threshold_mv must exceed v_reset_mv");
  require(tau_s_ms > 0 && tau_w_ms > 0, "STDP time constants must be > 0");
  require(a_plus >= 0 && a_minus >= 0, "STDP learning rates must be >= 0");
  require(t_r_ms >= 0, "t_r_ms must be >= 0");
  require(tau_e_ms > 0, "tau_e_ms must be > 0");
  require(w_max > 0, "w_max must be > 0");
  require(n_neurons > 0, "n_neurons must be > 0");
  require(lambda > 0 && lambda < 1, "lambda must lie in (0,1)");
  double k = lambda * static_cast<double>(n_neurons);
  require(std::abs(k - std::llround(k)) < 1e-9 && std::llround(k) >= 1,
          "lambda * n_neurons must be a positive integer (engram size)");
  require(rho_inh >= 0 && rho_inh <= 1, "rho_inh must lie in [0,1]");
  require(theta > 0 && theta <= 1, "theta must lie in (0,1]");
  require(theta_neg >= 0 && theta_neg <= 1, "theta_neg must lie in [0,1]");
  require(sim_tau_ms > 0, "sim_tau_ms must be > 0");
  require(stim_rate_hz >= 0, "stim_rate_hz must be >= 0");
  require(stim_pulse_ms > 0, "stim_pulse_ms must be > 0");
  require(window_ms > 0, "window_ms must be > 0");
  require(gap_ms >= 0, "gap_ms must be >= 0");
  require(cue_ms > 0 && readout_ms > 0, "cue_ms and readout_ms must be > 0");
  // dt must divide every protocol window boundary.
  auto divides = [this](double span) {
    double q = span / dt_ms;
    return std::abs(q - std::llround(q)) < 1e-6;
  };
  require(divides(window_ms) && divides(gap_ms) && divides(cue_ms) &&
              divides(readout_ms) && divides(t_r_ms) && divides(costim_ms),
          "dt_ms must divide window_ms, gap_ms, cue_ms, readout_ms, t_r_ms "
          "and costim_ms");
}

int apply_config_stream(std::istream& in, SimParams& p, const std::string& origin) {
  std::string line;
  int lineno = 0;
  int applied = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    set_param(p, key, value);
    ++applied;
  }
  return applied;
}

SimParams load_config_file(const std::string& path, SimParams base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  apply_config_stream(in, base, path);
  return base;
}

void set_param(SimParams& p, const std::string& key, const std::string& value) {
  auto it = param_table().find(key);
  if (it == param_table().end())
    throw ConfigError("config: unknown parameter '" + key + "'");
  it->second.set(p, value);
}

std::string echo_config(const SimParams& p) {
  std::ostringstream os;
  for (const auto& [key, entry] : param_table())
    os << key << " = " << entry.get(p) << "\n";
  return os.str();
}

}  // namespace gsnn
