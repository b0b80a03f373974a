#pragma once

#include "gsnn/config.hpp"

namespace gsnn {

/// Pair-based STDP window. `delta_t_ms` is t_pre - t_post, so a presynaptic
/// spike that precedes the postsynaptic one gives a negative delta and
/// potentiation:
///   A_plus  * exp(dt/tau_s)   for -tau_w < dt < 0
///  -A_minus * exp(-dt/tau_s)  for  0 < dt < tau_w
///   0                         otherwise (including dt == 0)
double stdp_delta(double delta_t_ms, const SimParams& p);

/// Latest reward / punishment delivery times; punishment wins on overlap.
struct RewardSchedule {
  static constexpr double kNever = -1e300;
  double t_reward_ms = kNever;
  double t_punish_ms = kNever;

  void deliver_reward(double t_ms) { t_reward_ms = t_ms; }
  void deliver_punish(double t_ms) { t_punish_ms = t_ms; }
  void clear() { t_reward_ms = t_punish_ms = kNever; }
};

/// Piecewise reward signal: C_p while within T_R of the latest punishment,
/// else C_r while within T_R of the latest reward, else 0.
double reward_signal(double t_ms, const RewardSchedule& sched, const SimParams& p);

}  // namespace gsnn
