#include "gsnn/plasticity.hpp"

#include <cmath>

namespace gsnn {

double stdp_delta(double delta_t_ms, const SimParams& p) {
  if (delta_t_ms > -p.tau_w_ms && delta_t_ms < 0.0)
    return p.a_plus * std::exp(delta_t_ms / p.tau_s_ms);
  if (delta_t_ms > 0.0 && delta_t_ms < p.tau_w_ms)
    return -p.a_minus * std::exp(-delta_t_ms / p.tau_s_ms);
  return 0.0;
}

double reward_signal(double t_ms, const RewardSchedule& sched, const SimParams& p) {
  bool in_punish = t_ms >= sched.t_punish_ms && t_ms - sched.t_punish_ms <= p.t_r_ms;
  bool in_reward = t_ms >= sched.t_reward_ms && t_ms - sched.t_reward_ms <= p.t_r_ms;
  if (in_punish) return p.c_p;  // punishment takes precedence on overlap
  if (in_reward) return p.c_r;
  return 0.0;
}

}  // namespace gsnn
