#ifndef LFOEQ_ROLLOUT_HPP_
#define LFOEQ_ROLLOUT_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lfoeq/environment.hpp"
#include "lfoeq/mlp.hpp"
#include "lfoeq/normalizer.hpp"
#include "lfoeq/policy.hpp"
#include "lfoeq/rng.hpp"

namespace lfoeq {

// One fixed-size slice of on-policy experience. Raw states feed the
// discriminator; obs rows are what the policy/value networks actually saw
// (normalized when input normalization is on). rewards is the training
// signal: the discriminator-derived reward in imitation runs, the true
// environment reward only in expert training.
struct RolloutBatch {
  Eigen::MatrixXd states;       // N x state_dim
  Eigen::MatrixXd actions;      // N x action_dim
  Eigen::MatrixXd next_states;  // N x state_dim
  Eigen::MatrixXd obs;          // N x state_dim
  Eigen::VectorXd log_probs;    // behavior log prob per step
  Eigen::VectorXd values;       // V(obs_t)
  Eigen::VectorXd rewards;
  std::vector<std::uint8_t> done;  // episode ended after step t
  double bootstrap_value = 0.0;    // V of the state following the last step

  Eigen::Index size() const { return states.rows(); }
  // (s, a) rows for GAIL, (s, s') rows for GAIfO
  Eigen::MatrixXd state_action_inputs() const;
  Eigen::MatrixXd state_transition_inputs() const;
};

// Steps the environment with stochastic policy samples, carrying the episode
// across batch boundaries and resetting on episode end (task termination or
// the fixed horizon). When a normalizer is given its statistics are updated
// with each state right before the policy consumes it.
class RolloutCollector {
 public:
  RolloutCollector(Env& env, std::uint64_t seed);

  RolloutBatch collect(const GaussianPolicy& policy, const Mlp& value_net,
                       RunningNormalizer* normalizer, Eigen::Index batch_size,
                       bool record_env_reward);

 private:
  Env* env_;
  Rng rng_;
  Eigen::VectorXd state_;
  int steps_in_episode_ = 0;
  bool need_reset_ = true;
};

struct GaeResult {
  Eigen::VectorXd advantages;      // normalized to zero mean, unit variance
  Eigen::VectorXd advantages_raw;
  Eigen::VectorXd value_targets;
};

// Exponentially weighted TD advantages; boundaries stop both bootstrapping
// and the recursion.
GaeResult gae_advantages(const RolloutBatch& batch, double gamma, double lambda);

// Deterministic-policy evaluation on the true reward; never part of any
// gradient path.
struct EvalStats {
  double mean_return = 0.0;
  double std_return = 0.0;
  int episodes = 0;
};
EvalStats evaluate_policy(Env& env, const GaussianPolicy& policy,
                          const RunningNormalizer* normalizer, int episodes,
                          Rng& rng);

}  // namespace lfoeq

#endif  // LFOEQ_ROLLOUT_HPP_
