#include "lfoeq/rollout.hpp"

#include <cmath>

#include "lfoeq/errors.hpp"

namespace lfoeq {

Eigen::MatrixXd RolloutBatch::state_action_inputs() const {
  Eigen::MatrixXd x(states.rows(), states.cols() + actions.cols());
  x << states, actions;
  return x;
}

Eigen::MatrixXd RolloutBatch::state_transition_inputs() const {
  Eigen::MatrixXd x(states.rows(), states.cols() + next_states.cols());
  x << states, next_states;
  return x;
}

RolloutCollector::RolloutCollector(Env& env, std::uint64_t seed)
    : env_(&env), rng_(seed) {}

RolloutBatch RolloutCollector::collect(const GaussianPolicy& policy,
                                       const Mlp& value_net,
                                       RunningNormalizer* normalizer,
                                       Eigen::Index batch_size,
                                       bool record_env_reward) {
  const int state_dim = env_->state_dim();
  const int action_dim = env_->action_dim();
  RolloutBatch batch;
  batch.states.resize(batch_size, state_dim);
  batch.actions.resize(batch_size, action_dim);
  batch.next_states.resize(batch_size, state_dim);
  batch.obs.resize(batch_size, state_dim);
  batch.rewards = Eigen::VectorXd::Zero(batch_size);
  batch.done.assign(static_cast<std::size_t>(batch_size), 0);

  for (Eigen::Index t = 0; t < batch_size; ++t) {
    if (need_reset_) {
      state_ = env_->reset();
      steps_in_episode_ = 0;
      need_reset_ = false;
    }
    Eigen::VectorXd obs = state_;
    if (normalizer != nullptr) {
      normalizer->update_one(state_);
      obs = normalizer->apply(state_);
    }
    Eigen::VectorXd action = policy.sample(obs, rng_, false);
    Env::StepResult step = env_->step(action);

    batch.states.row(t) = state_;
    batch.obs.row(t) = obs;
    batch.actions.row(t) = action;
    batch.next_states.row(t) = step.next_state;
    if (record_env_reward) batch.rewards[t] = step.reward;

    state_ = step.next_state;
    ++steps_in_episode_;
    if (step.terminated || steps_in_episode_ >= env_->horizon()) {
      batch.done[static_cast<std::size_t>(t)] = 1;
      need_reset_ = true;
    }
  }

  // behavior log-probs and values, batched over the frozen obs rows
  batch.log_probs = policy.log_prob(batch.obs, batch.actions);
  batch.values = value_net.forward(batch.obs).output().col(0);
  if (batch.done.back()) {
    batch.bootstrap_value = 0.0;
  } else {
    Eigen::VectorXd boot_obs =
        normalizer != nullptr ? normalizer->apply(state_) : state_;
    batch.bootstrap_value = value_net.forward(boot_obs.transpose()).output()(0, 0);
  }
  return batch;
}

GaeResult gae_advantages(const RolloutBatch& batch, double gamma, double lambda) {
  const Eigen::Index n = batch.size();
  if (batch.rewards.size() != n || batch.values.size() != n) {
    throw ShapeMismatch("gae_advantages: batch fields inconsistent");
  }
  GaeResult result;
  result.advantages_raw.resize(n);
  double carry = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    bool boundary = batch.done[static_cast<std::size_t>(t)] != 0;
    double next_value;
    if (boundary) {
      next_value = 0.0;  // finite-horizon episodes: no bootstrap across ends
    } else if (t == n - 1) {
      next_value = batch.bootstrap_value;
    } else {
      next_value = batch.values[t + 1];
    }
    double delta = batch.rewards[t] + gamma * next_value - batch.values[t];
    carry = boundary ? delta : delta + gamma * lambda * carry;
    result.advantages_raw[t] = carry;
  }
  result.value_targets = result.advantages_raw + batch.values;

  double mean = result.advantages_raw.mean();
  double var = (result.advantages_raw.array() - mean).square().mean();
  result.advantages =
      (result.advantages_raw.array() - mean) / (std::sqrt(var) + 1e-8);
  return result;
}

EvalStats evaluate_policy(Env& env, const GaussianPolicy& policy,
                          const RunningNormalizer* normalizer, int episodes,
                          Rng& rng) {
  (void)rng;  // resets draw from the env's own stream
  EvalStats stats;
  stats.episodes = episodes;
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    Eigen::VectorXd state = env.reset();
    double ep_return = 0.0;
    for (int t = 0; t < env.horizon(); ++t) {
      Eigen::VectorXd obs =
          normalizer != nullptr ? normalizer->apply(state) : state;
      Eigen::VectorXd action = policy.sample(obs, rng, true);
      Env::StepResult step = env.step(action);
      ep_return += step.reward;
      state = step.next_state;
      if (step.terminated) break;
    }
    returns.push_back(ep_return);
  }
  double sum = 0.0;
  for (double r : returns) sum += r;
  stats.mean_return = sum / static_cast<double>(episodes);
  double sq = 0.0;
  for (double r : returns) sq += (r - stats.mean_return) * (r - stats.mean_return);
  stats.std_return = std::sqrt(sq / static_cast<double>(episodes));
  return stats;
}

}  // namespace lfoeq
