#include "lfoeq/imitation.hpp"

#include <algorithm>

#include "lfoeq/discriminator.hpp"
#include "lfoeq/environment.hpp"
#include "lfoeq/errors.hpp"
#include "lfoeq/normalizer.hpp"
#include "lfoeq/policy.hpp"
#include "lfoeq/rollout.hpp"
#include "lfoeq/trpo.hpp"

namespace lfoeq {

ImitationMode mode_from_string(const std::string& name) {
  if (name == "gail") return ImitationMode::kGail;
  if (name == "gaifo") return ImitationMode::kGaifo;
  throw ConfigError("unknown imitation mode: " + name);
}

std::string to_string(ImitationMode mode) {
  return mode == ImitationMode::kGail ? "gail" : "gaifo";
}

namespace {

// batch of expert rows sampled without replacement (partial Fisher-Yates)
Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& pool, Eigen::Index n, Rng& rng) {
  n = std::min(n, pool.rows());
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(pool.rows()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    indices[i] = static_cast<Eigen::Index>(i);
  }
  Eigen::MatrixXd out(n, pool.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t j = static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(rng.uniform_index(
                        static_cast<std::uint64_t>(pool.rows() - i)));
    std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
    out.row(i) = pool.row(indices[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

LearningCurve train(const std::string& env_id, const TrajectoryDataset& expert,
                    const ImitationConfig& config) {
  if (config.mode == ImitationMode::kGail && expert.stripped()) {
    throw DatasetModeMismatch(
        "gail requires expert actions but the dataset is action-stripped");
  }
  if (expert.n_trajectories() == 0) {
    throw DatasetModeMismatch("expert dataset is empty");
  }

  Rng master(config.seed);
  const std::uint64_t env_seed = master.fork();
  const std::uint64_t eval_env_seed = master.fork();
  Rng init_rng(master.fork());
  const std::uint64_t collector_seed = master.fork();
  Rng expert_sampler(master.fork());
  Rng eval_rng(master.fork());

  EnvConfig env_config;
  env_config.noise_bound = config.noise_bound;
  env_config.horizon = config.horizon;
  Env env(env_id, env_config, env_seed);
  Env eval_env(env_id, env_config, eval_env_seed);

  if (config.mode == ImitationMode::kGail &&
      expert.action_dim != env.action_dim()) {
    throw DatasetModeMismatch("expert action dimension does not match env");
  }
  if (expert.state_dim != env.state_dim()) {
    throw DatasetModeMismatch("expert state dimension does not match env");
  }

  const Eigen::Index disc_input_dim =
      config.mode == ImitationMode::kGail
          ? env.state_dim() + env.action_dim()
          : 2 * env.state_dim();
  Eigen::MatrixXd expert_inputs = config.mode == ImitationMode::kGail
                                      ? expert.state_action_matrix()
                                      : expert.state_transition_matrix();

  GaussianPolicy policy(env.state_dim(), config.hidden, env.action_dim(),
                        config.activation, init_rng);
  std::vector<Eigen::Index> value_sizes;
  value_sizes.push_back(env.state_dim());
  value_sizes.insert(value_sizes.end(), config.hidden.begin(), config.hidden.end());
  value_sizes.push_back(1);
  Mlp value_net(value_sizes, config.activation, init_rng);
  Adam value_optimizer(value_net.num_params(), config.value_lr);
  Discriminator disc(disc_input_dim, config.hidden, config.activation, init_rng,
                     config.spectral_norm, config.disc_lr,
                     config.disc_entropy_coef);
  RunningNormalizer normalizer(env.state_dim());

  RolloutCollector collector(env, collector_seed);
  TrpoConfig trpo_config;
  trpo_config.max_kl = config.max_kl;
  trpo_config.entropy_coef = config.policy_entropy_coef;

  LearningCurve curve;
  double last_disc_loss = 0.0;
  double last_kl = 0.0;
  const long n_cycles =
      (config.total_env_steps + config.batch_size - 1) / config.batch_size;

  for (long cycle = 0; cycle < n_cycles; ++cycle) {
    RolloutBatch batch = collector.collect(
        policy, value_net, config.input_norm ? &normalizer : nullptr,
        config.batch_size, /*record_env_reward=*/false);
    Eigen::MatrixXd agent_inputs = config.mode == ImitationMode::kGail
                                       ? batch.state_action_inputs()
                                       : batch.state_transition_inputs();
    batch.rewards = disc.rewards(agent_inputs);

    GaeResult gae = gae_advantages(batch, config.gamma, config.lambda);
    TrpoResult step = trpo_step(policy, batch.obs, batch.actions,
                                gae.advantages, batch.log_probs, trpo_config);
    if (step.accepted) {
      ++curve.accepted_trpo_steps;
      last_kl = step.kl;
      curve.max_measured_kl = std::max(curve.max_measured_kl, step.kl);
    }
    value_update(value_net, value_optimizer, batch.obs, gae.value_targets,
                 config.value_iters);
    ++curve.total_gen_cycles;

    if ((cycle + 1) % config.gen_updates_per_cycle == 0) {
      for (int d = 0; d < config.disc_updates_per_cycle; ++d) {
        Eigen::MatrixXd expert_batch =
            sample_rows(expert_inputs, config.batch_size, expert_sampler);
        last_disc_loss = disc.update(agent_inputs, expert_batch);
        ++curve.total_disc_updates;
      }
      if (config.spectral_norm) {
        for (double sigma : disc.sigma_estimates()) {
          curve.max_disc_sigma = std::max(curve.max_disc_sigma, sigma);
        }
      }
    }

    if (cycle % config.eval_every_cycles == 0 || cycle == n_cycles - 1) {
      EvalStats stats =
          evaluate_policy(eval_env, policy,
                          config.input_norm ? &normalizer : nullptr,
                          config.eval_episodes, eval_rng);
      CurvePoint point;
      point.env_steps = (cycle + 1) * config.batch_size;
      point.eval_return_mean = stats.mean_return;
      point.eval_return_std = stats.std_return;
      point.disc_loss = last_disc_loss;
      point.policy_kl = last_kl;
      curve.points.push_back(point);
      curve.final_eval_mean = stats.mean_return;
      curve.final_eval_std = stats.std_return;
    }
  }
  return curve;
}

}  // namespace lfoeq
