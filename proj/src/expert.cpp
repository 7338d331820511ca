#include "lfoeq/expert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lfoeq/environment.hpp"
#include "lfoeq/errors.hpp"
#include "lfoeq/rollout.hpp"
#include "lfoeq/trpo.hpp"

namespace lfoeq {

ExpertResult train_expert(const std::string& env_id, const ExpertConfig& config) {
  Rng master(config.seed);
  const std::uint64_t env_seed = master.fork();
  const std::uint64_t eval_env_seed = master.fork();
  Rng init_rng(master.fork());
  const std::uint64_t collector_seed = master.fork();
  Rng eval_rng(master.fork());

  EnvConfig env_config;
  env_config.horizon = config.horizon;
  Env env(env_id, env_config, env_seed);
  Env eval_env(env_id, env_config, eval_env_seed);

  GaussianPolicy policy(env.state_dim(), config.hidden, env.action_dim(),
                        config.activation, init_rng);
  std::vector<Eigen::Index> value_sizes;
  value_sizes.push_back(env.state_dim());
  value_sizes.insert(value_sizes.end(), config.hidden.begin(), config.hidden.end());
  value_sizes.push_back(1);
  Mlp value_net(value_sizes, config.activation, init_rng);
  Adam value_optimizer(value_net.num_params(), config.value_lr);
  RunningNormalizer normalizer(env.state_dim());
  RolloutCollector collector(env, collector_seed);

  TrpoConfig trpo_config;
  trpo_config.max_kl = config.max_kl;
  trpo_config.entropy_coef = config.policy_entropy_coef;

  ExpertResult result;
  result.input_norm = config.input_norm;
  const long n_cycles =
      (config.budget_steps + config.batch_size - 1) / config.batch_size;

  double best_return = -std::numeric_limits<double>::infinity();
  long best_improve_cycle = 0;
  Eigen::VectorXd best_params;
  RunningNormalizer best_normalizer = normalizer;
  double best_std = 0.0;

  for (long cycle = 0; cycle < n_cycles; ++cycle) {
    RolloutBatch batch = collector.collect(
        policy, value_net, config.input_norm ? &normalizer : nullptr,
        config.batch_size, /*record_env_reward=*/true);
    GaeResult gae = gae_advantages(batch, config.gamma, config.lambda);
    TrpoResult step = trpo_step(policy, batch.obs, batch.actions,
                                gae.advantages, batch.log_probs, trpo_config);
    if (step.accepted) {
      ++result.curve.accepted_trpo_steps;
      result.curve.max_measured_kl =
          std::max(result.curve.max_measured_kl, step.kl);
    }
    value_update(value_net, value_optimizer, batch.obs, gae.value_targets,
                 config.value_iters);
    ++result.curve.total_gen_cycles;
    result.env_steps_used = (cycle + 1) * config.batch_size;

    bool last_cycle = cycle == n_cycles - 1;
    if (cycle % config.eval_every_cycles == 0 || last_cycle) {
      EvalStats stats =
          evaluate_policy(eval_env, policy,
                          config.input_norm ? &normalizer : nullptr,
                          config.eval_episodes, eval_rng);
      CurvePoint point;
      point.env_steps = result.env_steps_used;
      point.eval_return_mean = stats.mean_return;
      point.eval_return_std = stats.std_return;
      point.policy_kl = step.accepted ? step.kl : 0.0;
      result.curve.points.push_back(point);

      double improve_floor =
          config.plateau_rel_improve * std::max(std::abs(best_return), 1e-8);
      if (stats.mean_return > best_return + improve_floor ||
          !std::isfinite(best_return)) {
        best_improve_cycle = cycle;
      }
      if (stats.mean_return > best_return) {
        best_return = stats.mean_return;
        best_std = stats.std_return;
        best_params = policy.params_flat();
        best_normalizer = normalizer;
      }
      if (cycle >= config.min_cycles &&
          cycle - best_improve_cycle >= config.plateau_window) {
        result.plateaued = true;
        break;
      }
    }
  }

  if (best_params.size() > 0) {
    policy.set_params_flat(best_params);
  }
  result.policy = policy;
  result.normalizer = best_normalizer;
  result.eval_return = best_return;
  result.eval_return_std = best_std;
  result.curve.final_eval_mean = best_return;
  result.curve.final_eval_std = best_std;
  return result;
}

TrajectoryDataset export_dataset(const std::string& env_id,
                                 const ExpertResult& expert, int n_trajectories,
                                 std::uint64_t seed, const std::string& path) {
  EnvConfig env_config;
  env_config.noise_bound = 0.0;
  Env env(env_id, env_config, seed);

  TrajectoryDataset dataset;
  dataset.env_id = env_id;
  dataset.dt = env.model().dt();
  dataset.state_dim = env.state_dim();
  dataset.action_dim = env.action_dim();
  dataset.horizon = env.horizon();
  dataset.trajectories.resize(static_cast<std::size_t>(n_trajectories));

  Rng unused(seed);
  for (auto& traj : dataset.trajectories) {
    traj.states.resize(dataset.horizon + 1, dataset.state_dim);
    traj.actions.resize(dataset.horizon, dataset.action_dim);
    Eigen::VectorXd state = env.reset();
    traj.states.row(0) = state;
    double ep_return = 0.0;
    bool alive = true;
    for (int t = 0; t < dataset.horizon; ++t) {
      Eigen::VectorXd obs =
          expert.input_norm ? expert.normalizer.apply(state) : state;
      Eigen::VectorXd action = expert.policy.sample(obs, unused, true);
      Env::StepResult step = env.step(action);
      traj.actions.row(t) = action;
      traj.states.row(t + 1) = step.next_state;
      // return metadata stops at task termination; the recorded motion
      // continues to the fixed horizon
      if (alive) ep_return += step.reward;
      if (step.terminated) alive = false;
      state = step.next_state;
    }
    traj.episode_return = ep_return;
  }
  save_dataset(dataset, path);
  return dataset;
}

namespace {
constexpr char kExpertMagic[8] = {'L', 'F', 'O', 'E', 'Q', 'E', 'X', 'P'};
}

void save_expert(const ExpertResult& expert, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out.write(kExpertMagic, sizeof(kExpertMagic));
  expert.policy.save(out);
  expert.normalizer.save(out);
  std::uint8_t flags = expert.input_norm ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&flags), sizeof(flags));
  out.write(reinterpret_cast<const char*>(&expert.eval_return),
            sizeof(expert.eval_return));
  out.write(reinterpret_cast<const char*>(&expert.eval_return_std),
            sizeof(expert.eval_return_std));
  if (!out) throw IoFailure("write to " + path + " failed");
}

ExpertResult load_expert(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kExpertMagic, sizeof(magic)) != 0) {
    throw CorruptFile(path + ": bad expert magic");
  }
  ExpertResult expert;
  expert.policy = GaussianPolicy::load(in);
  expert.normalizer = RunningNormalizer::load(in);
  std::uint8_t flags = 0;
  in.read(reinterpret_cast<char*>(&flags), sizeof(flags));
  expert.input_norm = flags != 0;
  in.read(reinterpret_cast<char*>(&expert.eval_return),
          sizeof(expert.eval_return));
  in.read(reinterpret_cast<char*>(&expert.eval_return_std),
          sizeof(expert.eval_return_std));
  if (!in) throw CorruptFile(path + ": truncated expert checkpoint");
  return expert;
}

}  // namespace lfoeq
