#ifndef LFOEQ_EXPERT_HPP_
#define LFOEQ_EXPERT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lfoeq/dataset.hpp"
#include "lfoeq/imitation.hpp"
#include "lfoeq/normalizer.hpp"
#include "lfoeq/policy.hpp"

namespace lfoeq {

struct ExpertConfig {
  long budget_steps = 400000;
  int batch_size = 1024;
  double gamma = 0.995;
  double lambda = 0.97;
  double max_kl = 0.01;
  double value_lr = 1e-3;
  int value_iters = 5;
  double policy_entropy_coef = 0.0;
  bool input_norm = true;
  int horizon = 200;
  std::vector<Eigen::Index> hidden = {100, 100};
  Activation activation = Activation::kTanh;
  int eval_every_cycles = 10;
  int eval_episodes = 10;
  // stop when the best evaluation return has not improved by
  // plateau_rel_improve relative over plateau_window cycles
  double plateau_rel_improve = 0.01;
  int plateau_window = 20;
  int min_cycles = 40;
  std::uint64_t seed = 0;
};

struct ExpertResult {
  GaussianPolicy policy;
  RunningNormalizer normalizer{1};  // frozen input statistics
  bool input_norm = false;
  double eval_return = 0.0;
  double eval_return_std = 0.0;
  bool plateaued = false;  // false means the step budget ran out first
  long env_steps_used = 0;
  LearningCurve curve;
};

// Trust-region training on the environment's true reward until the
// evaluation return plateaus or the step budget is exhausted; the best
// policy seen is returned either way.
ExpertResult train_expert(const std::string& env_id, const ExpertConfig& config);

// n_trajectories fixed-horizon episodes of the deterministic expert under
// noise-free dynamics, written to path in the dataset binary format.
TrajectoryDataset export_dataset(const std::string& env_id,
                                 const ExpertResult& expert, int n_trajectories,
                                 std::uint64_t seed, const std::string& path);

// expert checkpoint: policy, normalizer, scalar metadata
void save_expert(const ExpertResult& expert, const std::string& path);
ExpertResult load_expert(const std::string& path);

}  // namespace lfoeq

#endif  // LFOEQ_EXPERT_HPP_
