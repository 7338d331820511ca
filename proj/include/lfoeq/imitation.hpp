#ifndef LFOEQ_IMITATION_HPP_
#define LFOEQ_IMITATION_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lfoeq/dataset.hpp"
#include "lfoeq/mlp.hpp"

namespace lfoeq {

enum class ImitationMode { kGail, kGaifo };

ImitationMode mode_from_string(const std::string& name);
std::string to_string(ImitationMode mode);

struct ImitationConfig {
  ImitationMode mode = ImitationMode::kGail;
  int batch_size = 1024;
  int gen_updates_per_cycle = 3;   // generator cycles per discriminator update
  int disc_updates_per_cycle = 1;
  double gamma = 0.995;
  double lambda = 0.97;
  double max_kl = 0.01;
  double value_lr = 1e-3;
  int value_iters = 5;
  double disc_lr = 3e-4;
  double disc_entropy_coef = 1e-3;
  double policy_entropy_coef = 0.0;
  bool input_norm = true;
  bool spectral_norm = false;
  double noise_bound = 0.0;
  long total_env_steps = 150000;
  std::uint64_t seed = 0;

  // artifact knobs beyond the published table
  int horizon = 200;
  std::vector<Eigen::Index> hidden = {100, 100};
  Activation activation = Activation::kTanh;
  int eval_every_cycles = 10;
  int eval_episodes = 10;
};

struct CurvePoint {
  long env_steps = 0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  double disc_loss = 0.0;
  double policy_kl = 0.0;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  double final_eval_mean = 0.0;
  double final_eval_std = 0.0;
  long total_gen_cycles = 0;
  long total_disc_updates = 0;
  long accepted_trpo_steps = 0;
  double max_measured_kl = 0.0;       // over accepted steps
  double max_disc_sigma = 0.0;        // spectral-norm runs only
};

// Full adversarial imitation run: alternates rollout collection, imitation
// reward synthesis from the discriminator, GAE, trust-region policy updates
// and value fits, with one discriminator update every
// gen_updates_per_cycle generator cycles. GAIL and GAIfO share this loop and
// differ only in how discriminator inputs are built. The environment's true
// reward is consumed exclusively by the periodic deterministic evaluation.
LearningCurve train(const std::string& env_id, const TrajectoryDataset& expert,
                    const ImitationConfig& config);

}  // namespace lfoeq

#endif  // LFOEQ_IMITATION_HPP_
