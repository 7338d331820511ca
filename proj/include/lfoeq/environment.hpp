#ifndef LFOEQ_ENVIRONMENT_HPP_
#define LFOEQ_ENVIRONMENT_HPP_

#include <Eigen/Core>
#include <map>
#include <memory>
#include <string>

#include "lfoeq/dynamics.hpp"
#include "lfoeq/rng.hpp"

namespace lfoeq {

struct EnvConfig {
  double noise_bound = 0.0;  // per-dimension transition noise width
  int horizon = 200;
  std::map<std::string, double> param_overrides;
};

// Fixed-horizon control task over an ElModel: reset distribution, true
// reward, and termination predicate. The true reward is evaluation metadata
// for imitation runs and the training signal for expert runs only.
class Env {
 public:
  Env(const std::string& id, const EnvConfig& config, std::uint64_t seed);

  const std::string& id() const { return id_; }
  const ElModel& model() const { return *model_; }
  int state_dim() const { return static_cast<int>(2 * model_->dof()); }
  int action_dim() const { return static_cast<int>(model_->act_dim()); }
  int horizon() const { return config_.horizon; }
  double noise_bound() const { return config_.noise_bound; }

  Eigen::VectorXd reset();

  struct StepResult {
    Eigen::VectorXd next_state;
    double reward = 0.0;
    bool terminated = false;  // task-level termination, not the horizon
  };
  StepResult step(const Eigen::VectorXd& action);

  const Eigen::VectorXd& state() const { return state_; }

  double reward(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                const Eigen::VectorXd& next_state) const;
  bool terminal(const Eigen::VectorXd& state) const;

 private:
  enum class Task { kPendulum, kReacher2, kCartpole, kAcrobot };

  std::string id_;
  Task task_;
  EnvConfig config_;
  std::unique_ptr<ElModel> model_;
  Rng rng_;
  Eigen::VectorXd state_;
};

}  // namespace lfoeq

#endif  // LFOEQ_ENVIRONMENT_HPP_
