#include "lfoeq/environment.hpp"

#include <cmath>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

// fixed reacher goal, comfortably inside the arm's reach
constexpr double kGoalX = 0.5;
constexpr double kGoalY = 0.5;

}  // namespace

Env::Env(const std::string& id, const EnvConfig& config, std::uint64_t seed)
    : id_(id),
      config_(config),
      model_(make_model(id, config.param_overrides)),
      rng_(seed),
      state_(Eigen::VectorXd::Zero(2 * model_->dof())) {
  if (id == "pendulum") {
    task_ = Task::kPendulum;
  } else if (id == "reacher2") {
    task_ = Task::kReacher2;
  } else if (id == "cartpole") {
    task_ = Task::kCartpole;
  } else if (id == "acrobot") {
    task_ = Task::kAcrobot;
  } else {
    throw ConfigError("unknown environment id: " + id);
  }
}

Eigen::VectorXd Env::reset() {
  switch (task_) {
    case Task::kPendulum:
      // hold upright from a moderate perturbation
      state_.resize(2);
      state_[0] = M_PI + rng_.uniform(-0.8, 0.8);
      state_[1] = rng_.uniform(-1.0, 1.0);
      break;
    case Task::kReacher2:
      state_.resize(4);
      state_[0] = rng_.uniform(-M_PI, M_PI);
      state_[1] = rng_.uniform(-M_PI, M_PI);
      state_[2] = rng_.uniform(-0.5, 0.5);
      state_[3] = rng_.uniform(-0.5, 0.5);
      break;
    case Task::kCartpole:
      state_ = rng_.uniform_vector(4, -0.05, 0.05);
      break;
    case Task::kAcrobot:
      state_ = rng_.uniform_vector(4, -0.1, 0.1);
      break;
  }
  return state_;
}

Env::StepResult Env::step(const Eigen::VectorXd& action) {
  GeneralizedCoords s = GeneralizedCoords::from_state(state_);
  GeneralizedCoords next = forward_step(*model_, s, ControlInput(action),
                                        config_.noise_bound, &rng_);
  StepResult result;
  result.next_state = next.as_state();
  result.reward = reward(state_, action, result.next_state);
  result.terminated = terminal(result.next_state);
  state_ = result.next_state;
  return result;
}

double Env::reward(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                   const Eigen::VectorXd& next_state) const {
  switch (task_) {
    case Task::kPendulum: {
      double angle_err = wrap_angle(state[0] - M_PI);
      return -(angle_err * angle_err + 0.1 * state[1] * state[1] +
               0.001 * action[0] * action[0]);
    }
    case Task::kReacher2: {
      double l1 = model_->param("l1");
      double l2 = model_->param("l2");
      double tip_x = l1 * std::cos(state[0]) + l2 * std::cos(state[0] + state[1]);
      double tip_y = l1 * std::sin(state[0]) + l2 * std::sin(state[0] + state[1]);
      double dx = tip_x - kGoalX;
      double dy = tip_y - kGoalY;
      return -(dx * dx + dy * dy + 0.001 * action.squaredNorm());
    }
    case Task::kCartpole:
      return terminal(next_state) ? 0.0 : 1.0;
    case Task::kAcrobot:
      return -1.0;
  }
  return 0.0;
}

bool Env::terminal(const Eigen::VectorXd& state) const {
  switch (task_) {
    case Task::kPendulum:
    case Task::kReacher2:
      return false;
    case Task::kCartpole:
      return std::abs(state[0]) >= 2.4 || std::abs(state[1]) >= 0.4;
    case Task::kAcrobot: {
      double l1 = model_->param("l1");
      double l2 = model_->param("l2");
      double tip_height =
          -l1 * std::cos(state[0]) - l2 * std::cos(state[0] + state[1]);
      return tip_height > l1;
    }
  }
  return false;
}

}  // namespace lfoeq
