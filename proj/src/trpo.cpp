#include "lfoeq/trpo.hpp"

#include <cmath>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {

double surrogate(const GaussianPolicy& policy, const Eigen::MatrixXd& obs,
                 const Eigen::MatrixXd& actions, const Eigen::VectorXd& advantages,
                 const Eigen::VectorXd& old_log_probs, double entropy_coef) {
  Eigen::VectorXd log_probs = policy.log_prob(obs, actions);
  Eigen::ArrayXd ratio = (log_probs - old_log_probs).array().exp();
  return (ratio * advantages.array()).mean() + entropy_coef * policy.entropy();
}

}  // namespace

TrpoResult trpo_step(GaussianPolicy& policy, const Eigen::MatrixXd& obs,
                     const Eigen::MatrixXd& actions,
                     const Eigen::VectorXd& advantages,
                     const Eigen::VectorXd& old_log_probs,
                     const TrpoConfig& config) {
  const Eigen::Index n = obs.rows();
  if (actions.rows() != n || advantages.size() != n || old_log_probs.size() != n) {
    throw ShapeMismatch("trpo_step: batch fields inconsistent");
  }
  TrpoResult result;

  // surrogate gradient at the current parameters; ratio == 1 there, so this
  // is the advantage-weighted score plus the entropy term
  Eigen::VectorXd log_probs = policy.log_prob(obs, actions);
  Eigen::VectorXd weights =
      (log_probs - old_log_probs).array().exp() * advantages.array() /
      static_cast<double>(n);
  Eigen::VectorXd grad = policy.weighted_logprob_grad(obs, actions, weights);
  if (config.entropy_coef != 0.0) {
    // entropy depends on log_std only: d entropy / d log_std_i = 1
    grad.tail(policy.action_dim()).array() += config.entropy_coef;
  }
  if (grad.norm() < 1e-12) return result;

  GaussianPolicy::FisherContext ctx = policy.fisher_context(obs);
  auto fvp = [&](const Eigen::VectorXd& v) {
    return policy.fisher_vector_product(ctx, v, config.cg_damping);
  };

  // conjugate gradient for F x = g
  Eigen::VectorXd x = Eigen::VectorXd::Zero(grad.size());
  Eigen::VectorXd r = grad;
  Eigen::VectorXd p = grad;
  double r_dot = r.squaredNorm();
  for (int i = 0; i < config.cg_iters && r_dot > 1e-14; ++i) {
    Eigen::VectorXd fp = fvp(p);
    double alpha = r_dot / p.dot(fp);
    x += alpha * p;
    r -= alpha * fp;
    double r_dot_new = r.squaredNorm();
    p = r + (r_dot_new / r_dot) * p;
    r_dot = r_dot_new;
  }

  double quad = x.dot(fvp(x));
  if (quad <= 0.0 || !std::isfinite(quad)) return result;
  Eigen::VectorXd full_step = std::sqrt(2.0 * config.max_kl / quad) * x;

  const Eigen::VectorXd old_params = policy.params_flat();
  const Eigen::MatrixXd old_mean = policy.mean(obs);
  const Eigen::VectorXd old_log_std = policy.log_std();
  const double old_surrogate = surrogate(policy, obs, actions, advantages,
                                         old_log_probs, config.entropy_coef);

  double step_frac = 1.0;
  for (int i = 0; i < config.backtrack_iters; ++i) {
    policy.set_params_flat(old_params + step_frac * full_step);
    double new_surrogate = surrogate(policy, obs, actions, advantages,
                                     old_log_probs, config.entropy_coef);
    double kl = policy.mean_kl(old_mean, old_log_std, obs);
    if (std::isfinite(new_surrogate) && new_surrogate > old_surrogate &&
        kl <= config.max_kl) {
      result.accepted = true;
      result.kl = kl;
      result.surrogate_improvement = new_surrogate - old_surrogate;
      return result;
    }
    step_frac *= config.backtrack_coef;
  }
  policy.set_params_flat(old_params);
  return result;
}

double value_update(Mlp& value_net, Adam& optimizer, const Eigen::MatrixXd& obs,
                    const Eigen::VectorXd& targets, int value_iters) {
  if (targets.size() != obs.rows()) {
    throw ShapeMismatch("value_update: target size mismatch");
  }
  const double n = static_cast<double>(obs.rows());
  double first_loss = 0.0;
  for (int i = 0; i < value_iters; ++i) {
    Mlp::Workspace ws = value_net.forward(obs);
    Eigen::VectorXd err = ws.output().col(0) - targets;
    if (i == 0) first_loss = err.squaredNorm() / n;
    Mlp::Gradients grads;
    value_net.backward(ws, (2.0 / n) * err, &grads);
    Eigen::VectorXd params = value_net.params_flat();
    Eigen::VectorXd grad = value_net.flatten(grads);
    optimizer.step(params, grad);
    value_net.set_params_flat(params);
  }
  return first_loss;
}

}  // namespace lfoeq
