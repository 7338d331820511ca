#ifndef LFOEQ_TRPO_HPP_
#define LFOEQ_TRPO_HPP_

#include <Eigen/Core>

#include "lfoeq/mlp.hpp"
#include "lfoeq/policy.hpp"

namespace lfoeq {

struct TrpoConfig {
  double max_kl = 0.01;
  int cg_iters = 10;
  double cg_damping = 0.1;
  double backtrack_coef = 0.5;
  int backtrack_iters = 10;
  double entropy_coef = 0.0;
};

struct TrpoResult {
  bool accepted = false;  // failed line search leaves the policy unchanged
  double kl = 0.0;        // mean KL(old || new) of the accepted step
  double surrogate_improvement = 0.0;
};

// Maximizes the importance-weighted surrogate E[ratio * advantage] subject to
// mean KL(old || new) <= max_kl: conjugate-gradient natural direction on
// Fisher-vector products, step length from the KL quadratic model, then a
// backtracking line search that requires surrogate improvement and the KL
// constraint.
TrpoResult trpo_step(GaussianPolicy& policy, const Eigen::MatrixXd& obs,
                     const Eigen::MatrixXd& actions,
                     const Eigen::VectorXd& advantages,
                     const Eigen::VectorXd& old_log_probs,
                     const TrpoConfig& config);

// value_iters optimizer steps on the mean squared error against the targets;
// returns the loss before the first step.
double value_update(Mlp& value_net, Adam& optimizer, const Eigen::MatrixXd& obs,
                    const Eigen::VectorXd& targets, int value_iters);

}  // namespace lfoeq

#endif  // LFOEQ_TRPO_HPP_
