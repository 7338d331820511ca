#ifndef LFOEQ_POLICY_HPP_
#define LFOEQ_POLICY_HPP_

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "lfoeq/mlp.hpp"
#include "lfoeq/rng.hpp"

namespace lfoeq {

// Diagonal-Gaussian policy: an MLP maps state to the action mean, and a
// state-independent log_std vector holds the exploration scale. The flat
// parameter vector is the mean-net parameters followed by log_std.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(Eigen::Index state_dim, const std::vector<Eigen::Index>& hidden,
                 Eigen::Index action_dim, Activation act, Rng& rng,
                 double init_log_std = 0.0);

  Eigen::Index state_dim() const { return mean_net_.input_dim(); }
  Eigen::Index action_dim() const { return log_std_.size(); }
  Eigen::Index num_params() const { return mean_net_.num_params() + log_std_.size(); }

  Eigen::VectorXd params_flat() const;
  void set_params_flat(const Eigen::VectorXd& flat);

  Eigen::MatrixXd mean(const Eigen::MatrixXd& states) const;
  Eigen::VectorXd std_dev() const { return log_std_.array().exp(); }

  Eigen::VectorXd log_prob(const Eigen::MatrixXd& states,
                           const Eigen::MatrixXd& actions) const;
  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const;

  // gradient of sum_n weights[n] * log pi(a_n | s_n) w.r.t. the flat params
  Eigen::VectorXd weighted_logprob_grad(const Eigen::MatrixXd& states,
                                        const Eigen::MatrixXd& actions,
                                        const Eigen::VectorXd& weights) const;

  // Fisher-vector products for the mean-KL metric. The Fisher of a diagonal
  // Gaussian splits into J^T diag(1/sigma^2) J on the mean-net parameters
  // (computed exactly as a jvp followed by a vjp) and a constant 2 per
  // log_std coordinate.
  struct FisherContext {
    Mlp::Workspace ws;
    Eigen::Index n_samples = 0;
  };
  FisherContext fisher_context(const Eigen::MatrixXd& states) const;
  Eigen::VectorXd fisher_vector_product(const FisherContext& ctx,
                                        const Eigen::VectorXd& v,
                                        double damping) const;

  // mean over states of KL(old || this), old described by its mean matrix
  // and log_std
  double mean_kl(const Eigen::MatrixXd& old_mean,
                 const Eigen::VectorXd& old_log_std,
                 const Eigen::MatrixXd& states) const;

  double entropy() const;  // state-independent given fixed log_std

  Eigen::VectorXd sample(const Eigen::VectorXd& state, Rng& rng,
                         bool deterministic) const;

  const Mlp& mean_net() const { return mean_net_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  Eigen::VectorXd& mutable_log_std() { return log_std_; }

  void save(std::ostream& out) const;
  static GaussianPolicy load(std::istream& in);

 private:
  Mlp mean_net_;
  Eigen::VectorXd log_std_;
};

}  // namespace lfoeq

#endif  // LFOEQ_POLICY_HPP_
