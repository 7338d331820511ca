#ifndef LFOEQ_DISCRIMINATOR_HPP_
#define LFOEQ_DISCRIMINATOR_HPP_

#include <Eigen/Core>
#include <vector>

#include "lfoeq/mlp.hpp"
#include "lfoeq/rng.hpp"
#include "lfoeq/spectral.hpp"

namespace lfoeq {

// Binary classifier over discriminator inputs ((s,a) for GAIL, (s,s') for
// GAIfO). Trained so that D(x) is high on agent data and low on expert data;
// the imitation reward -log D(x) is therefore large on expert-like inputs.
class Discriminator {
 public:
  Discriminator(Eigen::Index input_dim, const std::vector<Eigen::Index>& hidden,
                Activation act, Rng& rng, bool use_spectral_norm, double lr,
                double entropy_coef);

  Eigen::Index input_dim() const { return net_.input_dim(); }
  bool spectral_norm_enabled() const { return use_spectral_norm_; }

  Eigen::VectorXd logits(const Eigen::MatrixXd& inputs) const;
  Eigen::VectorXd prob(const Eigen::MatrixXd& inputs) const;

  // r = -log(clamp(D(x), 1e-8, 1 - 1e-8))
  Eigen::VectorXd rewards(const Eigen::MatrixXd& inputs) const;
  double reward(const Eigen::VectorXd& input) const;

  // One optimizer step on the logistic loss
  //   -E_agent[log D] - E_expert[log(1 - D)] - entropy_coef * H(D),
  // with spectral normalization of every layer first when enabled.
  // Returns the logistic part of the loss (entropy term excluded).
  double update(const Eigen::MatrixXd& agent_inputs,
                const Eigen::MatrixXd& expert_inputs);

  // loss and flat parameter gradient without stepping (test hook)
  double loss_and_grad(const Eigen::MatrixXd& agent_inputs,
                       const Eigen::MatrixXd& expert_inputs,
                       Eigen::VectorXd* grad) const;

  // fresh power-iteration estimates of each layer's top singular value
  std::vector<double> sigma_estimates() const;

  const Mlp& net() const { return net_; }
  Mlp& mutable_net() { return net_; }

 private:
  Mlp net_;
  Adam optimizer_;
  bool use_spectral_norm_;
  double entropy_coef_;
  std::vector<SpectralState> spectral_;
};

}  // namespace lfoeq

#endif  // LFOEQ_DISCRIMINATOR_HPP_
