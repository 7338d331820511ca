#include "lfoeq/discriminator.hpp"

#include <cmath>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {

constexpr double kProbClamp = 1e-8;

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

Discriminator::Discriminator(Eigen::Index input_dim,
                             const std::vector<Eigen::Index>& hidden,
                             Activation act, Rng& rng, bool use_spectral_norm,
                             double lr, double entropy_coef)
    : optimizer_(0, lr),
      use_spectral_norm_(use_spectral_norm),
      entropy_coef_(entropy_coef) {
  std::vector<Eigen::Index> sizes;
  sizes.push_back(input_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  net_ = Mlp(sizes, act, rng);
  optimizer_ = Adam(net_.num_params(), lr);
  if (use_spectral_norm_) {
    for (const auto& w : net_.weights()) {
      spectral_.push_back(make_spectral_state(w, rng));
    }
  }
}

Eigen::VectorXd Discriminator::logits(const Eigen::MatrixXd& inputs) const {
  return net_.forward(inputs).output().col(0);
}

Eigen::VectorXd Discriminator::prob(const Eigen::MatrixXd& inputs) const {
  Eigen::VectorXd z = logits(inputs);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
  return z;
}

Eigen::VectorXd Discriminator::rewards(const Eigen::MatrixXd& inputs) const {
  Eigen::VectorXd p = prob(inputs);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double clamped = std::min(std::max(p[i], kProbClamp), 1.0 - kProbClamp);
    p[i] = -std::log(clamped);
  }
  return p;
}

double Discriminator::reward(const Eigen::VectorXd& input) const {
  return rewards(input.transpose())[0];
}

double Discriminator::loss_and_grad(const Eigen::MatrixXd& agent_inputs,
                                    const Eigen::MatrixXd& expert_inputs,
                                    Eigen::VectorXd* grad) const {
  const Eigen::Index n_agent = agent_inputs.rows();
  const Eigen::Index n_expert = expert_inputs.rows();
  if (n_agent == 0 || n_expert == 0) {
    throw ShapeMismatch("discriminator update needs nonempty batches");
  }
  if (agent_inputs.cols() != input_dim() || expert_inputs.cols() != input_dim()) {
    throw ShapeMismatch("discriminator input width mismatch");
  }
  Eigen::MatrixXd stacked(n_agent + n_expert, input_dim());
  stacked.topRows(n_agent) = agent_inputs;
  stacked.bottomRows(n_expert) = expert_inputs;

  Mlp::Workspace ws = net_.forward(stacked);
  Eigen::VectorXd z = ws.output().col(0);

  double logistic = 0.0;
  Eigen::VectorXd dz(z.size());
  const double total = static_cast<double>(n_agent + n_expert);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double p = sigmoid(z[i]);
    bool agent = i < n_agent;
    if (agent) {
      logistic += softplus(-z[i]) / static_cast<double>(n_agent);
      dz[i] = (p - 1.0) / static_cast<double>(n_agent);
    } else {
      logistic += softplus(z[i]) / static_cast<double>(n_expert);
      dz[i] = p / static_cast<double>(n_expert);
    }
    // entropy bonus: d(-c*H)/dz = c * z * p * (1-p)
    dz[i] += entropy_coef_ * z[i] * p * (1.0 - p) / total;
  }

  if (grad != nullptr) {
    Mlp::Gradients grads;
    net_.backward(ws, dz, &grads);
    *grad = net_.flatten(grads);
  }
  return logistic;
}

double Discriminator::update(const Eigen::MatrixXd& agent_inputs,
                             const Eigen::MatrixXd& expert_inputs) {
  if (use_spectral_norm_) {
    auto& weights = net_.mutable_weights();
    for (std::size_t l = 0; l < weights.size(); ++l) {
      spectral_step(weights[l], spectral_[l]);
    }
  }
  Eigen::VectorXd grad;
  double loss = loss_and_grad(agent_inputs, expert_inputs, &grad);
  Eigen::VectorXd params = net_.params_flat();
  optimizer_.step(params, grad);
  net_.set_params_flat(params);
  return loss;
}

std::vector<double> Discriminator::sigma_estimates() const {
  std::vector<double> sigmas;
  Rng rng(12345);
  for (const auto& w : net_.weights()) {
    SpectralState state = make_spectral_state(w, rng, 100);
    sigmas.push_back(power_iteration_step(w, state));
  }
  return sigmas;
}

}  // namespace lfoeq
