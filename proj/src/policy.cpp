#include "lfoeq/policy.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {
constexpr char kPolicyMagic[8] = {'L', 'F', 'O', 'E', 'Q', 'P', 'O', 'L'};
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

GaussianPolicy::GaussianPolicy(Eigen::Index state_dim,
                               const std::vector<Eigen::Index>& hidden,
                               Eigen::Index action_dim, Activation act, Rng& rng,
                               double init_log_std) {
  std::vector<Eigen::Index> sizes;
  sizes.push_back(state_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(action_dim);
  // small initial actions stabilize early updates
  mean_net_ = Mlp(sizes, act, rng, 0.01);
  log_std_ = Eigen::VectorXd::Constant(action_dim, init_log_std);
}

Eigen::VectorXd GaussianPolicy::params_flat() const {
  Eigen::VectorXd flat(num_params());
  flat.head(mean_net_.num_params()) = mean_net_.params_flat();
  flat.tail(log_std_.size()) = log_std_;
  return flat;
}

void GaussianPolicy::set_params_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != num_params()) {
    throw ShapeMismatch("GaussianPolicy::set_params_flat: size mismatch");
  }
  mean_net_.set_params_flat(flat.head(mean_net_.num_params()));
  log_std_ = flat.tail(log_std_.size());
}

Eigen::MatrixXd GaussianPolicy::mean(const Eigen::MatrixXd& states) const {
  return mean_net_.forward(states).output();
}

Eigen::VectorXd GaussianPolicy::log_prob(const Eigen::MatrixXd& states,
                                         const Eigen::MatrixXd& actions) const {
  if (states.rows() != actions.rows() || actions.cols() != action_dim()) {
    throw ShapeMismatch("GaussianPolicy::log_prob: shape mismatch");
  }
  Eigen::MatrixXd mu = mean(states);
  Eigen::ArrayXd inv_var = (-2.0 * log_std_.array()).exp();
  Eigen::MatrixXd diff = actions - mu;
  Eigen::VectorXd quad =
      (diff.array().square().rowwise() * inv_var.transpose()).rowwise().sum();
  double log_norm = log_std_.sum() +
                    0.5 * kLog2Pi * static_cast<double>(action_dim());
  return (-0.5 * quad.array() - log_norm).matrix();
}

double GaussianPolicy::log_prob(const Eigen::VectorXd& state,
                                const Eigen::VectorXd& action) const {
  return log_prob(state.transpose(), action.transpose())[0];
}

Eigen::VectorXd GaussianPolicy::weighted_logprob_grad(
    const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
    const Eigen::VectorXd& weights) const {
  if (states.rows() != actions.rows() || states.rows() != weights.size()) {
    throw ShapeMismatch("weighted_logprob_grad: shape mismatch");
  }
  Mlp::Workspace ws = mean_net_.forward(states);
  Eigen::ArrayXd inv_var = (-2.0 * log_std_.array()).exp();
  Eigen::MatrixXd diff = actions - ws.output();

  // d logp / d mu = (a - mu) / sigma^2, scaled per row by its weight
  Eigen::MatrixXd out_grad =
      (diff.array().rowwise() * inv_var.transpose()).colwise() *
      weights.array();
  Mlp::Gradients grads;
  mean_net_.backward(ws, out_grad, &grads);

  // d logp / d log_std = (a - mu)^2 / sigma^2 - 1
  Eigen::MatrixXd z2 = diff.array().square().rowwise() * inv_var.transpose();
  Eigen::VectorXd grad_log_std =
      (z2.array().colwise() * weights.array()).colwise().sum().transpose() -
      weights.sum() * Eigen::VectorXd::Ones(action_dim());

  Eigen::VectorXd flat(num_params());
  flat.head(mean_net_.num_params()) = mean_net_.flatten(grads);
  flat.tail(log_std_.size()) = grad_log_std;
  return flat;
}

GaussianPolicy::FisherContext GaussianPolicy::fisher_context(
    const Eigen::MatrixXd& states) const {
  return {mean_net_.forward(states), states.rows()};
}

Eigen::VectorXd GaussianPolicy::fisher_vector_product(const FisherContext& ctx,
                                                      const Eigen::VectorXd& v,
                                                      double damping) const {
  if (v.size() != num_params()) {
    throw ShapeMismatch("fisher_vector_product: size mismatch");
  }
  const Eigen::Index n_net = mean_net_.num_params();
  Eigen::ArrayXd inv_var = (-2.0 * log_std_.array()).exp();

  Eigen::MatrixXd dmu = mean_net_.jvp(ctx.ws, v.head(n_net));
  Eigen::MatrixXd weighted = (dmu.array().rowwise() * inv_var.transpose()) /
                             static_cast<double>(ctx.n_samples);
  Mlp::Gradients grads;
  mean_net_.backward(ctx.ws, weighted, &grads);

  Eigen::VectorXd out(num_params());
  out.head(n_net) = mean_net_.flatten(grads);
  out.tail(log_std_.size()) = 2.0 * v.tail(log_std_.size());
  out += damping * v;
  return out;
}

double GaussianPolicy::mean_kl(const Eigen::MatrixXd& old_mean,
                               const Eigen::VectorXd& old_log_std,
                               const Eigen::MatrixXd& states) const {
  Eigen::MatrixXd new_mean = mean(states);
  Eigen::ArrayXd new_inv_var = (-2.0 * log_std_.array()).exp();
  Eigen::ArrayXd old_var = (2.0 * old_log_std.array()).exp();

  Eigen::ArrayXd per_dim_const =
      log_std_.array() - old_log_std.array() + 0.5 * old_var * new_inv_var - 0.5;
  Eigen::MatrixXd diff = old_mean - new_mean;
  double quad = (diff.array().square().rowwise() * new_inv_var.transpose())
                    .sum() /
                static_cast<double>(states.rows());
  return per_dim_const.sum() + 0.5 * quad;
}

double GaussianPolicy::entropy() const {
  return log_std_.sum() +
         0.5 * static_cast<double>(action_dim()) * (1.0 + kLog2Pi);
}

Eigen::VectorXd GaussianPolicy::sample(const Eigen::VectorXd& state, Rng& rng,
                                       bool deterministic) const {
  Eigen::VectorXd mu = mean(state.transpose()).row(0);
  if (deterministic) return mu;
  return mu + std_dev().cwiseProduct(rng.normal_vector(action_dim()));
}

void GaussianPolicy::save(std::ostream& out) const {
  out.write(kPolicyMagic, sizeof(kPolicyMagic));
  mean_net_.save(out);
  std::uint64_t n = static_cast<std::uint64_t>(log_std_.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(log_std_.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
  if (!out) throw IoFailure("GaussianPolicy::save failed");
}

GaussianPolicy GaussianPolicy::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPolicyMagic, sizeof(magic)) != 0) {
    throw CorruptFile("GaussianPolicy::load: bad magic");
  }
  GaussianPolicy policy;
  policy.mean_net_ = Mlp::load(in);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n == 0 || n != static_cast<std::uint64_t>(policy.mean_net_.output_dim())) {
    throw CorruptFile("GaussianPolicy::load: bad log_std size");
  }
  policy.log_std_.resize(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(policy.log_std_.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw CorruptFile("GaussianPolicy::load: truncated");
  return policy;
}

}  // namespace lfoeq
