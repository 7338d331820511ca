#ifndef LFOEQ_MLP_HPP_
#define LFOEQ_MLP_HPP_

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "lfoeq/rng.hpp"

namespace lfoeq {

enum class Activation { kTanh, kRelu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation act);

// random orthogonal matrix scaled by gain (QR of a Gaussian draw)
Eigen::MatrixXd orthogonal_matrix(Eigen::Index rows, Eigen::Index cols,
                                  double gain, Rng& rng);

// Dense multilayer perceptron with hidden-layer activations and a linear
// output layer. Batches are row-major: one sample per row. Parameters are
// exposed both structured and as a single flat vector (weights row-major,
// then bias, layer by layer) for the optimizers.
class Mlp {
 public:
  Mlp() = default;
  // layer_sizes = {input, hidden..., output}; output_gain scales the
  // orthogonal init of the last layer
  Mlp(std::vector<Eigen::Index> layer_sizes, Activation act, Rng& rng,
      double output_gain = 1.0);

  Eigen::Index input_dim() const { return layer_sizes_.front(); }
  Eigen::Index output_dim() const { return layer_sizes_.back(); }
  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(weights_.size()); }
  Eigen::Index num_params() const;
  const std::vector<Eigen::Index>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return act_; }

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  std::vector<Eigen::MatrixXd>& mutable_weights() { return weights_; }

  struct Workspace {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // activation output per layer
    const Eigen::MatrixXd& output() const { return post.back(); }
  };

  Workspace forward(const Eigen::MatrixXd& inputs) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  // reverse accumulation; returns gradients w.r.t. the inputs
  Eigen::MatrixXd backward(const Workspace& ws, const Eigen::MatrixXd& output_grad,
                           Gradients* grads) const;

  // forward-mode directional derivative of the outputs along a parameter
  // tangent (flat layout), reusing a cached forward pass
  Eigen::MatrixXd jvp(const Workspace& ws, const Eigen::VectorXd& tangent) const;

  Eigen::VectorXd params_flat() const;
  void set_params_flat(const Eigen::VectorXd& flat);
  Eigen::VectorXd flatten(const Gradients& grads) const;

  // flat binary record: magic, layer count, sizes, activation, parameters
  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

 private:
  std::vector<Eigen::Index> layer_sizes_;
  Activation act_ = Activation::kTanh;
  std::vector<Eigen::MatrixXd> weights_;  // out x in per layer
  std::vector<Eigen::VectorXd> biases_;
};

// Adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace lfoeq

#endif  // LFOEQ_MLP_HPP_
