#include "lfoeq/mlp.hpp"

#include <Eigen/QR>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {

constexpr char kMlpMagic[8] = {'L', 'F', 'O', 'E', 'Q', 'M', 'L', 'P'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_doubles(std::ostream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation: " + name);
}

std::string to_string(Activation act) {
  return act == Activation::kTanh ? "tanh" : "relu";
}

Eigen::MatrixXd orthogonal_matrix(Eigen::Index rows, Eigen::Index cols,
                                  double gain, Rng& rng) {
  const bool transpose = rows < cols;
  const Eigen::Index r = transpose ? cols : rows;
  const Eigen::Index c = transpose ? rows : cols;
  Eigen::MatrixXd gauss(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) gauss(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
  Eigen::MatrixXd rmat = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < c; ++j) {
    if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  q *= gain;
  return transpose ? q.transpose() : q;
}

Mlp::Mlp(std::vector<Eigen::Index> layer_sizes, Activation act, Rng& rng,
         double output_gain)
    : layer_sizes_(std::move(layer_sizes)), act_(act) {
  if (layer_sizes_.size() < 2) {
    throw ShapeMismatch("Mlp needs at least input and output sizes");
  }
  const Eigen::Index n_layers = static_cast<Eigen::Index>(layer_sizes_.size()) - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  for (Eigen::Index l = 0; l < n_layers; ++l) {
    double gain = (l == n_layers - 1) ? output_gain : 1.0;
    weights_.push_back(
        orthogonal_matrix(layer_sizes_[l + 1], layer_sizes_[l], gain, rng));
    biases_.push_back(Eigen::VectorXd::Zero(layer_sizes_[l + 1]));
  }
}

Eigen::Index Mlp::num_params() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += weights_[l].size() + biases_[l].size();
  }
  return n;
}

Mlp::Workspace Mlp::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != input_dim()) {
    throw ShapeMismatch("Mlp::forward: input width mismatch");
  }
  Workspace ws;
  ws.input = inputs;
  const std::size_t n_layers = weights_.size();
  ws.pre.resize(n_layers);
  ws.post.resize(n_layers);
  const Eigen::MatrixXd* h = &ws.input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    ws.pre[l] = (*h * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    if (l + 1 == n_layers) {
      ws.post[l] = ws.pre[l];  // linear output layer
    } else if (act_ == Activation::kTanh) {
      ws.post[l] = ws.pre[l].array().tanh();
    } else {
      ws.post[l] = ws.pre[l].cwiseMax(0.0);
    }
    h = &ws.post[l];
  }
  return ws;
}

Eigen::MatrixXd Mlp::backward(const Workspace& ws,
                              const Eigen::MatrixXd& output_grad,
                              Gradients* grads) const {
  const std::size_t n_layers = weights_.size();
  if (output_grad.rows() != ws.input.rows() ||
      output_grad.cols() != output_dim()) {
    throw ShapeMismatch("Mlp::backward: output_grad shape mismatch");
  }
  if (grads != nullptr) {
    grads->weights.resize(n_layers);
    grads->biases.resize(n_layers);
  }
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Eigen::MatrixXd& below = (l == 0) ? ws.input : ws.post[l - 1];
    if (grads != nullptr) {
      grads->weights[l] = delta.transpose() * below;
      grads->biases[l] = delta.colwise().sum();
    }
    delta = delta * weights_[l];
    if (l > 0) {
      if (act_ == Activation::kTanh) {
        delta.array() *= 1.0 - ws.post[l - 1].array().square();
      } else {
        delta.array() *= (ws.pre[l - 1].array() > 0.0).cast<double>();
      }
    }
  }
  return delta;
}

Eigen::MatrixXd Mlp::jvp(const Workspace& ws, const Eigen::VectorXd& tangent) const {
  if (tangent.size() != num_params()) {
    throw ShapeMismatch("Mlp::jvp: tangent size mismatch");
  }
  const std::size_t n_layers = weights_.size();
  const Eigen::Index n_rows = ws.input.rows();
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(n_rows, input_dim());
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Eigen::Index out = weights_[l].rows();
    const Eigen::Index in = weights_[l].cols();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        dw(tangent.data() + offset, out, in);
    offset += out * in;
    Eigen::Map<const Eigen::VectorXd> db(tangent.data() + offset, out);
    offset += out;

    const Eigen::MatrixXd& below = (l == 0) ? ws.input : ws.post[l - 1];
    Eigen::MatrixXd dz =
        (dh * weights_[l].transpose() + below * dw.transpose()).rowwise() +
        db.transpose();
    if (l + 1 == n_layers) {
      dh = std::move(dz);
    } else if (act_ == Activation::kTanh) {
      dh = dz.array() * (1.0 - ws.post[l].array().square());
    } else {
      dh = dz.array() * (ws.pre[l].array() > 0.0).cast<double>();
    }
  }
  return dh;
}

Eigen::VectorXd Mlp::params_flat() const {
  Eigen::VectorXd flat(num_params());
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::Index out = weights_[l].rows();
    const Eigen::Index in = weights_[l].cols();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>(flat.data() + offset, out, in) =
        weights_[l];
    offset += out * in;
    flat.segment(offset, out) = biases_[l];
    offset += out;
  }
  return flat;
}

void Mlp::set_params_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != num_params()) {
    throw ShapeMismatch("Mlp::set_params_flat: size mismatch");
  }
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::Index out = weights_[l].rows();
    const Eigen::Index in = weights_[l].cols();
    weights_[l] = Eigen::Map<const Eigen::Matrix<
        double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data() + offset, out, in);
    offset += out * in;
    biases_[l] = flat.segment(offset, out);
    offset += out;
  }
}

Eigen::VectorXd Mlp::flatten(const Gradients& grads) const {
  Eigen::VectorXd flat(num_params());
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const Eigen::Index out = grads.weights[l].rows();
    const Eigen::Index in = grads.weights[l].cols();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>(flat.data() + offset, out, in) =
        grads.weights[l];
    offset += out * in;
    flat.segment(offset, out) = grads.biases[l];
    offset += out;
  }
  return flat;
}

void Mlp::save(std::ostream& out) const {
  out.write(kMlpMagic, sizeof(kMlpMagic));
  write_u64(out, layer_sizes_.size());
  for (Eigen::Index s : layer_sizes_) write_u64(out, static_cast<std::uint64_t>(s));
  write_u64(out, act_ == Activation::kTanh ? 0 : 1);
  Eigen::VectorXd flat = params_flat();
  write_doubles(out, flat.data(), static_cast<std::size_t>(flat.size()));
  if (!out) throw IoFailure("Mlp::save: stream write failed");
}

Mlp Mlp::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMlpMagic, sizeof(magic)) != 0) {
    throw CorruptFile("Mlp::load: bad magic");
  }
  std::uint64_t n_sizes = read_u64(in);
  if (!in || n_sizes < 2 || n_sizes > 64) {
    throw CorruptFile("Mlp::load: bad layer count");
  }
  Mlp net;
  net.layer_sizes_.resize(n_sizes);
  for (auto& s : net.layer_sizes_) {
    s = static_cast<Eigen::Index>(read_u64(in));
    if (s <= 0 || s > (1 << 20)) throw CorruptFile("Mlp::load: bad layer size");
  }
  net.act_ = read_u64(in) == 0 ? Activation::kTanh : Activation::kRelu;
  const std::size_t n_layers = n_sizes - 1;
  net.weights_.resize(n_layers);
  net.biases_.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    net.weights_[l].resize(net.layer_sizes_[l + 1], net.layer_sizes_[l]);
    net.biases_[l].resize(net.layer_sizes_[l + 1]);
  }
  Eigen::VectorXd flat(net.num_params());
  read_doubles(in, flat.data(), static_cast<std::size_t>(flat.size()));
  if (!in) throw CorruptFile("Mlp::load: truncated parameter block");
  net.set_params_flat(flat);
  return net;
}

Adam::Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(n)),
      v_(Eigen::VectorXd::Zero(n)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeMismatch("Adam::step: size mismatch");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
}

}  // namespace lfoeq
