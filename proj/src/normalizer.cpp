#include "lfoeq/normalizer.hpp"

#include <istream>
#include <ostream>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {
constexpr double kVarianceFloor = 1e-8;
}

RunningNormalizer::RunningNormalizer(Eigen::Index dim, double clip)
    : mean_(Eigen::VectorXd::Zero(dim)),
      m2_(Eigen::VectorXd::Zero(dim)),
      clip_(clip) {}

void RunningNormalizer::update(const Eigen::MatrixXd& batch) {
  if (batch.cols() != mean_.size()) {
    throw ShapeMismatch("RunningNormalizer::update: width mismatch");
  }
  if (batch.rows() == 0) return;
  const double nb = static_cast<double>(batch.rows());
  Eigen::VectorXd batch_mean = batch.colwise().mean();
  Eigen::MatrixXd centered = batch.rowwise() - batch_mean.transpose();
  Eigen::VectorXd batch_m2 = centered.array().square().colwise().sum();

  const double n = static_cast<double>(count_);
  Eigen::VectorXd delta = batch_mean - mean_;
  const double total = n + nb;
  mean_ += delta * (nb / total);
  m2_ += batch_m2 + delta.cwiseProduct(delta) * (n * nb / total);
  count_ += batch.rows();
}

void RunningNormalizer::update_one(const Eigen::VectorXd& x) {
  update(x.transpose());
}

Eigen::VectorXd RunningNormalizer::variance() const {
  if (count_ == 0) return Eigen::VectorXd::Ones(mean_.size());
  return m2_ / static_cast<double>(count_);
}

Eigen::VectorXd RunningNormalizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size()) {
    throw ShapeMismatch("RunningNormalizer::apply: size mismatch");
  }
  Eigen::VectorXd scale = (variance().array() + kVarianceFloor).sqrt();
  return ((x - mean_).cwiseQuotient(scale)).cwiseMax(-clip_).cwiseMin(clip_);
}

Eigen::MatrixXd RunningNormalizer::apply(const Eigen::MatrixXd& batch) const {
  if (batch.cols() != mean_.size()) {
    throw ShapeMismatch("RunningNormalizer::apply: width mismatch");
  }
  Eigen::ArrayXd scale = (variance().array() + kVarianceFloor).sqrt();
  Eigen::MatrixXd out = batch.rowwise() - mean_.transpose();
  out.array().rowwise() /= scale.transpose();
  return out.cwiseMax(-clip_).cwiseMin(clip_);
}

void RunningNormalizer::save(std::ostream& out) const {
  std::uint64_t dim = static_cast<std::uint64_t>(mean_.size());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(&count_), sizeof(count_));
  out.write(reinterpret_cast<const char*>(&clip_), sizeof(clip_));
  out.write(reinterpret_cast<const char*>(mean_.data()),
            static_cast<std::streamsize>(sizeof(double) * dim));
  out.write(reinterpret_cast<const char*>(m2_.data()),
            static_cast<std::streamsize>(sizeof(double) * dim));
  if (!out) throw IoFailure("RunningNormalizer::save failed");
}

RunningNormalizer RunningNormalizer::load(std::istream& in) {
  std::uint64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  if (!in || dim == 0 || dim > (1 << 20)) {
    throw CorruptFile("RunningNormalizer::load: bad dimension");
  }
  RunningNormalizer norm(static_cast<Eigen::Index>(dim));
  in.read(reinterpret_cast<char*>(&norm.count_), sizeof(norm.count_));
  in.read(reinterpret_cast<char*>(&norm.clip_), sizeof(norm.clip_));
  in.read(reinterpret_cast<char*>(norm.mean_.data()),
          static_cast<std::streamsize>(sizeof(double) * dim));
  in.read(reinterpret_cast<char*>(norm.m2_.data()),
          static_cast<std::streamsize>(sizeof(double) * dim));
  if (!in) throw CorruptFile("RunningNormalizer::load: truncated");
  return norm;
}

}  // namespace lfoeq
