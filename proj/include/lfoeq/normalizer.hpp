#ifndef LFOEQ_NORMALIZER_HPP_
#define LFOEQ_NORMALIZER_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>

namespace lfoeq {

// Streaming mean/variance tracker with clipped standardization. Uses the
// single-pass parallel update on (count, mean, m2) so streamed statistics
// match two-pass batch statistics.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(Eigen::Index dim, double clip = 5.0);

  void update(const Eigen::MatrixXd& batch);  // one sample per row
  void update_one(const Eigen::VectorXd& x);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& batch) const;

  Eigen::Index dim() const { return mean_.size(); }
  std::int64_t count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::VectorXd variance() const;
  double clip() const { return clip_; }

  void save(std::ostream& out) const;
  static RunningNormalizer load(std::istream& in);

 private:
  std::int64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;  // sum of squared deviations
  double clip_;
};

}  // namespace lfoeq

#endif  // LFOEQ_NORMALIZER_HPP_
