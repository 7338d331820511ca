#include "lfoeq/spectral.hpp"

#include <cmath>

namespace lfoeq {

namespace {
constexpr double kTiny = 1e-300;
}

SpectralState make_spectral_state(const Eigen::MatrixXd& weights, Rng& rng,
                                  int warmup_iters) {
  SpectralState state;
  state.u = rng.normal_vector(weights.rows());
  state.u.normalize();
  state.v = rng.normal_vector(weights.cols());
  state.v.normalize();
  for (int i = 0; i < warmup_iters; ++i) {
    power_iteration_step(weights, state);
  }
  return state;
}

double power_iteration_step(const Eigen::MatrixXd& weights, SpectralState& state) {
  Eigen::VectorXd v = weights.transpose() * state.u;
  double vn = v.norm();
  if (vn > kTiny) state.v = v / vn;
  Eigen::VectorXd u = weights * state.v;
  double un = u.norm();
  if (un > kTiny) state.u = u / un;
  return state.u.dot(weights * state.v);
}

double spectral_step(Eigen::MatrixXd& weights, SpectralState& state) {
  double sigma = power_iteration_step(weights, state);
  if (sigma > kTiny) weights /= sigma;
  return sigma;
}

}  // namespace lfoeq
