#ifndef LFOEQ_SPECTRAL_HPP_
#define LFOEQ_SPECTRAL_HPP_

#include <Eigen/Core>
#include <cstdint>

#include "lfoeq/rng.hpp"

namespace lfoeq {

// Left/right singular-vector estimates for one weight matrix, kept unit norm.
struct SpectralState {
  Eigen::VectorXd u;  // length = rows of W
  Eigen::VectorXd v;  // length = cols of W
};

// Random unit initialization followed by warmup power iterations (estimates
// only; W is untouched).
SpectralState make_spectral_state(const Eigen::MatrixXd& weights, Rng& rng,
                                  int warmup_iters = 50);

// One power-iteration update of (u, v); returns sigma_hat = u^T W v without
// modifying W.
double power_iteration_step(const Eigen::MatrixXd& weights, SpectralState& state);

// One power-iteration step, then divides W by the estimated top singular
// value; repeated application keeps the effective spectral norm near 1.
double spectral_step(Eigen::MatrixXd& weights, SpectralState& state);

}  // namespace lfoeq

#endif  // LFOEQ_SPECTRAL_HPP_
