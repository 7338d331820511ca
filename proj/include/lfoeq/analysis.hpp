#ifndef LFOEQ_ANALYSIS_HPP_
#define LFOEQ_ANALYSIS_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lfoeq/dataset.hpp"
#include "lfoeq/dynamics.hpp"
#include "lfoeq/expert.hpp"
#include "lfoeq/imitation.hpp"
#include "lfoeq/policy.hpp"

namespace lfoeq {

// Action-uniqueness statistics over a dataset's transitions. recovery error
// is ||u_hat - u|| / (1 + ||u||) against stored actions when present, and the
// forward-reproduction state error on stripped datasets.
struct UniquenessReport {
  std::int64_t n_transitions = 0;
  double max_recovery_error = 0.0;
  double mean_recovery_error = 0.0;
  std::int64_t alternatives_found = 0;
  std::int64_t infeasible_count = 0;
  double max_probe_candidate_error = 0.0;
};

UniquenessReport uniqueness_report(const ElModel& model,
                                   const TrajectoryDataset& dataset,
                                   int probe_candidates, double probe_radius,
                                   std::uint64_t seed,
                                   double feas_tol = kDefaultFeasTol);

// Peak derivative magnitude of the univariate Gaussian density:
// L = 1 / (std^2 * sqrt(2 pi e)). For diagonal policies this applies per
// dimension, where the factor densities of the other coordinates cancel in
// the ratio.
double gaussian_lipschitz(double std_dev);

struct XiBoundReport {
  double delta = 0.0;
  double lipschitz_max = 0.0;     // max per-dimension L over the policy
  std::int64_t n_samples = 0;     // evaluated (s, a, a~) triples
  double max_xi_deviation = 0.0;  // max |Xi - 1|
  std::int64_t bound_violations = 0;
  std::int64_t skipped = 0;  // samples where pi(a|s) - L*delta/2 <= 0
};

// For each state, samples a ~ pi(.|s) and sweeps each action coordinate over
// a grid of width delta around it, checking Xi = pi(a|s)/pi(a~|s) against the
// bracket pi / (pi +- L*delta/2).
XiBoundReport xi_bound_check(const GaussianPolicy& policy,
                             const Eigen::MatrixXd& states, double delta,
                             int grid_points, std::uint64_t seed);

struct NoiseSweepRow {
  double epsilon = 0.0;
  double expert_return = 0.0;
  double gail_mean = 0.0, gail_std = 0.0;
  double gaifo_mean = 0.0, gaifo_std = 0.0;
  std::vector<double> gail_seed_returns;
  std::vector<double> gaifo_seed_returns;
};

// Trains both modes at every epsilon with the same seed list, training and
// evaluating in the epsilon-noisy environment. The expert baseline is the
// saved expert re-evaluated at that noise level.
std::vector<NoiseSweepRow> noise_sweep(const std::string& env_id,
                                       const TrajectoryDataset& expert_lfd,
                                       const ExpertResult& expert,
                                       const ImitationConfig& base,
                                       const std::vector<double>& epsilons,
                                       const std::vector<std::uint64_t>& seeds,
                                       int workers);

// mean and pooled standard deviation helpers for two-seed-group comparisons
double mean_of(const std::vector<double>& xs);
double std_of(const std::vector<double>& xs);
double pooled_std(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace lfoeq

#endif  // LFOEQ_ANALYSIS_HPP_
