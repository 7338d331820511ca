#include "lfoeq/analysis.hpp"

#include <cmath>

#include "lfoeq/environment.hpp"
#include "lfoeq/errors.hpp"
#include "lfoeq/parallel.hpp"
#include "lfoeq/rollout.hpp"

namespace lfoeq {

UniquenessReport uniqueness_report(const ElModel& model,
                                   const TrajectoryDataset& dataset,
                                   int probe_candidates, double probe_radius,
                                   std::uint64_t seed, double feas_tol) {
  UniquenessReport report;
  Rng rng(seed);
  double error_sum = 0.0;
  for (const auto& traj : dataset.trajectories) {
    for (int t = 0; t < dataset.horizon; ++t) {
      ++report.n_transitions;
      StateTransition transition{
          GeneralizedCoords::from_state(traj.states.row(t)),
          GeneralizedCoords::from_state(traj.states.row(t + 1))};
      ControlInput recovered;
      try {
        recovered = inverse_dynamics(model, transition, feas_tol);
      } catch (const InfeasibleTransition&) {
        ++report.infeasible_count;
        continue;
      }

      double err;
      if (!dataset.stripped()) {
        Eigen::VectorXd stored = traj.actions.row(t);
        err = (recovered.u - stored).norm() / (1.0 + stored.norm());
      } else {
        GeneralizedCoords replay =
            forward_step(model, transition.s, recovered, 0.0, nullptr);
        err = std::max(
            (replay.q - transition.s_next.q).cwiseAbs().maxCoeff(),
            (replay.qdot - transition.s_next.qdot).cwiseAbs().maxCoeff());
      }
      report.max_recovery_error = std::max(report.max_recovery_error, err);
      error_sum += err;

      if (probe_candidates > 0) {
        ProbeResult probe = uniqueness_probe(model, transition, probe_candidates,
                                             probe_radius, rng.fork(), feas_tol);
        report.alternatives_found += probe.alternatives_found;
        report.max_probe_candidate_error =
            std::max(report.max_probe_candidate_error, probe.max_candidate_error);
      }
    }
  }
  std::int64_t feasible = report.n_transitions - report.infeasible_count;
  report.mean_recovery_error =
      feasible > 0 ? error_sum / static_cast<double>(feasible) : 0.0;
  return report;
}

double gaussian_lipschitz(double std_dev) {
  if (std_dev <= 0.0) {
    throw NonpositiveStd("gaussian_lipschitz requires std > 0");
  }
  return 1.0 / (std_dev * std_dev * std::sqrt(2.0 * M_PI * M_E));
}

namespace {

double gaussian_pdf(double x, double mu, double sigma) {
  double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

XiBoundReport xi_bound_check(const GaussianPolicy& policy,
                             const Eigen::MatrixXd& states, double delta,
                             int grid_points, std::uint64_t seed) {
  XiBoundReport report;
  report.delta = delta;
  Eigen::VectorXd sigma = policy.std_dev();
  for (Eigen::Index d = 0; d < sigma.size(); ++d) {
    report.lipschitz_max =
        std::max(report.lipschitz_max, gaussian_lipschitz(sigma[d]));
  }

  Rng rng(seed);
  Eigen::MatrixXd means = policy.mean(states);
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    Eigen::VectorXd action =
        means.row(i).transpose() +
        sigma.cwiseProduct(rng.normal_vector(sigma.size()));
    for (Eigen::Index d = 0; d < sigma.size(); ++d) {
      double lipschitz = gaussian_lipschitz(sigma[d]);
      double p_a = gaussian_pdf(action[d], means(i, d), sigma[d]);
      double half_width = 0.5 * lipschitz * delta;
      if (p_a - half_width <= 0.0) {
        ++report.skipped;
        continue;
      }
      double xi_lo = p_a / (p_a + half_width);
      double xi_hi = p_a / (p_a - half_width);
      for (int g = 0; g < grid_points; ++g) {
        double frac = grid_points == 1
                          ? 0.5
                          : static_cast<double>(g) /
                                static_cast<double>(grid_points - 1);
        double a_tilde = action[d] - 0.5 * delta + frac * delta;
        double xi = p_a / gaussian_pdf(a_tilde, means(i, d), sigma[d]);
        ++report.n_samples;
        report.max_xi_deviation =
            std::max(report.max_xi_deviation, std::abs(xi - 1.0));
        if (xi > xi_hi * (1.0 + 1e-12) || xi < xi_lo * (1.0 - 1e-12)) {
          ++report.bound_violations;
        }
      }
    }
  }
  return report;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mu = mean_of(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - mu) * (x - mu);
  return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

double pooled_std(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) return 0.0;
  double va = std_of(a) * std_of(a);
  double vb = std_of(b) * std_of(b);
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  return std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
}

std::vector<NoiseSweepRow> noise_sweep(const std::string& env_id,
                                       const TrajectoryDataset& expert_lfd,
                                       const ExpertResult& expert,
                                       const ImitationConfig& base,
                                       const std::vector<double>& epsilons,
                                       const std::vector<std::uint64_t>& seeds,
                                       int workers) {
  struct Cell {
    int row;
    ImitationMode mode;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      cells.push_back({static_cast<int>(e), ImitationMode::kGail, s});
      cells.push_back({static_cast<int>(e), ImitationMode::kGaifo, s});
    }
  }

  std::vector<NoiseSweepRow> rows(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    rows[e].epsilon = epsilons[e];
    rows[e].gail_seed_returns.assign(seeds.size(), 0.0);
    rows[e].gaifo_seed_returns.assign(seeds.size(), 0.0);
  }

  // stripped view for the observation-only learner
  TrajectoryDataset expert_lfo = expert_lfd;
  expert_lfo.action_dim = 0;
  for (auto& traj : expert_lfo.trajectories) traj.actions.resize(0, 0);

  parallel_for(static_cast<int>(cells.size()), workers, [&](int index) {
    const Cell& cell = cells[static_cast<std::size_t>(index)];
    ImitationConfig config = base;
    config.mode = cell.mode;
    config.noise_bound = epsilons[static_cast<std::size_t>(cell.row)];
    config.seed = seeds[cell.seed_index];
    const TrajectoryDataset& data =
        cell.mode == ImitationMode::kGail ? expert_lfd : expert_lfo;
    LearningCurve curve = train(env_id, data, config);
    auto& slot = cell.mode == ImitationMode::kGail
                     ? rows[static_cast<std::size_t>(cell.row)].gail_seed_returns
                     : rows[static_cast<std::size_t>(cell.row)].gaifo_seed_returns;
    slot[cell.seed_index] = curve.final_eval_mean;
  });

  for (auto& row : rows) {
    row.gail_mean = mean_of(row.gail_seed_returns);
    row.gail_std = std_of(row.gail_seed_returns);
    row.gaifo_mean = mean_of(row.gaifo_seed_returns);
    row.gaifo_std = std_of(row.gaifo_seed_returns);

    EnvConfig env_config;
    env_config.noise_bound = row.epsilon;
    env_config.horizon = base.horizon;
    Env eval_env(env_id, env_config, 9001);
    Rng eval_rng(9002);
    EvalStats stats = evaluate_policy(
        eval_env, expert.policy, expert.input_norm ? &expert.normalizer : nullptr,
        20, eval_rng);
    row.expert_return = stats.mean_return;
  }
  return rows;
}

}  // namespace lfoeq
