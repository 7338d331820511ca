#include "lfoeq/tabular.hpp"

#include <Eigen/LU>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lfoeq/errors.hpp"
#include "lfoeq/rng.hpp"

namespace lfoeq {

namespace {

constexpr double kRowSumTol = 1e-12;

int sample_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

Eigen::VectorXd simplex_row(Eigen::Index n, Rng& rng) {
  // normalized exponentials = flat Dirichlet
  Eigen::VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    row[i] = -std::log(1.0 - rng.uniform());
  }
  return row / row.sum();
}

}  // namespace

void FiniteMDP::validate() const {
  if (n_states <= 0 || n_actions <= 0) {
    throw InfeasibleShape("MDP must have positive state and action counts");
  }
  if (static_cast<int>(transition.size()) != n_actions) {
    throw ShapeMismatch("transition table has wrong action count");
  }
  if (gamma < 0.0 || gamma >= 1.0) {
    throw ConfigError("gamma must lie in [0, 1)");
  }
  for (int a = 0; a < n_actions; ++a) {
    if (transition[a].rows() != n_states || transition[a].cols() != n_states) {
      throw ShapeMismatch("transition matrix has wrong shape");
    }
    if (transition[a].minCoeff() < 0.0) {
      throw InfeasibleShape("negative transition probability");
    }
    for (int s = 0; s < n_states; ++s) {
      if (std::abs(transition[a].row(s).sum() - 1.0) > kRowSumTol) {
        throw InfeasibleShape("transition row does not sum to 1");
      }
    }
  }
  if (rho0.size() != n_states || rho0.minCoeff() < 0.0 ||
      std::abs(rho0.sum() - 1.0) > kRowSumTol) {
    throw InfeasibleShape("rho0 is not a distribution over states");
  }
}

void TabularPolicy::validate(int n_states, int n_actions) const {
  if (pi.rows() != n_states || pi.cols() != n_actions) {
    throw ShapeMismatch("policy table has wrong shape");
  }
  if (pi.minCoeff() < 0.0) {
    throw InfeasibleShape("negative action probability");
  }
  for (int s = 0; s < n_states; ++s) {
    if (std::abs(pi.row(s).sum() - 1.0) > kRowSumTol) {
      throw InfeasibleShape("policy row does not sum to 1");
    }
  }
}

TabularPolicy TabularPolicy::with_full_support(double support_floor) const {
  double alpha = support_floor * static_cast<double>(pi.cols());
  TabularPolicy mixed;
  mixed.pi = (1.0 - alpha) * pi;
  mixed.pi.array() += support_floor;
  return mixed;
}

bool TabularPolicy::full_support(double support_floor) const {
  return pi.minCoeff() >= support_floor * (1.0 - 1e-12);
}

OccupancyTriple exact_occupancies(const FiniteMDP& mdp, const TabularPolicy& pi) {
  mdp.validate();
  pi.validate(mdp.n_states, mdp.n_actions);
  const int n = mdp.n_states;

  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < mdp.n_actions; ++a) {
    p_pi += pi.pi.col(a).asDiagonal() * mdp.transition[a];
  }

  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p_pi.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd x = lu.solve(mdp.rho0);
  double residual = (system * x - mdp.rho0).norm();
  if (!x.allFinite() || residual > 1e-8) {
    throw SingularSystem("occupancy flow system solve failed");
  }

  OccupancyTriple occ;
  occ.rho_s = x;
  occ.rho_sa = x.asDiagonal() * pi.pi;
  occ.rho_sas.resize(mdp.n_actions);
  occ.rho_ss = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < mdp.n_actions; ++a) {
    occ.rho_sas[a] = occ.rho_sa.col(a).asDiagonal() * mdp.transition[a];
    occ.rho_ss += occ.rho_sas[a];
  }
  return occ;
}

InverseDynamicsTable inverse_dynamics_density(const FiniteMDP& mdp,
                                              const TabularPolicy& pi) {
  mdp.validate();
  pi.validate(mdp.n_states, mdp.n_actions);
  const int n = mdp.n_states;
  InverseDynamicsTable table;
  table.density.resize(n);
  table.defined_rows.resize(n);
  for (int s = 0; s < n; ++s) {
    table.density[s] = Eigen::MatrixXd::Zero(n, mdp.n_actions);
    table.defined_rows[s].resize(n);
    for (int s_next = 0; s_next < n; ++s_next) {
      double denom = 0.0;
      for (int a = 0; a < mdp.n_actions; ++a) {
        denom += mdp.trans(s, a, s_next) * pi.pi(s, a);
      }
      table.defined_rows[s][s_next] = denom > 0.0;
      if (denom > 0.0) {
        for (int a = 0; a < mdp.n_actions; ++a) {
          table.density[s](s_next, a) =
              mdp.trans(s, a, s_next) * pi.pi(s, a) / denom;
        }
      }
    }
  }
  return table;
}

KlReport kl_report(const FiniteMDP& mdp, const TabularPolicy& pi,
                   const TabularPolicy& expert, double support_floor) {
  if (!pi.full_support(support_floor) || !expert.full_support(support_floor)) {
    throw SupportViolation("kl_report requires full-support policies");
  }
  OccupancyTriple occ_pi = exact_occupancies(mdp, pi);
  OccupancyTriple occ_e = exact_occupancies(mdp, expert);
  InverseDynamicsTable inv_pi = inverse_dynamics_density(mdp, pi);
  InverseDynamicsTable inv_e = inverse_dynamics_density(mdp, expert);

  const double scale = 1.0 - mdp.gamma;  // occupancies normalized to distributions
  KlReport report;

  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      double p = scale * occ_pi.rho_sa(s, a);
      if (p <= 0.0) continue;
      double q = scale * occ_e.rho_sa(s, a);
      if (q <= 0.0) {
        throw SupportViolation("expert state-action occupancy vanishes on learner support");
      }
      report.kl_sa += p * std::log(p / q);
    }
  }

  for (int s = 0; s < mdp.n_states; ++s) {
    for (int s_next = 0; s_next < mdp.n_states; ++s_next) {
      double p = scale * occ_pi.rho_ss(s, s_next);
      if (p <= 0.0) continue;
      double q = scale * occ_e.rho_ss(s, s_next);
      if (q <= 0.0) {
        throw SupportViolation("expert transition occupancy vanishes on learner support");
      }
      report.kl_ss += p * std::log(p / q);
    }
  }

  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int s_next = 0; s_next < mdp.n_states; ++s_next) {
        double p = scale * occ_pi.rho_sas[a](s, s_next);
        if (p <= 0.0) continue;
        // defined by construction here: positive joint mass implies a
        // reachable transition
        double ratio = inv_pi.density[s](s_next, a) / inv_e.density[s](s_next, a);
        report.idd += p * std::log(ratio);
      }
    }
  }

  report.residual = report.idd - (report.kl_sa - report.kl_ss);
  return report;
}

FiniteMDP make_mdp(MdpKind kind, int n_states, int n_actions,
                   std::uint64_t rng_seed, double gamma) {
  if (n_states <= 0 || n_actions <= 0) {
    throw InfeasibleShape("MDP must have positive state and action counts");
  }
  Rng rng(rng_seed);
  FiniteMDP mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.rho0 = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
  mdp.transition.assign(n_actions, Eigen::MatrixXd::Zero(n_states, n_states));

  switch (kind) {
    case MdpKind::kUniqueAction: {
      if (n_actions > n_states) {
        throw InfeasibleShape(
            "unique_action kind needs n_actions <= n_states");
      }
      for (int s = 0; s < n_states; ++s) {
        std::vector<int> targets(n_states);
        std::iota(targets.begin(), targets.end(), 0);
        rng.shuffle(targets);
        // distinct targets per action make each reachable (s, s') unique
        for (int a = 0; a < n_actions; ++a) {
          mdp.transition[a](s, targets[a]) = 1.0;
        }
      }
      break;
    }
    case MdpKind::kMultiAction: {
      if (n_actions < 2) {
        throw InfeasibleShape("multi_action kind needs at least two actions");
      }
      for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
          int target = static_cast<int>(rng.uniform_index(n_states));
          mdp.transition[a](s, target) = 1.0;
        }
      }
      // force at least one duplicated (s, s') pair
      int s_dup = static_cast<int>(rng.uniform_index(n_states));
      Eigen::Index shared;
      mdp.transition[0].row(s_dup).maxCoeff(&shared);
      mdp.transition[1].row(s_dup).setZero();
      mdp.transition[1](s_dup, shared) = 1.0;
      break;
    }
    case MdpKind::kRandomStochastic: {
      for (int a = 0; a < n_actions; ++a) {
        for (int s = 0; s < n_states; ++s) {
          mdp.transition[a].row(s) = simplex_row(n_states, rng).transpose();
        }
      }
      break;
    }
  }
  mdp.validate();
  return mdp;
}

TabularPolicy random_policy(int n_states, int n_actions, std::uint64_t rng_seed,
                            double support_floor) {
  Rng rng(rng_seed);
  TabularPolicy policy;
  policy.pi.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    policy.pi.row(s) = simplex_row(n_actions, rng).transpose();
  }
  return policy.with_full_support(support_floor);
}

OccupancyEstimate monte_carlo_occupancy(const FiniteMDP& mdp,
                                        const TabularPolicy& pi, int n_rollouts,
                                        int horizon, std::uint64_t rng_seed) {
  mdp.validate();
  pi.validate(mdp.n_states, mdp.n_actions);
  Rng rng(rng_seed);
  const int n = mdp.n_states;

  OccupancyEstimate est;
  est.n_rollouts = n_rollouts;
  est.horizon = horizon;
  est.mean.rho_s = Eigen::VectorXd::Zero(n);
  est.mean.rho_sa = Eigen::MatrixXd::Zero(n, mdp.n_actions);
  est.mean.rho_ss = Eigen::MatrixXd::Zero(n, n);
  est.mean.rho_sas.assign(mdp.n_actions, Eigen::MatrixXd::Zero(n, n));
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, mdp.n_actions);

  Eigen::MatrixXd rollout_sa(n, mdp.n_actions);
  for (int k = 0; k < n_rollouts; ++k) {
    rollout_sa.setZero();
    int s = sample_categorical(mdp.rho0, rng);
    double discount = 1.0;
    for (int t = 0; t < horizon; ++t) {
      int a = sample_categorical(pi.pi.row(s).transpose(), rng);
      int s_next = sample_categorical(mdp.transition[a].row(s).transpose(), rng);
      rollout_sa(s, a) += discount;
      est.mean.rho_sas[a](s, s_next) += discount;
      discount *= mdp.gamma;
      s = s_next;
    }
    est.mean.rho_sa += rollout_sa;
    sum_sq += rollout_sa.cwiseProduct(rollout_sa);
  }

  double inv_n = 1.0 / static_cast<double>(n_rollouts);
  est.mean.rho_sa *= inv_n;
  sum_sq *= inv_n;
  Eigen::MatrixXd variance =
      (sum_sq - est.mean.rho_sa.cwiseProduct(est.mean.rho_sa)).cwiseMax(0.0);
  est.rho_sa_stderr = (variance * inv_n).cwiseSqrt();

  for (int a = 0; a < mdp.n_actions; ++a) {
    est.mean.rho_sas[a] *= inv_n;
    est.mean.rho_ss += est.mean.rho_sas[a];
  }
  est.mean.rho_s = est.mean.rho_sa.rowwise().sum();
  return est;
}

void save_mdp(const FiniteMDP& mdp, const std::string& path) {
  mdp.validate();
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out.precision(17);
  out << mdp.n_states << " " << mdp.n_actions << " " << mdp.gamma << "\n";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int s_next = 0; s_next < mdp.n_states; ++s_next) {
        double p = mdp.trans(s, a, s_next);
        if (p > 0.0) {
          out << s << " " << a << " " << s_next << " " << p << "\n";
        }
      }
    }
  }
  out << "rho0";
  for (int s = 0; s < mdp.n_states; ++s) out << " " << mdp.rho0[s];
  out << "\n";
  if (!out) throw IoFailure("write to " + path + " failed");
}

FiniteMDP load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  FiniteMDP mdp;
  if (!(in >> mdp.n_states >> mdp.n_actions >> mdp.gamma)) {
    throw CorruptFile(path + ": bad header");
  }
  if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
    throw CorruptFile(path + ": bad shape");
  }
  mdp.transition.assign(mdp.n_actions,
                        Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states));
  std::string token;
  while (in >> token) {
    if (token == "rho0") break;
    int s = std::stoi(token);
    int a, s_next;
    double p;
    if (!(in >> a >> s_next >> p)) throw CorruptFile(path + ": bad row");
    if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions ||
        s_next < 0 || s_next >= mdp.n_states) {
      throw CorruptFile(path + ": index out of range");
    }
    mdp.transition[a](s, s_next) = p;
  }
  mdp.rho0.resize(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (!(in >> mdp.rho0[s])) throw CorruptFile(path + ": bad rho0");
  }
  try {
    mdp.validate();
  } catch (const std::exception& e) {
    throw CorruptFile(path + ": " + e.what());
  }
  return mdp;
}

}  // namespace lfoeq
