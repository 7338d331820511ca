#ifndef LFOEQ_TABULAR_HPP_
#define LFOEQ_TABULAR_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace lfoeq {

// Finite MDP with dense transition tables. transition[a](s, s') is the
// probability of reaching s' from s under action a.
struct FiniteMDP {
  int n_states = 0;
  int n_actions = 0;
  std::vector<Eigen::MatrixXd> transition;  // one n_states x n_states matrix per action
  double gamma = 0.9;
  Eigen::VectorXd rho0;

  double trans(int s, int a, int s_next) const { return transition[a](s, s_next); }
  void validate() const;  // rows sum to 1, entries nonnegative, rho0 a distribution
};

struct TabularPolicy {
  Eigen::MatrixXd pi;  // n_states x n_actions, rows sum to 1

  void validate(int n_states, int n_actions) const;
  // mixes with uniform so every entry is at least support_floor
  TabularPolicy with_full_support(double support_floor = 1e-6) const;
  bool full_support(double support_floor = 1e-6) const;
};

struct OccupancyTriple {
  Eigen::VectorXd rho_s;                 // state occupancy, sums to 1/(1-gamma)
  Eigen::MatrixXd rho_sa;                // n_states x n_actions
  Eigen::MatrixXd rho_ss;                // n_states x n_states
  std::vector<Eigen::MatrixXd> rho_sas;  // per action, n_states x n_states
};

// Solves (I - gamma * P_pi^T) x = rho0 and expands the joints
// rho_sa = x(s) pi(a|s), rho_sas = rho_sa T(s'|s,a), rho_ss = sum_a rho_sas.
OccupancyTriple exact_occupancies(const FiniteMDP& mdp, const TabularPolicy& pi);

// Conditional action density given a transition; rows with zero denominator
// (s' unreachable from s) are flagged undefined.
struct InverseDynamicsTable {
  // density[s](s_next, a); defined[s](s_next) marks valid rows
  std::vector<Eigen::MatrixXd> density;
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, 1>> defined_rows;  // per s, size n_states
};
InverseDynamicsTable inverse_dynamics_density(const FiniteMDP& mdp,
                                              const TabularPolicy& pi);

struct KlReport {
  double kl_sa = 0.0;     // KL between normalized state-action occupancies
  double kl_ss = 0.0;     // KL between normalized state-transition occupancies
  double idd = 0.0;       // inverse dynamics disagreement
  double residual = 0.0;  // idd - (kl_sa - kl_ss), expected ~ 0
};

// Both policies must be full support so every KL term is finite.
KlReport kl_report(const FiniteMDP& mdp, const TabularPolicy& pi,
                   const TabularPolicy& expert, double support_floor = 1e-6);

enum class MdpKind {
  kUniqueAction,     // deterministic, every reachable (s,s') induced by one action
  kMultiAction,      // deterministic with at least one duplicated (s,s')
  kRandomStochastic  // rows sampled from the simplex
};

FiniteMDP make_mdp(MdpKind kind, int n_states, int n_actions,
                   std::uint64_t rng_seed, double gamma = 0.9);

TabularPolicy random_policy(int n_states, int n_actions, std::uint64_t rng_seed,
                            double support_floor = 1e-6);

struct OccupancyEstimate {
  OccupancyTriple mean;
  Eigen::MatrixXd rho_sa_stderr;  // per-entry standard error across rollouts
  int n_rollouts = 0;
  int horizon = 0;
};

// Discounted empirical counts from truncated rollouts; unbiased up to the
// gamma^horizon tail.
OccupancyEstimate monte_carlo_occupancy(const FiniteMDP& mdp,
                                        const TabularPolicy& pi, int n_rollouts,
                                        int horizon, std::uint64_t rng_seed);

// Plain-text round trip: header (n_states, n_actions, gamma), transition rows
// "s a s' prob", then rho0.
void save_mdp(const FiniteMDP& mdp, const std::string& path);
FiniteMDP load_mdp(const std::string& path);

}  // namespace lfoeq

#endif  // LFOEQ_TABULAR_HPP_
