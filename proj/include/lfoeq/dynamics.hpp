#ifndef LFOEQ_DYNAMICS_HPP_
#define LFOEQ_DYNAMICS_HPP_

#include <Eigen/Core>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lfoeq/rng.hpp"

namespace lfoeq {

// Joint positions and velocities of a rigid-body system. The MDP state is the
// concatenation [q; qdot].
struct GeneralizedCoords {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;

  GeneralizedCoords() = default;
  GeneralizedCoords(Eigen::VectorXd q_in, Eigen::VectorXd qdot_in)
      : q(std::move(q_in)), qdot(std::move(qdot_in)) {}

  Eigen::Index dof() const { return q.size(); }

  Eigen::VectorXd as_state() const;
  static GeneralizedCoords from_state(const Eigen::VectorXd& s);
};

struct ControlInput {
  Eigen::VectorXd u;

  ControlInput() = default;
  explicit ControlInput(Eigen::VectorXd u_in) : u(std::move(u_in)) {}
};

struct StateTransition {
  GeneralizedCoords s;
  GeneralizedCoords s_next;
};

struct DynamicsTerms {
  Eigen::MatrixXd mass;      // dof x dof, symmetric positive definite
  Eigen::MatrixXd coriolis;  // dof x dof
  Eigen::VectorXd gravity;   // dof
};

// Rigid-body system described by M(q)*qddot + C(q,qdot)*qdot + G(q) = B*u.
// The actuation matrix B (full column rank, act_dim <= dof) covers
// underactuated systems such as cartpole and acrobot.
class ElModel {
 public:
  virtual ~ElModel() = default;

  const std::string& name() const { return name_; }
  Eigen::Index dof() const { return dof_; }
  Eigen::Index act_dim() const { return act_dim_; }
  const Eigen::MatrixXd& actuation_matrix() const { return actuation_; }
  double dt() const { return dt_; }

  double param(const std::string& key) const;
  const std::map<std::string, double>& params() const { return params_; }

  // sampling box over the state vector [q; qdot]
  const Eigen::VectorXd& state_lower() const { return state_lo_; }
  const Eigen::VectorXd& state_upper() const { return state_hi_; }

  virtual Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::MatrixXd coriolis_matrix(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& qdot) const = 0;
  virtual Eigen::VectorXd gravity_vector(const Eigen::VectorXd& q) const = 0;
  // potential with G(q) = dV/dq; reference chosen so V(0) = 0 where sensible
  virtual double potential_energy(const Eigen::VectorXd& q) const = 0;

 protected:
  ElModel(std::string name, Eigen::Index dof, Eigen::Index act_dim,
          Eigen::MatrixXd actuation, std::map<std::string, double> params,
          double dt, Eigen::VectorXd state_lo, Eigen::VectorXd state_hi);

 private:
  std::string name_;
  Eigen::Index dof_;
  Eigen::Index act_dim_;
  Eigen::MatrixXd actuation_;
  std::map<std::string, double> params_;
  double dt_;
  Eigen::VectorXd state_lo_;
  Eigen::VectorXd state_hi_;
};

// Catalog ids: "pendulum", "reacher2", "cartpole", "acrobot".
std::unique_ptr<ElModel> make_model(
    const std::string& id, const std::map<std::string, double>& overrides = {});
const std::vector<std::string>& model_catalog();

// position feasibility for explicit Euler data; actuation residual is scaled
// by feas_tol/dt to stay consistent with the velocity noise it admits
inline constexpr double kDefaultFeasTol = 1e-9;

DynamicsTerms dynamics_terms(const ElModel& model, const GeneralizedCoords& s);

// Explicit Euler step: q' = q + dt*qdot, qdot' = qdot + dt*qddot with
// qddot = M(q)^-1 (B*u - C(q,qdot)*qdot - G(q)). Both increments use
// timestep-t values so the scheme is exactly invertible. With
// noise_bound > 0 every output dimension is perturbed by an independent
// uniform draw from (-noise_bound/2, +noise_bound/2); rng may be null only
// when noise_bound == 0.
GeneralizedCoords forward_step(const ElModel& model, const GeneralizedCoords& s,
                               const ControlInput& u, double noise_bound,
                               Rng* rng);

// Recovers the unique control for a feasible transition:
// qddot = (qdot' - qdot)/dt, tau = M*qddot + C*qdot + G, u = pinv(B)*tau.
// Throws InfeasibleTransition(kPosition) when q' != q + dt*qdot within
// feas_tol, and InfeasibleTransition(kActuation) when tau leaves range(B).
ControlInput inverse_dynamics(const ElModel& model, const StateTransition& t,
                              double feas_tol = kDefaultFeasTol);

bool is_feasible(const ElModel& model, const StateTransition& t,
                 double feas_tol = kDefaultFeasTol,
                 std::string* reason = nullptr);

// kinetic + potential energy
double total_energy(const ElModel& model, const GeneralizedCoords& s);

struct ProbeResult {
  int n_candidates = 0;
  int alternatives_found = 0;       // expected 0 on any feasible transition
  double max_candidate_error = 0.0; // max state error over sampled controls
};

// Samples n_candidates controls uniformly in a ball of search_radius around
// the recovered u* and counts candidates separated by more than 1e-6 that
// still reproduce s_next within feas_tol.
ProbeResult uniqueness_probe(const ElModel& model, const StateTransition& t,
                             int n_candidates, double search_radius,
                             std::uint64_t rng_seed,
                             double feas_tol = kDefaultFeasTol);

GeneralizedCoords sample_state(const ElModel& model, Rng& rng);

}  // namespace lfoeq

#endif  // LFOEQ_DYNAMICS_HPP_
