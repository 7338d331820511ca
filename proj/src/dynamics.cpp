#include "lfoeq/dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <utility>

#include "lfoeq/errors.hpp"

namespace lfoeq {

Eigen::VectorXd GeneralizedCoords::as_state() const {
  Eigen::VectorXd s(q.size() + qdot.size());
  s << q, qdot;
  return s;
}

GeneralizedCoords GeneralizedCoords::from_state(const Eigen::VectorXd& s) {
  if (s.size() % 2 != 0) {
    throw DimensionMismatch("state vector must have even length");
  }
  Eigen::Index n = s.size() / 2;
  return {s.head(n), s.tail(n)};
}

ElModel::ElModel(std::string name, Eigen::Index dof, Eigen::Index act_dim,
                 Eigen::MatrixXd actuation, std::map<std::string, double> params,
                 double dt, Eigen::VectorXd state_lo, Eigen::VectorXd state_hi)
    : name_(std::move(name)),
      dof_(dof),
      act_dim_(act_dim),
      actuation_(std::move(actuation)),
      params_(std::move(params)),
      dt_(dt),
      state_lo_(std::move(state_lo)),
      state_hi_(std::move(state_hi)) {}

double ElModel::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) {
    throw ConfigError("unknown physical parameter: " + key);
  }
  return it->second;
}

namespace {

std::map<std::string, double> merge_params(std::map<std::string, double> base,
                                           const std::map<std::string, double>& overrides) {
  for (const auto& [k, v] : overrides) {
    if (base.find(k) == base.end()) {
      throw ConfigError("unknown physical parameter override: " + k);
    }
    base[k] = v;
  }
  return base;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Point mass m on a massless rod of length l, angle measured from the
// hanging position.
class PendulumModel final : public ElModel {
 public:
  explicit PendulumModel(const std::map<std::string, double>& overrides)
      : ElModel("pendulum", 1, 1, Eigen::MatrixXd::Identity(1, 1),
                merge_params({{"mass", 1.0}, {"length", 1.0}, {"gravity", 9.81}},
                             overrides),
                0.05, vec({-M_PI, -8.0}), vec({M_PI, 8.0})),
        m_(param("mass")),
        l_(param("length")),
        g_(param("gravity")) {}

  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Constant(1, 1, m_ * l_ * l_);
  }

  Eigen::MatrixXd coriolis_matrix(const Eigen::VectorXd&,
                                  const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Zero(1, 1);
  }

  Eigen::VectorXd gravity_vector(const Eigen::VectorXd& q) const override {
    return vec({m_ * g_ * l_ * std::sin(q[0])});
  }

  double potential_energy(const Eigen::VectorXd& q) const override {
    return m_ * g_ * l_ * (1.0 - std::cos(q[0]));
  }

 private:
  double m_, l_, g_;
};

// Shared two-link arm terms: point masses at the link tips, q2 relative.
struct TwoLink {
  double m1, m2, l1, l2;

  Eigen::MatrixXd mass(const Eigen::VectorXd& q) const {
    double c2 = std::cos(q[1]);
    Eigen::MatrixXd m(2, 2);
    m(0, 0) = m1 * l1 * l1 + m2 * (l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c2);
    m(0, 1) = m2 * (l2 * l2 + l1 * l2 * c2);
    m(1, 0) = m(0, 1);
    m(1, 1) = m2 * l2 * l2;
    return m;
  }

  Eigen::MatrixXd coriolis(const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qdot) const {
    double h = -m2 * l1 * l2 * std::sin(q[1]);
    Eigen::MatrixXd c(2, 2);
    c(0, 0) = h * qdot[1];
    c(0, 1) = h * (qdot[0] + qdot[1]);
    c(1, 0) = -h * qdot[0];
    c(1, 1) = 0.0;
    return c;
  }
};

// Planar arm in the horizontal plane: no gravity.
class Reacher2Model final : public ElModel {
 public:
  explicit Reacher2Model(const std::map<std::string, double>& overrides)
      : ElModel("reacher2", 2, 2, Eigen::MatrixXd::Identity(2, 2),
                merge_params(
                    {{"m1", 1.0}, {"m2", 1.0}, {"l1", 0.5}, {"l2", 0.5}},
                    overrides),
                0.02, vec({-M_PI, -M_PI, -8.0, -8.0}),
                vec({M_PI, M_PI, 8.0, 8.0})),
        links_{param("m1"), param("m2"), param("l1"), param("l2")} {}

  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override {
    return links_.mass(q);
  }

  Eigen::MatrixXd coriolis_matrix(const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot) const override {
    return links_.coriolis(q, qdot);
  }

  Eigen::VectorXd gravity_vector(const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Zero(2);
  }

  double potential_energy(const Eigen::VectorXd&) const override { return 0.0; }

 private:
  TwoLink links_;
};

// Cart with a point-mass pole, pole angle measured from upright; force acts
// on the cart only.
class CartpoleModel final : public ElModel {
 public:
  explicit CartpoleModel(const std::map<std::string, double>& overrides)
      : ElModel("cartpole", 2, 1, (Eigen::MatrixXd(2, 1) << 1.0, 0.0).finished(),
                merge_params({{"m_cart", 1.0},
                              {"m_pole", 0.1},
                              {"length", 0.5},
                              {"gravity", 9.81}},
                             overrides),
                0.02, vec({-2.4, -M_PI, -5.0, -8.0}),
                vec({2.4, M_PI, 5.0, 8.0})),
        mc_(param("m_cart")),
        mp_(param("m_pole")),
        l_(param("length")),
        g_(param("gravity")) {}

  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override {
    double ct = std::cos(q[1]);
    Eigen::MatrixXd m(2, 2);
    m(0, 0) = mc_ + mp_;
    m(0, 1) = mp_ * l_ * ct;
    m(1, 0) = m(0, 1);
    m(1, 1) = mp_ * l_ * l_;
    return m;
  }

  Eigen::MatrixXd coriolis_matrix(const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot) const override {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = -mp_ * l_ * std::sin(q[1]) * qdot[1];
    return c;
  }

  Eigen::VectorXd gravity_vector(const Eigen::VectorXd& q) const override {
    return vec({0.0, -mp_ * g_ * l_ * std::sin(q[1])});
  }

  double potential_energy(const Eigen::VectorXd& q) const override {
    return mp_ * g_ * l_ * std::cos(q[1]);
  }

 private:
  double mc_, mp_, l_, g_;
};

// Two-link arm in the vertical plane, q1 from the hanging position, torque at
// the elbow only.
class AcrobotModel final : public ElModel {
 public:
  explicit AcrobotModel(const std::map<std::string, double>& overrides)
      : ElModel("acrobot", 2, 1, (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished(),
                merge_params({{"m1", 1.0},
                              {"m2", 1.0},
                              {"l1", 1.0},
                              {"l2", 1.0},
                              {"gravity", 9.81}},
                             overrides),
                0.02, vec({-M_PI, -M_PI, -8.0, -8.0}),
                vec({M_PI, M_PI, 8.0, 8.0})),
        links_{param("m1"), param("m2"), param("l1"), param("l2")},
        g_(param("gravity")) {}

  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override {
    return links_.mass(q);
  }

  Eigen::MatrixXd coriolis_matrix(const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot) const override {
    return links_.coriolis(q, qdot);
  }

  Eigen::VectorXd gravity_vector(const Eigen::VectorXd& q) const override {
    double s1 = std::sin(q[0]);
    double s12 = std::sin(q[0] + q[1]);
    return vec({(links_.m1 + links_.m2) * g_ * links_.l1 * s1 +
                    links_.m2 * g_ * links_.l2 * s12,
                links_.m2 * g_ * links_.l2 * s12});
  }

  double potential_energy(const Eigen::VectorXd& q) const override {
    double c1 = std::cos(q[0]);
    double c12 = std::cos(q[0] + q[1]);
    // shifted so the hanging rest state has zero energy
    return (links_.m1 + links_.m2) * g_ * links_.l1 * (1.0 - c1) +
           links_.m2 * g_ * links_.l2 * (1.0 - c12);
  }

 private:
  TwoLink links_;
  double g_;
};

void check_state_dims(const ElModel& model, const GeneralizedCoords& s) {
  if (s.q.size() != model.dof() || s.qdot.size() != model.dof()) {
    std::ostringstream msg;
    msg << model.name() << ": state has q size " << s.q.size() << ", qdot size "
        << s.qdot.size() << ", expected dof " << model.dof();
    throw DimensionMismatch(msg.str());
  }
}

Eigen::VectorXd solve_mass(const ElModel& model, const Eigen::MatrixXd& mass,
                           const Eigen::VectorXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw SingularMass(model.name() + ": mass matrix factorization failed");
  }
  return llt.solve(rhs);
}

}  // namespace

std::unique_ptr<ElModel> make_model(const std::string& id,
                                    const std::map<std::string, double>& overrides) {
  if (id == "pendulum") return std::make_unique<PendulumModel>(overrides);
  if (id == "reacher2") return std::make_unique<Reacher2Model>(overrides);
  if (id == "cartpole") return std::make_unique<CartpoleModel>(overrides);
  if (id == "acrobot") return std::make_unique<AcrobotModel>(overrides);
  throw ConfigError("unknown model id: " + id);
}

const std::vector<std::string>& model_catalog() {
  static const std::vector<std::string> ids = {"pendulum", "reacher2",
                                               "cartpole", "acrobot"};
  return ids;
}

DynamicsTerms dynamics_terms(const ElModel& model, const GeneralizedCoords& s) {
  check_state_dims(model, s);
  return {model.mass_matrix(s.q), model.coriolis_matrix(s.q, s.qdot),
          model.gravity_vector(s.q)};
}

GeneralizedCoords forward_step(const ElModel& model, const GeneralizedCoords& s,
                               const ControlInput& u, double noise_bound,
                               Rng* rng) {
  check_state_dims(model, s);
  if (u.u.size() != model.act_dim()) {
    throw DimensionMismatch(model.name() + ": control input size mismatch");
  }
  const double dt = model.dt();
  DynamicsTerms terms = dynamics_terms(model, s);
  Eigen::VectorXd force =
      model.actuation_matrix() * u.u - terms.coriolis * s.qdot - terms.gravity;
  Eigen::VectorXd qddot = solve_mass(model, terms.mass, force);

  GeneralizedCoords next(s.q + dt * s.qdot, s.qdot + dt * qddot);
  if (noise_bound > 0.0) {
    if (rng == nullptr) {
      throw ConfigError("forward_step: noise_bound > 0 requires an rng");
    }
    const double half = noise_bound / 2.0;
    for (Eigen::Index i = 0; i < next.q.size(); ++i) {
      next.q[i] += rng->uniform(-half, half);
    }
    for (Eigen::Index i = 0; i < next.qdot.size(); ++i) {
      next.qdot[i] += rng->uniform(-half, half);
    }
  }
  return next;
}

namespace {

// tau = M*qddot + C*qdot + G for the Euler-consistent acceleration
Eigen::VectorXd transition_force(const ElModel& model, const StateTransition& t,
                                 Eigen::VectorXd* qddot_out) {
  const double dt = model.dt();
  Eigen::VectorXd qddot = (t.s_next.qdot - t.s.qdot) / dt;
  DynamicsTerms terms = dynamics_terms(model, t.s);
  if (qddot_out != nullptr) *qddot_out = qddot;
  return terms.mass * qddot + terms.coriolis * t.s.qdot + terms.gravity;
}

double actuation_tolerance(const ElModel& model, const Eigen::MatrixXd& mass,
                           const Eigen::VectorXd& tau, double feas_tol) {
  // velocity noise admitted by feas_tol maps to force error of order
  // ||M|| * feas_tol / dt
  double mass_scale = mass.cwiseAbs().rowwise().sum().maxCoeff();
  return feas_tol / model.dt() * (1.0 + mass_scale) *
         (1.0 + tau.cwiseAbs().maxCoeff());
}

}  // namespace

bool is_feasible(const ElModel& model, const StateTransition& t,
                 double feas_tol, std::string* reason) {
  check_state_dims(model, t.s);
  check_state_dims(model, t.s_next);
  const double dt = model.dt();
  double pos_err = (t.s_next.q - (t.s.q + dt * t.s.qdot)).cwiseAbs().maxCoeff();
  if (pos_err > feas_tol) {
    if (reason != nullptr) {
      std::ostringstream msg;
      msg << "position residual " << pos_err << " exceeds " << feas_tol;
      *reason = msg.str();
    }
    return false;
  }
  if (model.act_dim() < model.dof()) {
    Eigen::VectorXd tau = transition_force(model, t, nullptr);
    const Eigen::MatrixXd& b = model.actuation_matrix();
    Eigen::VectorXd u = b.colPivHouseholderQr().solve(tau);
    double residual = (b * u - tau).cwiseAbs().maxCoeff();
    double tol = actuation_tolerance(model, model.mass_matrix(t.s.q), tau, feas_tol);
    if (residual > tol) {
      if (reason != nullptr) {
        std::ostringstream msg;
        msg << "actuation residual " << residual << " exceeds " << tol;
        *reason = msg.str();
      }
      return false;
    }
  }
  return true;
}

ControlInput inverse_dynamics(const ElModel& model, const StateTransition& t,
                              double feas_tol) {
  check_state_dims(model, t.s);
  check_state_dims(model, t.s_next);
  const double dt = model.dt();
  double pos_err = (t.s_next.q - (t.s.q + dt * t.s.qdot)).cwiseAbs().maxCoeff();
  if (pos_err > feas_tol) {
    std::ostringstream msg;
    msg << model.name() << ": position residual " << pos_err
        << " exceeds feas_tol " << feas_tol;
    throw InfeasibleTransition(InfeasibleTransition::Kind::kPosition, msg.str());
  }

  Eigen::VectorXd tau = transition_force(model, t, nullptr);
  const Eigen::MatrixXd& b = model.actuation_matrix();
  Eigen::VectorXd u = b.colPivHouseholderQr().solve(tau);
  if (model.act_dim() < model.dof()) {
    double residual = (b * u - tau).cwiseAbs().maxCoeff();
    double tol = actuation_tolerance(model, model.mass_matrix(t.s.q), tau, feas_tol);
    if (residual > tol) {
      std::ostringstream msg;
      msg << model.name() << ": generalized force leaves range(B), residual "
          << residual << " exceeds " << tol;
      throw InfeasibleTransition(InfeasibleTransition::Kind::kActuation,
                                 msg.str());
    }
  }
  return ControlInput(std::move(u));
}

double total_energy(const ElModel& model, const GeneralizedCoords& s) {
  check_state_dims(model, s);
  Eigen::MatrixXd mass = model.mass_matrix(s.q);
  return 0.5 * s.qdot.dot(mass * s.qdot) + model.potential_energy(s.q);
}

ProbeResult uniqueness_probe(const ElModel& model, const StateTransition& t,
                             int n_candidates, double search_radius,
                             std::uint64_t rng_seed, double feas_tol) {
  // separation below which a candidate counts as u* itself
  constexpr double kSeparation = 1e-6;
  ControlInput u_star = inverse_dynamics(model, t, feas_tol);
  Rng rng(rng_seed);
  ProbeResult result;
  result.n_candidates = n_candidates;
  for (int i = 0; i < n_candidates; ++i) {
    Eigen::VectorXd candidate =
        u_star.u + rng.ball(model.act_dim(), search_radius);
    GeneralizedCoords next =
        forward_step(model, t.s, ControlInput(candidate), 0.0, nullptr);
    double err = std::max((next.q - t.s_next.q).cwiseAbs().maxCoeff(),
                          (next.qdot - t.s_next.qdot).cwiseAbs().maxCoeff());
    result.max_candidate_error = std::max(result.max_candidate_error, err);
    if ((candidate - u_star.u).norm() > kSeparation && err <= feas_tol) {
      ++result.alternatives_found;
    }
  }
  return result;
}

GeneralizedCoords sample_state(const ElModel& model, Rng& rng) {
  const Eigen::VectorXd& lo = model.state_lower();
  const Eigen::VectorXd& hi = model.state_upper();
  Eigen::VectorXd s(lo.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform(lo[i], hi[i]);
  }
  return GeneralizedCoords::from_state(s);
}

}  // namespace lfoeq
