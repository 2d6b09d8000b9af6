#include "gyro/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {

void TopParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ConfigError("TopParams: c must be finite and > 0");
  if (!std::isfinite(a) || !std::isfinite(rho))
    throw ConfigError("TopParams: a and rho must be finite");
}

void check_constraints(const ReducedTopState& s, double a, double tol) {
  const double duu = s.u.squaredNorm() - 1.0;
  const double duv = s.u.dot(s.v) - a;
  if (!(std::abs(duu) <= tol) || !(std::abs(duv) <= tol)) {
    std::ostringstream os;
    os << "state off R_a: |u.u-1|=" << std::abs(duu)
       << " |u.v-a|=" << std::abs(duv) << " (tol " << tol << ")";
    throw InvalidStateError(os.str());
  }
}

ReducedTopState vertical_equilibrium(double a) {
  return {Vec3::UnitZ(), a * Vec3::UnitZ()};
}

double reduced_hamiltonian(const ReducedTopState& s, const TopParams& p,
                           double tol) {
  check_constraints(s, p.a, tol);
  return 0.5 * s.v.dot(s.v) + p.c * s.u.z() + p.rho * p.a * p.a;
}

TopTangent reduced_vector_field(const ReducedTopState& s, const TopParams& p,
                                double tol) {
  check_constraints(s, p.a, tol);
  return detail::top_field(s.u, s.v, p.c);
}

ReducedTopState project_to_constraints(const Vec3& u, const Vec3& v, double a) {
  const double nrm2 = u.squaredNorm();
  if (!(nrm2 > 0.0) || !std::isfinite(nrm2))
    throw DegenerateInputError("project_to_constraints: u must be nonzero");
  constexpr double ulps = 4.0 * std::numeric_limits<double>::epsilon();
  const double uv = u.dot(v);
  if (std::abs(nrm2 - 1.0) <= ulps &&
      std::abs(uv - a) <= ulps * (1.0 + std::abs(a) + v.norm()))
    return {u, v};
  ReducedTopState out;
  out.u = u / std::sqrt(nrm2);
  out.v = v + (a - out.u.dot(v)) * out.u;
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& Coupling::catalog() {
  static const std::vector<std::string> ids{"cos_sum", "tilt_cos"};
  return ids;
}

void CoupledConfig::validate() const {
  if (omega_osc.size() < 1)
    throw ConfigError("CoupledConfig: need at least one oscillator frequency");
  if (!omega_osc.allFinite())
    throw ConfigError("CoupledConfig: omega_osc must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("CoupledConfig: epsilon must be finite and >= 0");
  CouplingFunction(coupling, omega_osc.size());
}

CouplingFunction::CouplingFunction(const Coupling& c, Eigen::Index n) {
  if (c.id == "cos_sum")
    dir_ = Vec3::UnitZ();
  else if (c.id == "tilt_cos")
    dir_ = Vec3::UnitX();
  else
    throw ConfigError("unknown coupling identifier '" + c.id + "'");
  if (c.params.empty()) {
    w_ = VecX::Ones(n);
  } else {
    if (static_cast<Eigen::Index>(c.params.size()) != n)
      throw ConfigError("coupling '" + c.id + "': expected " +
                        std::to_string(n) + " weights");
    w_ = Eigen::Map<const VecX>(c.params.data(), n);
  }
}

double CouplingFunction::angular_factor(const VecX& x) const {
  return w_.dot(x.array().cos().matrix());
}

double CouplingFunction::value(const Vec3& u, const VecX& x) const {
  return dir_.dot(u) * angular_factor(x);
}

Vec3 CouplingFunction::grad_u(const Vec3&, const VecX& x) const {
  return angular_factor(x) * dir_;
}

VecX CouplingFunction::grad_x(const Vec3& u, const VecX& x) const {
  return -dir_.dot(u) * (w_.array() * x.array().sin()).matrix();
}

double CouplingFunction::sup_abs() const { return w_.cwiseAbs().sum(); }

double CouplingFunction::sup_abs_grad_x(Eigen::Index i) const {
  return std::abs(w_[i]);
}

double coupled_hamiltonian(const CoupledState& s, const TopParams& p,
                           const CoupledConfig& cfg, double tol) {
  cfg.validate();
  const double h0 = reduced_hamiltonian(s.top, p, tol) + cfg.omega_osc.dot(s.y);
  if (cfg.epsilon == 0.0) return h0;
  const CouplingFunction f(cfg.coupling, cfg.n());
  return h0 + cfg.epsilon * f.value(s.top.u, s.x);
}

CoupledTangent coupled_vector_field(const CoupledState& s, const TopParams& p,
                                    const CoupledConfig& cfg, double tol) {
  cfg.validate();
  const CouplingFunction f(cfg.coupling, cfg.n());
  CoupledTangent t;
  t.top = reduced_vector_field(s.top, p, tol);
  t.dx = cfg.omega_osc;
  t.dy = VecX::Zero(cfg.n());
  if (cfg.epsilon != 0.0) {
    // A potential V(u) contributes u x grad V to v'.
    t.top.dv += cfg.epsilon * s.top.u.cross(f.grad_u(s.top.u, s.x));
    t.dy = -cfg.epsilon * f.grad_x(s.top.u, s.x);
  }
  return t;
}

VecX wrap_angles(const VecX& x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  VecX r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double t = std::fmod(x[i], two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    r[i] = t;
  }
  return r;
}

}  // namespace gyro
