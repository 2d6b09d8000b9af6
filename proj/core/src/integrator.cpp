#include "gyro/integrator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {
namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

// u' = u x v with v frozen: rotation of u about v by angle -|v| t.
Vec3 rotate_about(const Vec3& u, const Vec3& v, double t) {
  const double nv = v.norm();
  if (nv == 0.0) return u;
  const Vec3 k = v / nv;
  const double th = -nv * t;
  const double c = std::cos(th), s = std::sin(th);
  return u * c + k.cross(u) * s + k * (k.dot(u)) * (1.0 - c);
}

struct CoupledView {
  const TopParams& p;
  const CoupledConfig& cc;
  CouplingFunction f;
};

// ----- splitting sub-flows --------------------------------------------------

void kinetic_flow(ReducedTopState& s, double t) { s.u = rotate_about(s.u, s.v, t); }

void potential_flow(ReducedTopState& s, double c, double t) {
  s.v += t * c * Vec3(s.u.y(), -s.u.x(), 0.0);
}

void kinetic_flow(CoupledState& s, const CoupledView& cv, double t) {
  kinetic_flow(s.top, t);
  s.x += t * cv.cc.omega_osc;
}

void potential_flow(CoupledState& s, const CoupledView& cv, double t) {
  const double eps = cv.cc.epsilon;
  const Vec3 force = cv.p.c * Vec3::UnitZ() + eps * cv.f.grad_u(s.top.u, s.x);
  s.top.v += t * s.top.u.cross(force);
  s.y -= t * eps * cv.f.grad_x(s.top.u, s.x);
}

template <class State, class... Ctx>
void strang(State& s, double h, const Ctx&... ctx) {
  if constexpr (std::is_same_v<State, ReducedTopState>) {
    potential_flow(s, ctx..., 0.5 * h);
    kinetic_flow(s, h);
    potential_flow(s, ctx..., 0.5 * h);
  } else {
    potential_flow(s, ctx..., 0.5 * h);
    kinetic_flow(s, ctx..., h);
    potential_flow(s, ctx..., 0.5 * h);
  }
}

// Yoshida triple jump of the Strang step.
template <class State, class... Ctx>
void yoshida4(State& s, double h, const Ctx&... ctx) {
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  strang(s, w1 * h, ctx...);
  strang(s, w0 * h, ctx...);
  strang(s, w1 * h, ctx...);
}

// ----- implicit midpoint ----------------------------------------------------

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

ReducedTopState midpoint_top(const ReducedTopState& s0, double c,
                             const IntegratorConfig& cfg) {
  const double h = cfg.dt;
  Vec6 y0;
  y0 << s0.u, s0.v;
  const TopTangent f0 = detail::top_field(s0.u, s0.v, c);
  Vec6 y1;
  y1 << s0.u + h * f0.du, s0.v + h * f0.dv;
  const Mat3 ce3 = c * hat(Vec3::UnitZ());
  double last = 0.0;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    const Vec6 m = 0.5 * (y0 + y1);
    const Vec3 um = m.head<3>(), vm = m.tail<3>();
    const TopTangent fm = detail::top_field(um, vm, c);
    Vec6 r;
    r << y1.head<3>() - y0.head<3>() - h * fm.du,
        y1.tail<3>() - y0.tail<3>() - h * fm.dv;
    // d(u x v)/du = -[v]x, d(u x v)/dv = [u]x, d(c u x e3)/du = -c[e3]x
    Mat6 jf;
    jf << -hat(vm), hat(um), -ce3, Mat3::Zero();
    const Mat6 jac = Mat6::Identity() - 0.5 * h * jf;
    const Vec6 delta = jac.partialPivLu().solve(r);
    y1 -= delta;
    last = delta.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(last)) break;
    if (last <= cfg.newton_tol * std::max(1.0, y1.lpNorm<Eigen::Infinity>()))
      return {y1.head<3>(), y1.tail<3>()};
  }
  std::ostringstream os;
  os << "implicit midpoint: Newton did not converge in " << cfg.newton_max_iter
     << " iterations (last update " << last << ", dt " << h << ")";
  throw StepFailure(os.str());
}

CoupledState midpoint_coupled(const CoupledState& s0, const CoupledView& cv,
                              const IntegratorConfig& cfg) {
  const double h = cfg.dt;
  const double c = cv.p.c, eps = cv.cc.epsilon;
  const Eigen::Index n = cv.cc.n();
  const Eigen::Index dim = 6 + 2 * n;
  const Vec3& dir = cv.f.direction();
  const VecX& w = cv.f.weights();

  auto pack = [&](const CoupledState& s) {
    VecX y(dim);
    y << s.top.u, s.top.v, s.x, s.y;
    return y;
  };
  auto field = [&](const VecX& y) {
    const Vec3 u = y.segment<3>(0), v = y.segment<3>(3);
    const VecX x = y.segment(6, n);
    const double cf = cv.f.angular_factor(x);
    VecX f(dim);
    f.segment<3>(0) = u.cross(v);
    f.segment<3>(3) = u.cross(c * Vec3::UnitZ() + eps * cf * dir);
    f.segment(6, n) = cv.cc.omega_osc;
    f.segment(6 + n, n) =
        eps * dir.dot(u) * (w.array() * x.array().sin()).matrix();
    return f;
  };

  const VecX y0 = pack(s0);
  VecX y1 = y0 + h * field(y0);
  double last = 0.0;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    const VecX m = 0.5 * (y0 + y1);
    const Vec3 um = m.segment<3>(0), vm = m.segment<3>(3);
    const VecX xm = m.segment(6, n);
    const double cf = cv.f.angular_factor(xm);
    const VecX r = y1 - y0 - h * field(m);

    Eigen::MatrixXd jf = Eigen::MatrixXd::Zero(dim, dim);
    jf.block<3, 3>(0, 0) = -hat(vm);
    jf.block<3, 3>(0, 3) = hat(um);
    jf.block<3, 3>(3, 0) = -hat(c * Vec3::UnitZ() + eps * cf * dir);
    const Vec3 udir = um.cross(dir);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double si = std::sin(xm[i]), ci = std::cos(xm[i]);
      jf.block<3, 1>(3, 6 + i) = -eps * w[i] * si * udir;
      jf.block<1, 3>(6 + n + i, 0) = eps * w[i] * si * dir.transpose();
      jf(6 + n + i, 6 + i) = eps * dir.dot(um) * w[i] * ci;
    }
    const Eigen::MatrixXd jac =
        Eigen::MatrixXd::Identity(dim, dim) - 0.5 * h * jf;
    const VecX delta = jac.partialPivLu().solve(r);
    y1 -= delta;
    last = delta.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(last)) break;
    if (last <= cfg.newton_tol * std::max(1.0, y1.lpNorm<Eigen::Infinity>())) {
      CoupledState out;
      out.top = {y1.segment<3>(0), y1.segment<3>(3)};
      out.x = y1.segment(6, n);
      out.y = y1.segment(6 + n, n);
      return out;
    }
  }
  std::ostringstream os;
  os << "implicit midpoint (coupled): Newton did not converge in "
     << cfg.newton_max_iter << " iterations (last update " << last << ")";
  throw StepFailure(os.str());
}

DriftSample top_drift(const ReducedTopState& s, const TopParams& p, double h0) {
  return {top_energy(s, p) - h0, s.u.squaredNorm() - 1.0, s.u.dot(s.v) - p.a};
}

long step_count(double t_end, double dt) {
  if (t_end <= 0.0) return 0;
  return static_cast<long>(std::ceil(t_end / std::abs(dt) - 1e-9));
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "implicit-midpoint") return Scheme::ImplicitMidpoint;
  if (name == "splitting-2nd") return Scheme::Splitting2;
  if (name == "splitting-4th") return Scheme::Splitting4;
  throw ConfigError("unknown integrator scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ImplicitMidpoint: return "implicit-midpoint";
    case Scheme::Splitting2: return "splitting-2nd";
    case Scheme::Splitting4: return "splitting-4th";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("integrator: dt must be finite and > 0");
  if (!(newton_tol > 0.0)) throw ConfigError("integrator: newton_tol must be > 0");
  if (newton_max_iter < 1)
    throw ConfigError("integrator: newton_max_iter must be >= 1");
}

double top_energy(const ReducedTopState& s, const TopParams& p) {
  return 0.5 * s.v.dot(s.v) + p.c * s.u.z() + p.rho * p.a * p.a;
}

double coupled_energy(const CoupledState& s, const TopParams& p,
                      const CoupledConfig& cc) {
  double h = top_energy(s.top, p) + cc.omega_osc.dot(s.y);
  if (cc.epsilon != 0.0)
    h += cc.epsilon * CouplingFunction(cc.coupling, cc.n()).value(s.top.u, s.x);
  return h;
}

ReducedTopState step(const ReducedTopState& s, const TopParams& p,
                     const IntegratorConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::ImplicitMidpoint:
      return midpoint_top(s, p.c, cfg);
    case Scheme::Splitting2: {
      ReducedTopState out = s;
      strang(out, cfg.dt, p.c);
      return out;
    }
    case Scheme::Splitting4: {
      ReducedTopState out = s;
      yoshida4(out, cfg.dt, p.c);
      return out;
    }
  }
  throw ConfigError("unknown scheme");
}

CoupledState step(const CoupledState& s, const TopParams& p,
                  const IntegratorConfig& cfg, const CoupledConfig& cc) {
  if (cc.epsilon == 0.0) {
    // Decoupled: the top evolves exactly as on its own.
    CoupledState out = s;
    out.top = step(s.top, p, cfg);
    out.x = wrap_angles(s.x + cfg.dt * cc.omega_osc);
    return out;
  }
  const CoupledView cv{p, cc, CouplingFunction(cc.coupling, cc.n())};
  CoupledState out;
  switch (cfg.scheme) {
    case Scheme::ImplicitMidpoint:
      out = midpoint_coupled(s, cv, cfg);
      break;
    case Scheme::Splitting2:
      out = s;
      strang(out, cfg.dt, cv);
      break;
    case Scheme::Splitting4:
      out = s;
      yoshida4(out, cfg.dt, cv);
      break;
  }
  out.x = wrap_angles(out.x);
  return out;
}

TopTrajectory integrate(const ReducedTopState& s0, const TopParams& p,
                        const IntegratorConfig& cfg, double t_end,
                        int sample_every) {
  p.validate();
  cfg.validate();
  if (t_end < 0.0) throw ConfigError("integrate: t_end must be >= 0");
  if (sample_every < 1) throw ConfigError("integrate: sample_every must be >= 1");
  check_constraints(s0, p.a);

  const long nsteps = step_count(t_end, cfg.dt);
  const double h0 = top_energy(s0, p);
  TopTrajectory tr;
  const std::size_t cap = static_cast<std::size_t>(nsteps / sample_every + 2);
  tr.times.reserve(cap);
  tr.states.reserve(cap);
  tr.drift.reserve(cap);
  tr.times.push_back(0.0);
  tr.states.push_back(s0);
  tr.drift.push_back(top_drift(s0, p, h0));

  ReducedTopState s = s0;
  for (long k = 1; k <= nsteps; ++k) {
    try {
      s = step(s, p, cfg);
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " at step " + std::to_string(k), k);
    }
    if (k % sample_every == 0 || k == nsteps) {
      tr.times.push_back(static_cast<double>(k) * cfg.dt);
      tr.states.push_back(s);
      tr.drift.push_back(top_drift(s, p, h0));
    }
  }
  return tr;
}

CoupledTrajectory integrate_coupled(const CoupledState& s0, const TopParams& p,
                                    const IntegratorConfig& cfg,
                                    const CoupledConfig& cc, double t_end,
                                    int sample_every) {
  p.validate();
  cfg.validate();
  cc.validate();
  if (t_end < 0.0) throw ConfigError("integrate_coupled: t_end must be >= 0");
  if (sample_every < 1)
    throw ConfigError("integrate_coupled: sample_every must be >= 1");
  if (s0.x.size() != cc.n() || s0.y.size() != cc.n())
    throw ConfigError("integrate_coupled: oscillator state size mismatch");
  check_constraints(s0.top, p.a);

  const long nsteps = step_count(t_end, cfg.dt);
  const double h0 = coupled_energy(s0, p, cc);
  auto drift = [&](const CoupledState& s) {
    return DriftSample{coupled_energy(s, p, cc) - h0,
                       s.top.u.squaredNorm() - 1.0, s.top.u.dot(s.top.v) - p.a};
  };
  CoupledTrajectory tr;
  CoupledState s = s0;
  s.x = wrap_angles(s.x);
  tr.times.push_back(0.0);
  tr.states.push_back(s);
  tr.drift.push_back(drift(s));
  for (long k = 1; k <= nsteps; ++k) {
    try {
      s = step(s, p, cfg, cc);
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " at step " + std::to_string(k), k);
    }
    if (k % sample_every == 0 || k == nsteps) {
      tr.times.push_back(static_cast<double>(k) * cfg.dt);
      tr.states.push_back(s);
      tr.drift.push_back(drift(s));
    }
  }
  return tr;
}

}  // namespace gyro
