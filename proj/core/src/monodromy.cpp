#include "gyro/monodromy.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/parallel.hpp"
#include "gyro/strata.hpp"
#include "real_roots.hpp"

namespace gyro {
namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x;
}

}  // namespace

RotationData rotation_data(double s, double g, const NormalFormCoefficients& c,
                           double quad_tol) {
  const StratumPoint sp = classify_value(c.mu2, s, g, c);
  if (sp.label != StratumLabel::OpenRegion) {
    std::ostringstream os;
    os << "rotation_number: (s, g) = (" << s << ", " << g << ") is not a regular value ("
       << to_string(sp.label) << ")";
    throw StratumError(os.str());
  }
  const double lam = c.lambda();
  const double gp = g - lam * s - c.c2 * s * s;
  // Z^2 = P(M) = -8b M^3 - (4 mu2 + 8 c1 s) M^2 + 4 g' M - s^2
  const double p2 = -(4.0 * c.mu2 + 8.0 * c.c1 * s);
  std::vector<double> r;
  if (s == 0.0) {
    // P = -M (8b M^2 - p2 M - 4 g')
    r = detail::real_polynomial_roots({-4.0 * gp, -p2, 8.0 * c.b});
    r.push_back(0.0);
    std::sort(r.begin(), r.end());
  } else {
    r = detail::real_polynomial_roots({-s * s, 4.0 * gp, p2, -8.0 * c.b});
  }
  if (r.size() != 3 || !(r[0] <= 1e-14) || !(r[2] > r[1]) || !(r[1] >= -1e-14)) {
    std::ostringstream os;
    os << "rotation_number: unexpected root configuration of the reduced motion at (" << s
       << ", " << g << ")";
    throw NumericError(os.str());
  }
  RotationData out;
  const double r1 = std::min(r[0], 0.0), r2 = std::max(r[1], 0.0), r3 = r[2];
  out.roots = {r1, r2, r3};

  // M = r2 + (r3 - r2) sin^2 phi turns dM / sqrt(P) into 2 dphi / sqrt(8b (M - r1)).
  auto M_of = [&](double phi) {
    const double sp2 = std::sin(phi);
    return r2 + (r3 - r2) * sp2 * sp2;
  };
  auto weight = [&](double M) { return 2.0 / std::sqrt(8.0 * c.b * (M - r1)); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_t = 0.0, err_th = 0.0;
  const double half_t = GK::integrate(
      [&](double phi) { return weight(M_of(phi)); }, 0.0, kPi / 2.0, 20, quad_tol, &err_t);
  // The s / (2M) term peaks at M = r2 ~ s^2 / (4 g'), far too narrow for
  // quadrature when s is small: its leading part is integrated in closed form,
  //   int_0^{pi/2} dphi / (r2 + (r3 - r2) sin^2 phi) = pi / (2 sqrt(r2 r3)),
  // leaving a bounded remainder.
  const double w2 = weight(r2);
  double singular = 0.0;
  if (s != 0.0)
    singular = 0.5 * s * w2 * kPi / (2.0 * std::sqrt(r2 * r3));
  else if (r2 == 0.0)
    singular = kPi / 2.0;  // orbit through M = 0: take the s -> 0+ limit
  const double half_th = singular + GK::integrate(
      [&](double phi) {
        const double M = M_of(phi);
        const double w = weight(M);
        const double gs = lam + 2.0 * c.c1 * M + 2.0 * c.c2 * s;
        const double rest = s == 0.0 ? 0.0 : 0.5 * s * (w - w2) / M;
        return gs * w + rest;
      },
      0.0, kPi / 2.0, 20, quad_tol, &err_th);
  if (!std::isfinite(half_t) || !std::isfinite(half_th) ||
      err_t > 1e-8 * std::max(1.0, std::abs(half_t)) ||
      err_th > 1e-8 * std::max(1.0, std::abs(half_th))) {
    std::ostringstream os;
    os << "rotation_number: quadrature did not converge at (" << s << ", " << g << ")";
    throw NumericError(os.str());
  }
  out.period = 2.0 * half_t;
  out.theta = 2.0 * half_th;
  return out;
}

double rotation_number(double s, double g, const NormalFormCoefficients& c) {
  return rotation_data(s, g, c).theta;
}

void LoopSpec::validate() const {
  if (vertices.size() < 3) throw ConfigError("loop: at least 3 vertices required");
  if (steps < 8) throw ConfigError("loop: steps must be >= 8");
  if (turns < 1) throw ConfigError("loop: turns must be >= 1");
  if (!(margin > 0.0)) throw ConfigError("loop: margin must be > 0");
}

std::vector<std::array<double, 2>> LoopSpec::nodes() const {
  validate();
  const std::size_t nv = vertices.size();
  std::vector<double> cum(nv + 1, 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % nv];
    cum[i + 1] = cum[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  const double L = cum[nv];
  if (!(L > 0.0)) throw ConfigError("loop: degenerate polygon");
  std::vector<std::array<double, 2>> out;
  for (int t = 0; t < turns; ++t) {
    std::size_t seg = 0;
    for (int k = 0; k < steps; ++k) {
      const double arc = L * k / steps;
      while (seg + 1 < nv && cum[seg + 1] <= arc) ++seg;
      const auto& a = vertices[seg];
      const auto& b = vertices[(seg + 1) % nv];
      const double len = cum[seg + 1] - cum[seg];
      const double u = len > 0.0 ? (arc - cum[seg]) / len : 0.0;
      out.push_back({a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])});
    }
  }
  out.push_back(out.front());
  return out;
}

LoopSpec ellipse_loop(double s0, double g0, double rs, double rg, int vertices, int steps,
                      int turns) {
  LoopSpec l;
  l.steps = steps;
  l.turns = turns;
  for (int i = 0; i < vertices; ++i) {
    const double t = 2.0 * kPi * i / vertices;
    l.vertices.push_back({s0 + rs * std::cos(t), g0 + rg * std::sin(t)});
  }
  return l;
}

MonodromyResult monodromy_around_thread(const LoopSpec& loop, const NormalFormCoefficients& c,
                                        unsigned workers, int max_halvings) {
  const auto nodes = loop.nodes();
  for (const auto& n : nodes) {
    const StratumPoint sp = classify_value(c.mu2, n[0], n[1], c, loop.margin);
    if (sp.label != StratumLabel::OpenRegion) {
      std::ostringstream os;
      os << "monodromy: loop node (" << n[0] << ", " << n[1] << ") is not a regular value ("
         << to_string(sp.label) << ")";
      throw StratumError(os.str());
    }
  }
  const std::vector<double> raw = parallel_map(nodes.size(), workers, [&](std::size_t i) {
    return rotation_number(nodes[i][0], nodes[i][1], c);
  });

  MonodromyResult res;
  res.log.push_back({nodes[0][0], nodes[0][1], raw[0], raw[0]});

  // Appends the branch from the last logged node to (s, g, theta).
  std::function<void(double, double, double, int)> advance = [&](double s, double g,
                                                                  double th, int depth) {
    const ContinuationNode& prev = res.log.back();
    const double d = wrap_pi(th - prev.theta_raw);
    if (std::abs(d) > kPi / 2.0) {
      if (depth >= max_halvings) {
        std::ostringstream os;
        os << "monodromy: branch tracking ambiguous between (" << prev.s << ", " << prev.g
           << ") and (" << s << ", " << g << "); increase steps";
        throw ContinuationError(os.str());
      }
      ++res.refinements;
      const double sm = 0.5 * (prev.s + s), gm = 0.5 * (prev.g + g);
      const double thm = rotation_number(sm, gm, c);
      advance(sm, gm, thm, depth + 1);
      advance(s, g, th, depth + 1);
      return;
    }
    res.log.push_back({s, g, th, prev.theta_branch + d});
  };
  for (std::size_t i = 1; i < nodes.size(); ++i) advance(nodes[i][0], nodes[i][1], raw[i], 0);

  res.theta_jump = res.log.back().theta_branch - res.log.front().theta_branch;
  const double n = res.theta_jump / (2.0 * kPi);
  const long ni = std::lround(n);
  if (std::abs(n - static_cast<double>(ni)) > 1e-6) {
    std::ostringstream os;
    os << "monodromy: branch change " << res.theta_jump << " is not a multiple of 2 pi";
    throw ContinuationError(os.str());
  }
  res.matrix = {{{1, ni}, {0, 1}}};

  // geometric winding of the node polygon around the thread value (0, 0)
  double ang = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double a0 = std::atan2(nodes[i - 1][1], nodes[i - 1][0]);
    const double a1 = std::atan2(nodes[i][1], nodes[i][0]);
    ang += wrap_pi(a1 - a0);
  }
  res.winding = std::lround(ang / (2.0 * kPi));
  return res;
}

KolmogorovReport kolmogorov_hessian(const std::function<double(const Eigen::VectorXd&)>& F,
                                    const Eigen::VectorXd& y0, double h, double degenerate_tol) {
  if (y0.size() < 1) throw DimensionError("kolmogorov_hessian: y must be non-empty");
  if (!(h > 0.0)) throw ConfigError("kolmogorov_hessian: h_fd must be > 0");
  const auto m = y0.size();
  KolmogorovReport rep;
  rep.hessian.resize(m, m);
  const double f0 = F(y0);
  double fscale = std::abs(f0);
  auto eval = [&](const Eigen::VectorXd& y) {
    const double v = F(y);
    fscale = std::max(fscale, std::abs(v));
    return v;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd yp = y0, ym = y0;
    yp[i] += h;
    ym[i] -= h;
    rep.hessian(i, i) = (eval(yp) - 2.0 * f0 + eval(ym)) / (h * h);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      Eigen::VectorXd pp = y0, pm = y0, mp = y0, mm = y0;
      pp[i] += h;
      pp[j] += h;
      pm[i] += h;
      pm[j] -= h;
      mp[i] -= h;
      mp[j] += h;
      mm[i] -= h;
      mm[j] -= h;
      rep.hessian(i, j) = rep.hessian(j, i) =
          (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * h * h);
    }
  }
  rep.det = rep.hessian.determinant();
  const double hn = rep.hessian.norm();
  const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * fscale / (h * h);
  rep.condition = hn > 0.0 ? rounding / hn : (rounding > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.precision_warning = rep.condition > 1e-3;
  rep.degenerate = std::abs(rep.det) <= degenerate_tol * std::max(1.0, std::pow(hn, static_cast<double>(m)));
  return rep;
}

}  // namespace gyro
