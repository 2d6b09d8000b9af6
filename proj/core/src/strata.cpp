#include "gyro/strata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"
#include "real_roots.hpp"

namespace gyro {
namespace {

void require_supercritical(const NormalFormCoefficients& c, const char* who) {
  if (!(c.b > 0.0)) {
    std::ostringstream os;
    os << who << ": subcritical or degenerate coefficients (b = " << c.b
       << ") are not supported";
    throw UnsupportedCaseError(os.str());
  }
}

}  // namespace

std::string_view to_string(StratumLabel l) {
  switch (l) {
    case StratumLabel::Thread: return "Thread";
    case StratumLabel::SurfaceEven: return "SurfaceEven";
    case StratumLabel::OpenRegion: return "OpenRegion";
    case StratumLabel::Outside: return "Outside";
  }
  return "?";
}

std::vector<double> elliptic_family(double b, double c1, double mu2, double M) {
  if (!(M >= 0.0)) throw ConfigError("elliptic_family: M must be >= 0");
  if (M == 0.0) return {0.0};
  const double rad = c1 * c1 * M * M + b * M + mu2;
  if (rad < 0.0) return {};
  const double mid = 2.0 * c1 * M * M;
  const double half = 2.0 * M * std::sqrt(rad);
  if (half == 0.0) return {mid};
  return {mid - half, mid + half};
}

double gint_reduced(const NormalFormCoefficients& c, double S, double M, double N) {
  return c.lambda() * S + N + c.mu2 * M + 2.0 * c.b * M * M + 2.0 * c.c1 * S * M +
         c.c2 * S * S;
}

std::vector<StratumPoint> critical_surface(const NormalFormCoefficients& coeffs,
                                           const std::vector<double>& M_grid) {
  require_supercritical(coeffs, "critical_surface");
  std::vector<StratumPoint> out;
  for (double M : M_grid) {
    for (double S : elliptic_family(4.0 * coeffs.b, 2.0 * coeffs.c1, coeffs.mu2, M)) {
      StratumPoint p;
      p.mu2 = coeffs.mu2;
      p.s = S;
      p.M = M;
      const double N = M > 0.0 ? S * S / (4.0 * M) : 0.0;
      p.g = gint_reduced(coeffs, S, M, N);
      p.label = M == 0.0 ? StratumLabel::Thread : StratumLabel::SurfaceEven;
      out.push_back(p);
    }
  }
  return out;
}

FiberCriticalValues fiber_critical_values(const NormalFormCoefficients& c, double s) {
  require_supercritical(c, "fiber_critical_values");
  FiberCriticalValues f;
  std::vector<double> roots;
  if (s == 0.0) {
    // G = lambda*0 + N + mu2 M + 2b M^2 with N >= 0 free: z = 0 plus the
    // circle M = -mu2 / (4b) when mu2 < 0.
    f.M.push_back(0.0);
    f.g.push_back(0.0);
    if (c.mu2 < 0.0) roots.push_back(-c.mu2 / (4.0 * c.b));
  } else {
    // d/dM [s^2/(4M) + (mu2 + 2 c1 s) M + 2b M^2] = 0
    roots = detail::real_polynomial_roots(
        {-s * s, 0.0, 4.0 * c.mu2 + 8.0 * c.c1 * s, 16.0 * c.b});
  }
  for (double M : roots) {
    if (!(M > 0.0)) continue;
    f.M.push_back(M);
    f.g.push_back(gint_reduced(c, s, M, s * s / (4.0 * M)));
  }
  if (f.g.empty()) throw NumericError("fiber_critical_values: no critical point found");
  f.g_min = *std::min_element(f.g.begin(), f.g.end());
  return f;
}

StratumPoint classify_value(double mu2, double s, double g,
                            const NormalFormCoefficients& coeffs, double tol) {
  NormalFormCoefficients c = coeffs;
  c.mu2 = mu2;
  require_supercritical(c, "classify_value");
  StratumPoint p;
  p.mu2 = mu2;
  p.s = s;
  p.g = g;
  if (std::abs(s) <= tol && std::abs(g) <= tol) {
    p.label = StratumLabel::Thread;
    return p;
  }
  const FiberCriticalValues f = fiber_critical_values(c, s);
  for (std::size_t i = 0; i < f.g.size(); ++i) {
    if (std::abs(g - f.g[i]) <= tol) {
      p.label = StratumLabel::SurfaceEven;
      p.M = f.M[i];
      return p;
    }
  }
  p.label = g > f.g_min ? StratumLabel::OpenRegion : StratumLabel::Outside;
  return p;
}

ReducedTopState steady_precession_state(double c, double u3, double Omega) {
  if (!(c > 0.0)) throw ConfigError("steady precession: c must be > 0");
  if (!(std::abs(u3) <= 1.0)) throw ConfigError("steady precession: |u3| must be <= 1");
  if (Omega == 0.0 || !std::isfinite(Omega))
    throw DegenerateInputError("steady precession: Omega = 0 is a singular parametrization");
  const double kappa = -c / Omega;
  ReducedTopState s;
  s.u = Vec3(std::sqrt(std::max(0.0, 1.0 - u3 * u3)), 0.0, u3);
  s.v = kappa * s.u - Omega * Vec3::UnitZ();
  return s;
}

std::vector<TopEMValue> top_relative_equilibria(double c, const std::vector<double>& u3_grid,
                                                const std::vector<double>& Omega_grid) {
  if (!(c > 0.0)) throw ConfigError("top_relative_equilibria: c must be > 0");
  std::vector<TopEMValue> out;
  out.reserve(u3_grid.size() * Omega_grid.size());
  for (double u3 : u3_grid) {
    for (double Om : Omega_grid) {
      steady_precession_state(c, u3, Om);  // validates the grid point
      TopEMValue e;
      e.u3 = u3;
      e.Omega = Om;
      e.kappa = -c / Om;
      e.a = e.kappa - Om * u3;
      e.b = e.kappa * u3 - Om;
      e.h = 0.5 * (e.kappa * e.kappa + Om * Om) + 2.0 * c * u3;
      if (u3 == 1.0 && e.a != 0.0)
        e.cls = classify_spectrum(linearize_at_pa({c, 0.0, e.a})).cls;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace gyro
