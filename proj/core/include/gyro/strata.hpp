#pragma once

// Critical values of the (S, G) map of the integrable truncation: the
// elliptic-torus cubic, the swallowtail surface, the thread, and the
// corresponding steady-precession surface of the top in (a, b, h).

#include <optional>
#include <string_view>
#include <vector>

#include "gyro/linstab.hpp"
#include "gyro/normalform.hpp"

namespace gyro {

enum class StratumLabel { Thread, SurfaceEven, OpenRegion, Outside };
std::string_view to_string(StratumLabel l);

struct StratumPoint {
  double mu2 = 0.0;
  double s = 0.0;
  double g = 0.0;
  double M = 0.0;  // reduced-space M of the relative equilibrium (surface points)
  StratumLabel label = StratumLabel::Outside;
};

struct TopEMValue {
  double u3 = 1.0;
  double Omega = 0.0;
  double kappa = 0.0;
  double a = 0.0;
  double b = 0.0;
  double h = 0.0;
  std::optional<SpectrumClass> cls;  // set for the vertical (u3 = 1) rows
};

/// Real S with S^2 - 4b M^3 - 4 mu2 M^2 - 4 c1 S M^2 = 0 (ascending, no duplicates).
std::vector<double> elliptic_family(double b, double c1, double mu2, double M);

/// Relative equilibria of G on {S = const}: Z = 0, N = S^2 / (4M), with S
/// solving the cubic of G (b -> 4b, c1 -> 2c1 in elliptic_family terms).
/// Rows ordered by grid index, then by S.
std::vector<StratumPoint> critical_surface(const NormalFormCoefficients& coeffs,
                                           const std::vector<double>& M_grid);

/// G at the reduced point (S, M, N).
double gint_reduced(const NormalFormCoefficients& c, double S, double M, double N);

/// Critical values g of G on the fiber {S = s} (sorted), and their M.
struct FiberCriticalValues {
  std::vector<double> M;
  std::vector<double> g;
  double g_min = 0.0;
};
FiberCriticalValues fiber_critical_values(const NormalFormCoefficients& c, double s);

/// Label of the value (s, g) of (S, G) at detuning mu2 (overrides coeffs.mu2).
StratumPoint classify_value(double mu2, double s, double g,
                            const NormalFormCoefficients& coeffs, double tol = 1e-9);

/// Steady precessions v = kappa u - Omega e3, kappa Omega = -c, with
/// u = (sqrt(1 - u3^2), 0, u3). Rows ordered u3-major.
std::vector<TopEMValue> top_relative_equilibria(double c, const std::vector<double>& u3_grid,
                                                const std::vector<double>& Omega_grid);

/// State on R_a for a steady precession.
ReducedTopState steady_precession_state(double c, double u3, double Omega);

}  // namespace gyro
