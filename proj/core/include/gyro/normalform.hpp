#pragma once

// Quadratic invariants of the 1:-1 resonance, S1 averaging, and the
// degree-4 normalization of a two-degree-of-freedom Hamiltonian to
//   G = (lambda0 + mu1) S + N + mu2 M + 2b M^2 + 2c1 S M + c2 S^2.

#include <Eigen/Core>
#include <string_view>
#include <utility>

#include "gyro/linstab.hpp"
#include "gyro/polynomial.hpp"

namespace gyro {

struct QuadraticInvariants {
  double S = 0.0;
  double M = 0.0;
  double N = 0.0;
  double Z = 0.0;  // z1 z3 + z2 z4, with Z^2 + S^2 = 4 M N
};

QuadraticInvariants invariants(const Vec4& z);

PolyHamiltonian poly_S();  // z1 z4 - z2 z3
PolyHamiltonian poly_M();  // (z1^2 + z2^2) / 2
PolyHamiltonian poly_N();  // (z3^2 + z4^2) / 2
PolyHamiltonian poly_Z();  // z1 z3 + z2 z4

/// Time-t map of the S-flow: rotation by t in (z1,z2) and in (z3,z4).
Eigen::Matrix4d s1_rotation(double t);

/// Average of H over the S1-action (exact trapezoidal quadrature).
PolyHamiltonian s1_average(const PolyHamiltonian& h);

struct NormalFormCoefficients {
  double lambda0 = 1.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  Eigen::VectorXd omega;  // carried through, may be empty

  double lambda() const { return lambda0 + mu1; }
  bool supercritical() const { return b > 0.0; }
};

/// z-part of the integrable truncation as a polynomial.
PolyHamiltonian gint_polynomial(const NormalFormCoefficients& c);

/// Quadratic Hamiltonian lambda S + N + mu2 M generating versal_unfolding(p).
PolyHamiltonian unfolding_hamiltonian(const UnfoldingParams& p);

/// exp(L_g) h = h o phi^g_1 with L_g h = {h, g}, truncated at degree dmax.
PolyHamiltonian lie_transform(const PolyHamiltonian& h, const PolyHamiltonian& g,
                              int dmax = PolyHamiltonian::kMaxDegree);

struct NormalizationResult {
  NormalFormCoefficients coeffs;
  // The normalizing map is Phi = phi^{g3}_1 o phi^{g4}_1, i.e.
  // H o Phi = exp(L_{g4}) exp(L_{g3}) H.
  PolyHamiltonian g3;
  PolyHamiltonian g4;
  PolyHamiltonian normalized;  // H o Phi truncated at degree 6
  double min_divisor = 0.0;    // smallest singular value met in the solves
};

/// Normalizes H through degree 4. The quadratic part of H must be the
/// Hamiltonian of versal_unfolding(p). Only order == 4 is supported.
NormalizationResult birkhoff_normalize(const PolyHamiltonian& h, const UnfoldingParams& p,
                                       int order = 4, double divisor_tol = 1e-10);

enum class Criticality { Supercritical, Subcritical, Degenerate };
std::string_view to_string(Criticality c);

Criticality supercriticality_test(const NormalFormCoefficients& c, double tol = 1e-12);

/// <omega, y> + G(z). y must have the size of c.omega.
double evaluate_gint(const Eigen::VectorXd& y, const Vec4& z,
                     const NormalFormCoefficients& c);

/// Time-t flow of z' = J grad g by classical RK4, together with its Jacobian.
std::pair<Vec4, Eigen::Matrix4d> hamiltonian_flow(const PolyHamiltonian& g, const Vec4& z,
                                                  double t = 1.0, int steps = 200);

/// Phi(z) = phi^{g3}_1(phi^{g4}_1(z)) and its Jacobian.
std::pair<Vec4, Eigen::Matrix4d> normalizing_map(const NormalizationResult& r,
                                                 const Vec4& z, int steps = 200);

}  // namespace gyro
