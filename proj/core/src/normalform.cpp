#include "gyro/normalform.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd restrict_to_degree(const PolyHamiltonian& p, int d) {
  const auto& idx = indices_of_degree(d);
  VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) v[k] = p[idx[k]];
  return v;
}

PolyHamiltonian from_degree_vector(const VectorXd& v, int d) {
  const auto& idx = indices_of_degree(d);
  PolyHamiltonian p;
  for (std::size_t k = 0; k < idx.size(); ++k) p[idx[k]] = v[k];
  return p;
}

// Matrix of g -> {h2, g} on homogeneous polynomials of degree d.
MatrixXd adjoint_matrix(const PolyHamiltonian& h2, int d) {
  const auto& idx = indices_of_degree(d);
  const auto n = static_cast<Eigen::Index>(idx.size());
  MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    PolyHamiltonian m;
    m[idx[j]] = 1.0;
    a.col(j) = restrict_to_degree(poisson_bracket(h2, m), d);
  }
  return a;
}

}  // namespace

QuadraticInvariants invariants(const Vec4& z) {
  QuadraticInvariants q;
  q.S = z[0] * z[3] - z[1] * z[2];
  q.M = 0.5 * (z[0] * z[0] + z[1] * z[1]);
  q.N = 0.5 * (z[2] * z[2] + z[3] * z[3]);
  q.Z = z[0] * z[2] + z[1] * z[3];
  return q;
}

PolyHamiltonian poly_S() {
  return PolyHamiltonian::monomial({1, 0, 0, 1}) - PolyHamiltonian::monomial({0, 1, 1, 0});
}
PolyHamiltonian poly_M() {
  return PolyHamiltonian::monomial({2, 0, 0, 0}, 0.5) +
         PolyHamiltonian::monomial({0, 2, 0, 0}, 0.5);
}
PolyHamiltonian poly_N() {
  return PolyHamiltonian::monomial({0, 0, 2, 0}, 0.5) +
         PolyHamiltonian::monomial({0, 0, 0, 2}, 0.5);
}
PolyHamiltonian poly_Z() {
  return PolyHamiltonian::monomial({1, 0, 1, 0}) + PolyHamiltonian::monomial({0, 1, 0, 1});
}

Eigen::Matrix4d s1_rotation(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  r.block<2, 2>(2, 2) = r.block<2, 2>(0, 0);
  return r;
}

PolyHamiltonian s1_average(const PolyHamiltonian& h) {
  // h o phi_t is a trigonometric polynomial of degree <= deg h in t, so the
  // trapezoidal rule with deg h + 1 nodes integrates it exactly.
  const int d = h.degree();
  if (d <= 0) return h;
  const int n = d + 1;
  PolyHamiltonian acc;
  for (int j = 0; j < n; ++j)
    acc += h.compose_linear(s1_rotation(2.0 * std::numbers::pi * j / n));
  acc *= 1.0 / n;
  // odd degrees average to zero exactly; drop rounding debris
  for (int k = 1; k <= PolyHamiltonian::kMaxDegree; k += 2)
    for (int i : indices_of_degree(k)) acc[i] = 0.0;
  return acc;
}

PolyHamiltonian gint_polynomial(const NormalFormCoefficients& c) {
  const PolyHamiltonian s = poly_S(), m = poly_M(), n = poly_N();
  return c.lambda() * s + n + c.mu2 * m + (2.0 * c.b) * (m * m) + (2.0 * c.c1) * (s * m) +
         c.c2 * (s * s);
}

PolyHamiltonian unfolding_hamiltonian(const UnfoldingParams& p) {
  p.validate();
  return (p.lambda0 + p.mu1) * poly_S() + poly_N() + p.mu2 * poly_M();
}

PolyHamiltonian lie_transform(const PolyHamiltonian& h, const PolyHamiltonian& g, int dmax) {
  PolyHamiltonian result = h.truncated(dmax);
  PolyHamiltonian term = result;
  for (int k = 1; k <= 60; ++k) {
    term = poisson_bracket_truncated(term, g, dmax);
    term *= 1.0 / k;
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

NormalizationResult birkhoff_normalize(const PolyHamiltonian& h, const UnfoldingParams& p,
                                       int order, double divisor_tol) {
  if (order != 4) throw UnsupportedCaseError("birkhoff_normalize: only order 4 is supported");
  const PolyHamiltonian h2 = unfolding_hamiltonian(p);
  if (!h.homogeneous(1).is_zero())
    throw StructuralError("birkhoff_normalize: Hamiltonian has linear terms");
  const double qdiff = (h.homogeneous(2) - h2).max_abs();
  if (qdiff > 1e-10 * std::max(1.0, h2.max_abs())) {
    std::ostringstream os;
    os << "birkhoff_normalize: quadratic part differs from the unfolding Hamiltonian by "
       << qdiff;
    throw StructuralError(os.str());
  }

  NormalizationResult r;
  r.coeffs.lambda0 = p.lambda0;
  r.coeffs.mu1 = p.mu1;
  r.coeffs.mu2 = p.mu2;

  // Degree 3: no S1-invariant cubics exist, so {h2, g3} = -H3 is solved outright.
  const MatrixXd a3 = adjoint_matrix(h2, 3);
  Eigen::JacobiSVD<MatrixXd> svd3(a3, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd3.singularValues();
  r.min_divisor = sv[sv.size() - 1];
  if (r.min_divisor <= divisor_tol * std::max(1.0, sv[0])) {
    std::ostringstream os;
    os << "birkhoff_normalize: near-resonant cubic homological equation (sigma_min = "
       << r.min_divisor << ")";
    throw SmallDivisorError(os.str());
  }
  const VectorXd rhs3 = -restrict_to_degree(h, 3);
  r.g3 = from_degree_vector(svd3.solve(rhs3), 3);
  const PolyHamiltonian k = lie_transform(h, r.g3);

  // Degree 4: {h2, g4} - 2b M^2 - 2c1 S M - c2 S^2 = -K4, least squares with
  // minimum norm; the three normal-form directions complement the image.
  const PolyHamiltonian s = poly_S(), m = poly_M();
  const MatrixXd a4 = adjoint_matrix(h2, 4);
  const auto n4 = a4.rows();
  MatrixXd b(n4, n4 + 3);
  b.leftCols(n4) = a4;
  b.col(n4) = -2.0 * restrict_to_degree(m * m, 4);
  b.col(n4 + 1) = -2.0 * restrict_to_degree(s * m, 4);
  b.col(n4 + 2) = -restrict_to_degree(s * s, 4);
  const VectorXd rhs4 = -restrict_to_degree(k, 4);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(b);
  cod.setThreshold(1e-12);
  const VectorXd x = cod.solve(rhs4);
  const double resid = (b * x - rhs4).norm();
  if (!(resid <= 1e-9 * std::max(1.0, rhs4.norm()))) {
    std::ostringstream os;
    os << "birkhoff_normalize: quartic terms not reducible to the normal form (residual "
       << resid << ")";
    throw SmallDivisorError(os.str());
  }
  r.g4 = from_degree_vector(x.head(n4), 4);
  r.coeffs.b = x[n4];
  r.coeffs.c1 = x[n4 + 1];
  r.coeffs.c2 = x[n4 + 2];
  r.normalized = lie_transform(k, r.g4);
  return r;
}

std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::Supercritical: return "Supercritical";
    case Criticality::Subcritical: return "Subcritical";
    case Criticality::Degenerate: return "Degenerate";
  }
  return "?";
}

Criticality supercriticality_test(const NormalFormCoefficients& c, double tol) {
  if (c.b > tol) return Criticality::Supercritical;
  if (c.b < -tol) return Criticality::Subcritical;
  return Criticality::Degenerate;
}

double evaluate_gint(const Eigen::VectorXd& y, const Vec4& z, const NormalFormCoefficients& c) {
  if (y.size() != c.omega.size()) throw DimensionError("evaluate_gint: y and omega differ in size");
  const QuadraticInvariants q = invariants(z);
  double v = c.lambda() * q.S + q.N + c.mu2 * q.M + 2.0 * c.b * q.M * q.M +
             2.0 * c.c1 * q.S * q.M + c.c2 * q.S * q.S;
  if (y.size() > 0) v += c.omega.dot(y);
  return v;
}

std::pair<Vec4, Eigen::Matrix4d> hamiltonian_flow(const PolyHamiltonian& g, const Vec4& z,
                                                  double t, int steps) {
  if (steps < 1) throw ConfigError("hamiltonian_flow: steps must be >= 1");
  std::array<PolyHamiltonian, 4> dg;
  std::array<std::array<PolyHamiltonian, 4>, 4> d2g;
  for (int i = 0; i < 4; ++i) dg[i] = g.derivative(i);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) d2g[i][j] = d2g[j][i] = dg[i].derivative(j);
  const Mat4& J = symplectic_j();

  auto field = [&](const Vec4& x, const Eigen::Matrix4d& phi, Vec4& dx, Eigen::Matrix4d& dphi) {
    Vec4 grad;
    Eigen::Matrix4d hess;
    for (int i = 0; i < 4; ++i) grad[i] = dg[i].evaluate(x);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) hess(i, j) = hess(j, i) = d2g[i][j].evaluate(x);
    dx = J * grad;
    dphi = J * hess * phi;
  };

  Vec4 x = z;
  Eigen::Matrix4d phi = Eigen::Matrix4d::Identity();
  const double h = t / steps;
  for (int n = 0; n < steps; ++n) {
    Vec4 k1, k2, k3, k4;
    Eigen::Matrix4d p1, p2, p3, p4;
    field(x, phi, k1, p1);
    field(x + 0.5 * h * k1, phi + 0.5 * h * p1, k2, p2);
    field(x + 0.5 * h * k2, phi + 0.5 * h * p2, k3, p3);
    field(x + h * k3, phi + h * p3, k4, p4);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    phi += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
  }
  return {x, phi};
}

std::pair<Vec4, Eigen::Matrix4d> normalizing_map(const NormalizationResult& r, const Vec4& z,
                                                 int steps) {
  const auto [z4, j4] = hamiltonian_flow(r.g4, z, 1.0, steps);
  const auto [z3, j3] = hamiltonian_flow(r.g3, z4, 1.0, steps);
  return {z3, j3 * j4};
}

}  // namespace gyro
