#pragma once

// Reduced Lagrange top on R_a = {u.u = 1, u.v = a} and its coupling to a
// bank of linear oscillators.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <string>
#include <vector>

namespace gyro {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;

inline constexpr double kDefaultConstraintTol = 1e-10;

struct TopParams {
  double c = 1.0;    // gravity coefficient, > 0
  double rho = 0.0;  // constant-term coefficient
  double a = 0.0;    // angular momentum about the figure axis

  void validate() const;
};

struct ReducedTopState {
  Vec3 u = Vec3::UnitZ();
  Vec3 v = Vec3::Zero();
};

/// Time derivative of a ReducedTopState.
struct TopTangent {
  Vec3 du = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
};

/// Throws InvalidStateError when |u.u - 1| or |u.v - a| exceeds tol.
void check_constraints(const ReducedTopState& s, double a,
                       double tol = kDefaultConstraintTol);

/// The equilibrium P_a = (e3, a e3).
ReducedTopState vertical_equilibrium(double a);

double reduced_hamiltonian(const ReducedTopState& s, const TopParams& p,
                           double tol = kDefaultConstraintTol);

/// u' = u x v, v' = c u x e3.
TopTangent reduced_vector_field(const ReducedTopState& s, const TopParams& p,
                                double tol = kDefaultConstraintTol);

/// Normalizes u and shifts v along u so that u.v = a. Identity (bitwise) on
/// states that already satisfy both constraints to a few ulps.
ReducedTopState project_to_constraints(const Vec3& u, const Vec3& v, double a);

namespace detail {
// Unchecked kernels used by the integrators at off-manifold stage points.
inline TopTangent top_field(const Vec3& u, const Vec3& v, double c) {
  return {u.cross(v), c * Vec3(u.y(), -u.x(), 0.0)};
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Top coupled to n oscillators: H_eps = H_a + <omega, y> + eps F(u, x).

/// Catalog coupling F(u, x) = (n . u) * sum_i w_i cos(x_i).
///
///   "cos_sum"  : n = e3 (vertical spring on a vibrating table)
///   "tilt_cos" : n = e1 (breaks the rotational symmetry about e3)
///
/// Weights default to 1 for every oscillator.
struct Coupling {
  std::string id = "cos_sum";
  std::vector<double> params;  // optional per-oscillator weights

  static const std::vector<std::string>& catalog();
};

struct CoupledConfig {
  VecX omega_osc = VecX::Ones(1);
  double epsilon = 0.0;
  Coupling coupling;

  Eigen::Index n() const { return omega_osc.size(); }
  void validate() const;
};

struct CoupledState {
  ReducedTopState top;
  VecX x = VecX::Zero(1);  // angles in [0, 2 pi)
  VecX y = VecX::Zero(1);
};

struct CoupledTangent {
  TopTangent top;
  VecX dx;
  VecX dy;
};

/// Resolved form of a catalog coupling, cheap to evaluate repeatedly.
class CouplingFunction {
 public:
  CouplingFunction(const Coupling& c, Eigen::Index n);

  double value(const Vec3& u, const VecX& x) const;
  /// Gradient with respect to u (x held fixed).
  Vec3 grad_u(const Vec3& u, const VecX& x) const;
  /// Gradient with respect to x.
  VecX grad_x(const Vec3& u, const VecX& x) const;
  /// sum_i |w_i| cos(x_i) prefactor multiplying (n . u).
  double angular_factor(const VecX& x) const;

  const Vec3& direction() const { return dir_; }
  const VecX& weights() const { return w_; }
  double sup_abs() const;                 // sup |F|
  double sup_abs_grad_x(Eigen::Index i) const;  // sup |dF/dx_i|

 private:
  Vec3 dir_;
  VecX w_;
};

double coupled_hamiltonian(const CoupledState& s, const TopParams& p,
                           const CoupledConfig& cfg,
                           double tol = kDefaultConstraintTol);

CoupledTangent coupled_vector_field(const CoupledState& s, const TopParams& p,
                                    const CoupledConfig& cfg,
                                    double tol = kDefaultConstraintTol);

/// Reduces every angle into [0, 2 pi).
VecX wrap_angles(const VecX& x);

}  // namespace gyro
