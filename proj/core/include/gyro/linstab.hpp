#pragma once

// Linear stability of the vertical rotation P_a: Floquet matrices in sp(4),
// the linear centralizer unfolding, spectrum classification through the
// 1:-1 collision, and the non-degeneracy / Hoelder diagnostics.

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "gyro/models.hpp"

namespace gyro {

using Mat4 = Eigen::Matrix4d;
using cplx = std::complex<double>;

/// Standard symplectic matrix [[0, I], [-I, 0]] for the form
/// dz1^dz3 + dz2^dz4, so that z' = J grad H.
const Mat4& symplectic_j();

/// 4x4 infinitesimally symplectic matrix (J * entries symmetric).
class FloquetMatrix {
 public:
  /// Throws StructuralError when ||J m - (J m)^T|| >= tol.
  explicit FloquetMatrix(const Mat4& m, double tol = 1e-12);

  const Mat4& entries() const { return m_; }
  double symmetry_defect() const;

 private:
  Mat4 m_;
};

enum class SpectrumClass { HyperbolicQuartet, Resonant11, EllipticPairs, Degenerate };

std::string_view to_string(SpectrumClass c);

struct SpectrumReport {
  std::array<cplx, 4> eigenvalues;       // sorted by (imag, real)
  SpectrumClass cls = SpectrumClass::Degenerate;
  std::vector<double> normal_frequencies;  // positive imaginary parts, ascending
  bool nilpotent = false;
  double determinant = 0.0;
};

struct UnfoldingParams {
  double lambda0 = 1.0;
  double mu1 = 0.0;
  double mu2 = 0.0;

  void validate() const;  // lambda0 > 0, lambda0 + mu1 > 0
};

inline constexpr double kDefaultSpectrumTol = 1e-9;

/// Jacobian of the reduced flow at P_a on the tangent plane, in the raw
/// coordinates (du1, du2, dv1, dv2). Not in Darboux form.
Mat4 tangent_jacobian_at_pa(const TopParams& p);

/// Linear symplectic frame taking (du1, du2, dv1, dv2) to Darboux
/// coordinates z in which the linearization is Hamiltonian w.r.t. J.
Mat4 darboux_frame_at_pa(double a);

/// Linearization at P_a expressed in the Darboux frame.
FloquetMatrix linearize_at_pa(const TopParams& p);

/// The linear centralizer unfolding Omega(mu) of the 1:-1 resonant matrix.
FloquetMatrix versal_unfolding(const UnfoldingParams& p);

/// Eigenvalues via the complexified 2x2 reduction when m commutes with the
/// S-rotation, otherwise via a general real eigensolver.
std::array<cplx, 4> eigenvalues(const Mat4& m);

/// True when m commutes with the simultaneous rotation of (z1,z2), (z3,z4).
bool commutes_with_rotation(const Mat4& m, double rel_tol = 1e-12);

SpectrumReport classify_spectrum(const FloquetMatrix& m,
                                 double tol = kDefaultSpectrumTol);

/// Critical spin a0 for given c, found by bisection on a^2 - 4c inside
/// `bracket` after confirming the classification changes across it.
double stabilization_threshold(double c, std::array<double, 2> bracket,
                               double tol = 1e-12);

/// (lambda0 + mu1, mu2) = (a/2, a^2/4 - c); mu1 is reported as 0.
UnfoldingParams top_to_unfolding(double a, double c);

// ---------------------------------------------------------------------------

using FrequencyMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixFamily = std::function<Mat4(const Eigen::VectorXd&)>;

struct NondegeneracyReport {
  bool submersive = false;
  bool versal = false;
  int rank_domega = 0;
  int orbit_codim = 0;        // dim sp(4) - dim orbit tangent
  int rank_combined = 0;
  double det_omega = 0.0;     // det Omega(nu0); invertibility is reported only
};

/// Conditions on (omega, Omega) at nu0 with central differences of step
/// probe_radius; ranks from singular values above 1e-8 relative.
NondegeneracyReport nondegeneracy_check(const FrequencyMap& omega,
                                        const MatrixFamily& Omega,
                                        const Eigen::VectorXd& nu0,
                                        double probe_radius = 1e-5);

/// Least-squares slope of log(max spectral Im-distance) against log(radius)
/// along +-direction from nu0. Returns +infinity when every distance is 0.
double holder_exponent_estimate(const MatrixFamily& family,
                                const Eigen::VectorXd& nu0,
                                const Eigen::VectorXd& direction,
                                const std::vector<double>& radii);

}  // namespace gyro
