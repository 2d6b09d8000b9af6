#pragma once

// Rotation number of the (S, G) torus bundle of the integrable truncation,
// its continuation around the thread, and the Kolmogorov Hessian test.

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "gyro/normalform.hpp"

namespace gyro {

struct RotationData {
  double theta = 0.0;   // advance of arg(z1 + i z2) over one reduced period
  double period = 0.0;  // period of the reduced motion M(t)
  std::array<double, 3> roots{};  // r1 <= 0 <= r2 < r3 of Z^2 = P(M)
};

/// Requires (s, g) to be an OpenRegion value of (S, G) (StratumError
/// otherwise) and b > 0.
RotationData rotation_data(double s, double g, const NormalFormCoefficients& c,
                           double quad_tol = 1e-12);
double rotation_number(double s, double g, const NormalFormCoefficients& c);

struct LoopSpec {
  std::vector<std::array<double, 2>> vertices;  // closed polygon in the (s, g) plane
  int steps = 64;                               // nodes per traversal, by arc length
  int turns = 1;
  double margin = 1e-9;                         // classification tolerance for nodes

  void validate() const;
  std::vector<std::array<double, 2>> nodes() const;  // one closing node appended
};

/// Polygonal ellipse (s0 + rs cos t, g0 + rg sin t), counter-clockwise.
LoopSpec ellipse_loop(double s0, double g0, double rs, double rg, int vertices = 256,
                      int steps = 64, int turns = 1);

struct ContinuationNode {
  double s = 0.0;
  double g = 0.0;
  double theta_raw = 0.0;     // as computed by the quadrature
  double theta_branch = 0.0;  // continued branch
};

struct MonodromyResult {
  std::array<std::array<long, 2>, 2> matrix{{{1, 0}, {0, 1}}};
  long winding = 0;            // winding number of the loop around (s, g) = (0, 0)
  double theta_jump = 0.0;     // branch change over the loop, in radians
  std::vector<ContinuationNode> log;
  int refinements = 0;         // number of step halvings performed
};

/// Continues theta along the loop with nearest-branch tracking and step
/// halving whenever a node-to-node change exceeds pi/2. The matrix is
/// [[1, n], [0, 1]] in the basis (S-cycle, reduced-period cycle) with
/// n = jump / 2 pi.
MonodromyResult monodromy_around_thread(const LoopSpec& loop, const NormalFormCoefficients& c,
                                        unsigned workers = 1, int max_halvings = 12);

struct KolmogorovReport {
  double det = 0.0;
  Eigen::MatrixXd hessian;
  double condition = 0.0;          // rounding error estimate relative to |hessian|
  bool degenerate = false;         // |det| below tolerance
  bool precision_warning = false;  // condition above 1e-3
};

/// Central-difference Hessian in y at y0 with step h_fd.
KolmogorovReport kolmogorov_hessian(const std::function<double(const Eigen::VectorXd&)>& F,
                                    const Eigen::VectorXd& y0, double h_fd = 1e-4,
                                    double degenerate_tol = 1e-8);

}  // namespace gyro
