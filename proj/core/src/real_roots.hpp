#pragma once

#include <unsupported/Eigen/Polynomials>
#include <algorithm>
#include <cmath>
#include <vector>

namespace gyro::detail {

// Real roots of sum_k coeffs[k] x^k (ascending order), Newton-polished and
// sorted. Leading zero coefficients are dropped.
inline std::vector<double> real_polynomial_roots(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  std::vector<double> out;
  if (coeffs.size() < 2) return out;
  Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(coeffs.data(), coeffs.size());
  if (c.size() == 2) {
    out.push_back(-c[0] / c[1]);
    return out;
  }
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(c);
  double scale = 0.0;
  for (double x : coeffs) scale = std::max(scale, std::abs(x));
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
    const auto r = solver.roots()[i];
    if (std::abs(r.imag()) > 1e-7 * std::max(1.0, std::abs(r))) continue;
    double x = r.real();
    for (int it = 0; it < 8; ++it) {
      double p = 0.0, dp = 0.0;
      for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
        dp = dp * x + p;
        p = p * x + c[k];
      }
      if (dp == 0.0) break;
      const double step = p / dp;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gyro::detail
