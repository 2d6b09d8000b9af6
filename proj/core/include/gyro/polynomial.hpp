#pragma once

// Dense real polynomials in z1..z4 of total degree <= 6 with the canonical
// Poisson bracket {f, g} = f_1 g_3 - f_3 g_1 + f_2 g_4 - f_4 g_2.

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace gyro {

using Vec4 = Eigen::Vector4d;
using Exponent = std::array<int, 4>;

class PolyHamiltonian {
 public:
  static constexpr int kMaxDegree = 6;
  static constexpr int kSize = 210;  // monomials of degree <= 6 in 4 variables

  PolyHamiltonian();

  static PolyHamiltonian constant(double c);
  static PolyHamiltonian variable(int i);  // z_{i+1}, i in 0..3
  static PolyHamiltonian monomial(const Exponent& e, double c = 1.0);

  // Monomial table, graded by total degree.
  static const Exponent& exponent(int idx);
  static int index_of(const Exponent& e);  // -1 when degree > kMaxDegree
  static int degree_of(int idx);

  double coeff(const Exponent& e) const;
  double operator[](int idx) const { return c_[idx]; }
  double& operator[](int idx) { return c_[idx]; }
  /// Adds c * z^e; CapacityError when the degree exceeds kMaxDegree and c != 0.
  void add_term(const Exponent& e, double c);

  int degree() const;  // -1 for the zero polynomial
  double max_abs() const;
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  PolyHamiltonian homogeneous(int d) const;
  PolyHamiltonian truncated(int dmax) const;

  PolyHamiltonian& operator+=(const PolyHamiltonian& o);
  PolyHamiltonian& operator-=(const PolyHamiltonian& o);
  PolyHamiltonian& operator*=(double s);

  PolyHamiltonian derivative(int i) const;
  double evaluate(const Vec4& z) const;
  Vec4 gradient(const Vec4& z) const;

  /// z -> f(L z).
  PolyHamiltonian compose_linear(const Eigen::Matrix4d& L) const;

  std::string to_string(double drop_below = 0.0) const;

 private:
  std::array<double, kSize> c_;
};

PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b);
PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b);
PolyHamiltonian operator-(PolyHamiltonian a);
PolyHamiltonian operator*(double s, PolyHamiltonian a);
PolyHamiltonian operator*(PolyHamiltonian a, double s);

/// Product; CapacityError if a non-zero term would exceed degree 6.
PolyHamiltonian operator*(const PolyHamiltonian& a, const PolyHamiltonian& b);
/// Product with terms above dmax discarded.
PolyHamiltonian multiply_truncated(const PolyHamiltonian& a, const PolyHamiltonian& b,
                                   int dmax = PolyHamiltonian::kMaxDegree);

/// {f, g}; CapacityError on degree overflow.
PolyHamiltonian poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g);
PolyHamiltonian poisson_bracket_truncated(const PolyHamiltonian& f,
                                          const PolyHamiltonian& g,
                                          int dmax = PolyHamiltonian::kMaxDegree);

/// Number of monomials of exact degree d.
int monomials_of_degree(int d);
/// Indices of the monomials of exact degree d, in table order.
const std::vector<int>& indices_of_degree(int d);

}  // namespace gyro
