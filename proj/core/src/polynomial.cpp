#include "gyro/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {
namespace {

constexpr int kD = PolyHamiltonian::kMaxDegree;
constexpr int kBase = kD + 1;

int flat(const Exponent& e) {
  return ((e[0] * kBase + e[1]) * kBase + e[2]) * kBase + e[3];
}

struct Table {
  std::vector<Exponent> exps;
  std::vector<int> deg;
  std::array<int, kBase * kBase * kBase * kBase> lookup;
  std::array<std::vector<int>, kD + 1> by_degree;

  Table() {
    lookup.fill(-1);
    for (int d = 0; d <= kD; ++d) {
      // lexicographically descending within a degree: z1^d first
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c) {
            const Exponent e{a, b, c, d - a - b - c};
            lookup[flat(e)] = static_cast<int>(exps.size());
            by_degree[d].push_back(static_cast<int>(exps.size()));
            exps.push_back(e);
            deg.push_back(d);
          }
    }
  }
};

const Table& table() {
  static const Table t;
  return t;
}

template <bool Strict>
PolyHamiltonian multiply_impl(const PolyHamiltonian& a, const PolyHamiltonian& b, int dmax) {
  const Table& t = table();
  PolyHamiltonian r;
  std::vector<int> nb;
  for (int j = 0; j < PolyHamiltonian::kSize; ++j)
    if (b[j] != 0.0) nb.push_back(j);
  for (int i = 0; i < PolyHamiltonian::kSize; ++i) {
    if (a[i] == 0.0) continue;
    const Exponent& ei = t.exps[i];
    for (int j : nb) {
      const double c = a[i] * b[j];
      if (t.deg[i] + t.deg[j] > dmax) {
        if constexpr (Strict) {
          if (c != 0.0) throw CapacityError("polynomial product exceeds the degree bound");
        }
        continue;
      }
      const Exponent& ej = t.exps[j];
      const Exponent e{ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2], ei[3] + ej[3]};
      r[t.lookup[flat(e)]] += c;
    }
  }
  return r;
}

}  // namespace

PolyHamiltonian::PolyHamiltonian() { c_.fill(0.0); }

PolyHamiltonian PolyHamiltonian::constant(double c) {
  PolyHamiltonian p;
  p.c_[0] = c;
  return p;
}

PolyHamiltonian PolyHamiltonian::variable(int i) {
  if (i < 0 || i > 3) throw DimensionError("PolyHamiltonian::variable: index out of range");
  Exponent e{0, 0, 0, 0};
  e[i] = 1;
  return monomial(e);
}

PolyHamiltonian PolyHamiltonian::monomial(const Exponent& e, double c) {
  PolyHamiltonian p;
  p.add_term(e, c);
  return p;
}

const Exponent& PolyHamiltonian::exponent(int idx) { return table().exps.at(idx); }

int PolyHamiltonian::index_of(const Exponent& e) {
  for (int k : e)
    if (k < 0) return -1;
  if (e[0] + e[1] + e[2] + e[3] > kD) return -1;
  return table().lookup[flat(e)];
}

int PolyHamiltonian::degree_of(int idx) { return table().deg.at(idx); }

double PolyHamiltonian::coeff(const Exponent& e) const {
  const int i = index_of(e);
  return i < 0 ? 0.0 : c_[i];
}

void PolyHamiltonian::add_term(const Exponent& e, double c) {
  if (c == 0.0) return;
  const int i = index_of(e);
  if (i < 0) {
    for (int k : e)
      if (k < 0) throw DimensionError("negative exponent");
    throw CapacityError("monomial degree exceeds the bound of 6");
  }
  c_[i] += c;
}

int PolyHamiltonian::degree() const {
  for (int i = kSize - 1; i >= 0; --i)
    if (c_[i] != 0.0) return table().deg[i];
  return -1;
}

double PolyHamiltonian::max_abs() const {
  double m = 0.0;
  for (double x : c_) m = std::max(m, std::abs(x));
  return m;
}

PolyHamiltonian PolyHamiltonian::homogeneous(int d) const {
  PolyHamiltonian r;
  if (d < 0 || d > kD) return r;
  for (int i : table().by_degree[d]) r.c_[i] = c_[i];
  return r;
}

PolyHamiltonian PolyHamiltonian::truncated(int dmax) const {
  PolyHamiltonian r;
  for (int i = 0; i < kSize; ++i)
    if (table().deg[i] <= dmax) r.c_[i] = c_[i];
  return r;
}

PolyHamiltonian& PolyHamiltonian::operator+=(const PolyHamiltonian& o) {
  for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
  return *this;
}

PolyHamiltonian& PolyHamiltonian::operator-=(const PolyHamiltonian& o) {
  for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
  return *this;
}

PolyHamiltonian& PolyHamiltonian::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

PolyHamiltonian PolyHamiltonian::derivative(int v) const {
  if (v < 0 || v > 3) throw DimensionError("derivative: variable index out of range");
  const Table& t = table();
  PolyHamiltonian r;
  for (int i = 0; i < kSize; ++i) {
    if (c_[i] == 0.0 || t.exps[i][v] == 0) continue;
    Exponent e = t.exps[i];
    const int k = e[v]--;
    r.c_[t.lookup[flat(e)]] += k * c_[i];
  }
  return r;
}

double PolyHamiltonian::evaluate(const Vec4& z) const {
  std::array<std::array<double, kBase>, 4> pw;
  for (int v = 0; v < 4; ++v) {
    pw[v][0] = 1.0;
    for (int k = 1; k < kBase; ++k) pw[v][k] = pw[v][k - 1] * z[v];
  }
  const Table& t = table();
  double s = 0.0;
  for (int i = 0; i < kSize; ++i) {
    if (c_[i] == 0.0) continue;
    const Exponent& e = t.exps[i];
    s += c_[i] * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
  }
  return s;
}

Vec4 PolyHamiltonian::gradient(const Vec4& z) const {
  std::array<std::array<double, kBase>, 4> pw;
  for (int v = 0; v < 4; ++v) {
    pw[v][0] = 1.0;
    for (int k = 1; k < kBase; ++k) pw[v][k] = pw[v][k - 1] * z[v];
  }
  const Table& t = table();
  Vec4 g = Vec4::Zero();
  for (int i = 0; i < kSize; ++i) {
    if (c_[i] == 0.0) continue;
    const Exponent& e = t.exps[i];
    for (int v = 0; v < 4; ++v) {
      if (e[v] == 0) continue;
      double m = c_[i] * e[v];
      for (int w = 0; w < 4; ++w) m *= pw[w][w == v ? e[w] - 1 : e[w]];
      g[v] += m;
    }
  }
  return g;
}

PolyHamiltonian PolyHamiltonian::compose_linear(const Eigen::Matrix4d& L) const {
  // powers[v][k] = (row v of L . z)^k
  std::array<std::array<PolyHamiltonian, kBase>, 4> powers;
  const int dmax = std::max(degree(), 0);
  for (int v = 0; v < 4; ++v) {
    PolyHamiltonian lin;
    for (int w = 0; w < 4; ++w) lin += L(v, w) * variable(w);
    powers[v][0] = constant(1.0);
    for (int k = 1; k <= dmax; ++k) powers[v][k] = powers[v][k - 1] * lin;
  }
  const Table& t = table();
  PolyHamiltonian r;
  for (int i = 0; i < kSize; ++i) {
    if (c_[i] == 0.0) continue;
    const Exponent& e = t.exps[i];
    PolyHamiltonian term = powers[0][e[0]] * powers[1][e[1]];
    term = term * powers[2][e[2]];
    term = term * powers[3][e[3]];
    term *= c_[i];
    r += term;
  }
  return r;
}

std::string PolyHamiltonian::to_string(double drop_below) const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  const Table& t = table();
  for (int i = 0; i < kSize; ++i) {
    if (c_[i] == 0.0 || std::abs(c_[i]) <= drop_below) continue;
    if (!first) os << " + ";
    first = false;
    os << c_[i];
    for (int v = 0; v < 4; ++v) {
      const int k = t.exps[i][v];
      if (k == 0) continue;
      os << "*z" << v + 1;
      if (k > 1) os << "^" << k;
    }
  }
  if (first) os << "0";
  return os.str();
}

PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b) { return a += b; }
PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b) { return a -= b; }
PolyHamiltonian operator-(PolyHamiltonian a) { return a *= -1.0; }
PolyHamiltonian operator*(double s, PolyHamiltonian a) { return a *= s; }
PolyHamiltonian operator*(PolyHamiltonian a, double s) { return a *= s; }

PolyHamiltonian operator*(const PolyHamiltonian& a, const PolyHamiltonian& b) {
  return multiply_impl<true>(a, b, kD);
}

PolyHamiltonian multiply_truncated(const PolyHamiltonian& a, const PolyHamiltonian& b,
                                   int dmax) {
  return multiply_impl<false>(a, b, std::min(dmax, kD));
}

PolyHamiltonian poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g) {
  PolyHamiltonian r = f.derivative(0) * g.derivative(2);
  r -= f.derivative(2) * g.derivative(0);
  r += f.derivative(1) * g.derivative(3);
  r -= f.derivative(3) * g.derivative(1);
  return r;
}

PolyHamiltonian poisson_bracket_truncated(const PolyHamiltonian& f,
                                          const PolyHamiltonian& g, int dmax) {
  PolyHamiltonian r = multiply_truncated(f.derivative(0), g.derivative(2), dmax);
  r -= multiply_truncated(f.derivative(2), g.derivative(0), dmax);
  r += multiply_truncated(f.derivative(1), g.derivative(3), dmax);
  r -= multiply_truncated(f.derivative(3), g.derivative(1), dmax);
  return r;
}

int monomials_of_degree(int d) {
  if (d < 0) return 0;
  return (d + 1) * (d + 2) * (d + 3) / 6;
}

const std::vector<int>& indices_of_degree(int d) {
  static const std::vector<int> empty;
  if (d < 0 || d > kD) return empty;
  return table().by_degree[d];
}

}  // namespace gyro
