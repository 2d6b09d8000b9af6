#include "gyro/linstab.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {
namespace {

using Mat2c = Eigen::Matrix2cd;

Mat4 rotation_generator() {
  Mat4 r = Mat4::Zero();
  r(0, 1) = -1.0;
  r(1, 0) = 1.0;
  r(2, 3) = -1.0;
  r(3, 2) = 1.0;
  return r;
}

// 2x2 complex matrix of an operator commuting with the S-rotation; block
// [[x, -y], [y, x]] acting on (z_{2i}, z_{2i+1}) becomes x + i y.
Mat2c complexify(const Mat4& m) {
  Mat2c c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c(i, j) = cplx(m(2 * i, 2 * j), m(2 * i + 1, 2 * j));
  return c;
}

void sort_spectrum(std::array<cplx, 4>& ev) {
  std::sort(ev.begin(), ev.end(), [](const cplx& x, const cplx& y) {
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return x.real() < y.real();
  });
}

int numerical_rank(const Eigen::MatrixXd& m, double rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double thr = rel * std::max(1.0, s[0]);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++r;
  return r;
}

Eigen::VectorXd vec(const Mat4& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), 16);
}

}  // namespace

const Mat4& symplectic_j() {
  static const Mat4 j = [] {
    Mat4 m = Mat4::Zero();
    m.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
    return m;
  }();
  return j;
}

FloquetMatrix::FloquetMatrix(const Mat4& m, double tol) : m_(m) {
  if (!m.allFinite()) throw StructuralError("Floquet matrix has non-finite entries");
  const double d = symmetry_defect();
  if (!(d < tol * std::max(1.0, m.norm()))) {
    std::ostringstream os;
    os << "matrix is not infinitesimally symplectic: ||JM - (JM)^T|| = " << d;
    throw StructuralError(os.str());
  }
}

double FloquetMatrix::symmetry_defect() const {
  const Mat4 jm = symplectic_j() * m_;
  return (jm - jm.transpose()).norm();
}

std::string_view to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::HyperbolicQuartet: return "HyperbolicQuartet";
    case SpectrumClass::Resonant11: return "Resonant11";
    case SpectrumClass::EllipticPairs: return "EllipticPairs";
    case SpectrumClass::Degenerate: return "Degenerate";
  }
  return "?";
}

void UnfoldingParams::validate() const {
  if (!(lambda0 > 0.0)) throw ConfigError("unfolding: lambda0 must be > 0");
  if (!(lambda0 + mu1 > 0.0)) throw ConfigError("unfolding: lambda0 + mu1 must be > 0");
  if (!std::isfinite(mu2)) throw ConfigError("unfolding: mu2 must be finite");
}

Mat4 tangent_jacobian_at_pa(const TopParams& p) {
  p.validate();
  const double a = p.a, c = p.c;
  Mat4 m;
  m << 0.0, a, 0.0, -1.0,
      -a, 0.0, 1.0, 0.0,
      0.0, c, 0.0, 0.0,
      -c, 0.0, 0.0, 0.0;
  return m;
}

Mat4 darboux_frame_at_pa(double a) {
  const double h = 0.5 * a;
  Mat4 t;
  t << 1.0, 0.0, 0.0, 0.0,
      0.0, -1.0, 0.0, 0.0,
      0.0, h, 0.0, -1.0,
      h, 0.0, -1.0, 0.0;
  return t;
}

FloquetMatrix linearize_at_pa(const TopParams& p) {
  const Mat4 jac = tangent_jacobian_at_pa(p);
  const double h = 0.5 * p.a;
  Mat4 tinv;  // inverse of darboux_frame_at_pa, written out
  tinv << 1.0, 0.0, 0.0, 0.0,
      0.0, -1.0, 0.0, 0.0,
      h, 0.0, 0.0, -1.0,
      0.0, -h, -1.0, 0.0;
  return FloquetMatrix(darboux_frame_at_pa(p.a) * jac * tinv);
}

FloquetMatrix versal_unfolding(const UnfoldingParams& p) {
  p.validate();
  const double l = p.lambda0 + p.mu1, m2 = p.mu2;
  Mat4 m;
  m << 0.0, -l, 1.0, 0.0,
      l, 0.0, 0.0, 1.0,
      -m2, 0.0, 0.0, -l,
      0.0, -m2, l, 0.0;
  return FloquetMatrix(m);
}

bool commutes_with_rotation(const Mat4& m, double rel_tol) {
  const Mat4 r = rotation_generator();
  return (r * m - m * r).norm() <= rel_tol * std::max(1.0, m.norm());
}

std::array<cplx, 4> eigenvalues(const Mat4& m) {
  std::array<cplx, 4> ev;
  if (commutes_with_rotation(m)) {
    const Mat2c c = complexify(m);
    const cplx half_tr = 0.5 * (c(0, 0) + c(1, 1));
    const cplx half_diff = 0.5 * (c(0, 0) - c(1, 1));
    const cplx root = std::sqrt(half_diff * half_diff + c(0, 1) * c(1, 0));
    ev = {half_tr + root, half_tr - root, std::conj(half_tr + root),
          std::conj(half_tr - root)};
  } else {
    Eigen::EigenSolver<Mat4> es(m, false);
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];
  }
  sort_spectrum(ev);
  return ev;
}

SpectrumReport classify_spectrum(const FloquetMatrix& fm, double tol) {
  const Mat4& m = fm.entries();
  SpectrumReport rep;
  rep.eigenvalues = eigenvalues(m);
  rep.determinant = m.determinant();
  const auto& ev = rep.eigenvalues;

  auto sq = [](double x) { return x * x; };
  for (const auto& l : ev) {
    if (std::norm(l) <= tol) {
      rep.cls = SpectrumClass::Degenerate;
      return rep;
    }
  }
  const bool all_imag = std::all_of(ev.begin(), ev.end(),
                                    [&](const cplx& l) { return sq(l.real()) <= tol; });
  const bool none_imag = std::all_of(ev.begin(), ev.end(),
                                     [&](const cplx& l) { return sq(l.real()) > tol; });

  if (all_imag) {
    std::vector<double> pos;
    for (const auto& l : ev)
      if (l.imag() > 0.0) pos.push_back(l.imag());
    if (pos.size() != 2) {
      rep.cls = SpectrumClass::Degenerate;
      return rep;
    }
    std::sort(pos.begin(), pos.end());
    rep.normal_frequencies = pos;
    if (sq(pos[1] - pos[0]) / 4.0 > tol) {
      rep.cls = SpectrumClass::EllipticPairs;
      return rep;
    }
    // Double pair: nilpotent part present iff (M - lI)(M - conj(l)I) != 0.
    const double w = 0.5 * (pos[0] + pos[1]);
    const Mat4 r = m * m + w * w * Mat4::Identity();
    Eigen::JacobiSVD<Mat4> svd(r);
    const double thr = 1e-8 * m.norm();
    int rank = 0;
    for (int i = 0; i < 4; ++i)
      if (svd.singularValues()[i] > thr) ++rank;
    rep.nilpotent = rank > 0;
    rep.cls = rep.nilpotent ? SpectrumClass::Resonant11 : SpectrumClass::Degenerate;
    return rep;
  }

  if (none_imag) {
    // Quartet {l, -l, conj l, -conj l} with l off both axes.
    const bool off_real_axis = std::all_of(
        ev.begin(), ev.end(), [&](const cplx& l) { return sq(l.imag()) > tol; });
    if (off_real_axis) {
      const cplx l = ev[3];
      const std::array<cplx, 4> expect{l, -l, std::conj(l), -std::conj(l)};
      bool ok = true;
      for (const auto& e : expect) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& x : ev) best = std::min(best, std::norm(x - e));
        ok = ok && best <= tol;
      }
      if (ok) {
        rep.cls = SpectrumClass::HyperbolicQuartet;
        return rep;
      }
    }
  }
  rep.cls = SpectrumClass::Degenerate;
  return rep;
}

double stabilization_threshold(double c, std::array<double, 2> bracket, double tol) {
  if (!(c > 0.0)) throw ConfigError("stabilization_threshold: c must be > 0");
  if (!(tol > 0.0)) throw ConfigError("stabilization_threshold: tol must be > 0");
  double lo = std::min(bracket[0], bracket[1]);
  double hi = std::max(bracket[0], bracket[1]);
  auto cls = [&](double a) {
    return classify_spectrum(linearize_at_pa({c, 0.0, a})).cls;
  };
  const auto cl = cls(lo), ch = cls(hi);
  const bool flips =
      (cl == SpectrumClass::HyperbolicQuartet && ch == SpectrumClass::EllipticPairs) ||
      (cl == SpectrumClass::EllipticPairs && ch == SpectrumClass::HyperbolicQuartet);
  if (!flips) {
    std::ostringstream os;
    os << "stabilization_threshold: no hyperbolic/elliptic transition in [" << lo
       << ", " << hi << "] (" << to_string(cl) << " -> " << to_string(ch) << ")";
    throw BracketError(os.str());
  }
  auto disc = [&](double a) { return a * a - 4.0 * c; };
  double flo = disc(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = disc(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

UnfoldingParams top_to_unfolding(double a, double c) {
  if (!(a > 0.0)) throw ConfigError("top_to_unfolding: a must be > 0");
  return {0.5 * a, 0.0, 0.25 * a * a - c};
}

// ---------------------------------------------------------------------------

NondegeneracyReport nondegeneracy_check(const FrequencyMap& omega,
                                        const MatrixFamily& Omega,
                                        const Eigen::VectorXd& nu0,
                                        double probe_radius) {
  const Eigen::Index p = nu0.size();
  const Eigen::VectorXd w0 = omega(nu0);
  const Eigen::Index m = w0.size();
  if (p < m + 2) {
    std::ostringstream os;
    os << "nondegeneracy_check: need at least m + 2 = " << m + 2
       << " parameters, got " << p;
    throw DimensionError(os.str());
  }
  const Mat4 om0 = Omega(nu0);
  const double h = probe_radius;

  Eigen::MatrixXd dw(m, p);
  Eigen::MatrixXd dom(16, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd np = nu0, nm = nu0;
    np[j] += h;
    nm[j] -= h;
    dw.col(j) = (omega(np) - omega(nm)) / (2.0 * h);
    dom.col(j) = (vec(Omega(np)) - vec(Omega(nm))) / (2.0 * h);
  }

  // sp(4) = J * Sym(4); tangent of the similarity orbit = [X, Omega0].
  Eigen::MatrixXd sp(16, 10), tangent(16, 10);
  int k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j, ++k) {
      Mat4 s = Mat4::Zero();
      s(i, j) = 1.0;
      s(j, i) = 1.0;
      const Mat4 x = symplectic_j() * s;
      sp.col(k) = vec(x);
      tangent.col(k) = vec(x * om0 - om0 * x);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> tsvd(tangent, Eigen::ComputeThinU);
  const auto& ts = tsvd.singularValues();
  int rt = 0;
  for (Eigen::Index i = 0; i < ts.size(); ++i)
    if (ts[i] > 1e-8 * std::max(1.0, ts[0])) ++rt;
  const Eigen::MatrixXd ut = tsvd.matrixU().leftCols(rt);

  const Eigen::MatrixXd spq = Eigen::HouseholderQR<Eigen::MatrixXd>(sp)
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(16, 10);
  const Eigen::MatrixXd resid = spq - ut * (ut.transpose() * spq);
  Eigen::JacobiSVD<Eigen::MatrixXd> csvd(resid, Eigen::ComputeThinU);
  const auto& cs = csvd.singularValues();
  int d = 0;
  for (Eigen::Index i = 0; i < cs.size(); ++i)
    if (cs[i] > 1e-8) ++d;
  const Eigen::MatrixXd comp = csvd.matrixU().leftCols(d);

  Eigen::MatrixXd combined(m + d, p);
  combined.topRows(m) = dw;
  combined.bottomRows(d) = comp.transpose() * dom;

  NondegeneracyReport rep;
  rep.rank_domega = numerical_rank(dw, 1e-8);
  rep.orbit_codim = d;
  rep.rank_combined = numerical_rank(combined, 1e-8);
  rep.submersive = rep.rank_domega == m;
  rep.versal = rep.rank_combined == m + d;
  rep.det_omega = om0.determinant();
  return rep;
}

double holder_exponent_estimate(const MatrixFamily& family,
                                const Eigen::VectorXd& nu0,
                                const Eigen::VectorXd& direction,
                                const std::vector<double>& radii) {
  if (radii.size() < 4)
    throw ConfigError("holder_exponent_estimate: need at least 4 radii");
  const auto [rmin, rmax] = std::minmax_element(radii.begin(), radii.end());
  if (!(*rmin > 0.0) || *rmax / *rmin < 100.0)
    throw ConfigError("holder_exponent_estimate: radii must be > 0 and span 2 decades");
  if (direction.norm() == 0.0)
    throw ConfigError("holder_exponent_estimate: zero direction");
  const Eigen::VectorXd dir = direction.normalized();
  const auto ref = eigenvalues(family(nu0));

  auto im_distance = [&](const std::array<cplx, 4>& ev) {
    double worst = 0.0;
    for (const auto& lt : ev) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& l : ref) best = std::min(best, std::abs(l.imag() - lt.imag()));
      worst = std::max(worst, best);
    }
    return worst;
  };

  std::vector<double> lx, ly;
  int zeros = 0;
  for (double r : radii) {
    const double d = std::max(im_distance(eigenvalues(family(nu0 + r * dir))),
                              im_distance(eigenvalues(family(nu0 - r * dir))));
    if (d == 0.0) {
      ++zeros;
      continue;
    }
    lx.push_back(std::log(r));
    ly.push_back(std::log(d));
  }
  if (zeros == static_cast<int>(radii.size()))
    return std::numeric_limits<double>::infinity();
  if (zeros > 0 || lx.size() < 2)
    throw EstimationError("holder_exponent_estimate: spectral distances vanish at some radii");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw EstimationError("holder_exponent_estimate: degenerate fit");
  return (n * sxy - sx * sy) / den;
}

}  // namespace gyro
