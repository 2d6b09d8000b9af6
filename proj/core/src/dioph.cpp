#include "gyro/dioph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/linstab.hpp"
#include "gyro/parallel.hpp"

namespace gyro {
namespace {

// All integer vectors of length n with |v|_1 <= bound, in lexicographic order.
void enumerate_l1_ball(int n, int bound, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int x = -bound; x <= bound; ++x) {
    cur.push_back(x);
    enumerate_l1_ball(n, bound - std::abs(x), cur, out);
    cur.pop_back();
  }
}

// Visits k != 0 with |k|_1 <= K and first non-zero entry positive.
template <class Fn>
void for_each_half_lattice(int m, int K, Fn&& fn) {
  std::vector<int> k(m, 0);
  auto rec = [&](auto&& self, int i, int budget, bool leading_zero) -> void {
    if (i == m) {
      if (!leading_zero) fn(k, K - budget);
      return;
    }
    const int lo = leading_zero ? 0 : -budget;
    for (int x = lo; x <= budget; ++x) {
      k[i] = x;
      self(self, i + 1, budget - std::abs(x), leading_zero && x == 0);
    }
    k[i] = 0;
  };
  rec(rec, 0, K, true);
}

}  // namespace

void FrequencyData::validate() const {
  if (omega.size() < 1) throw ConfigError("FrequencyData: omega must be non-empty");
  if (!omega.allFinite() || !omegaN.allFinite())
    throw ConfigError("FrequencyData: frequencies must be finite");
  for (Eigen::Index i = 1; i < omegaN.size(); ++i)
    if (omegaN[i] < omegaN[i - 1]) throw ConfigError("FrequencyData: omegaN must be ascending");
}

void DiophParams::validate(int m) const {
  if (!(tau > m - 1)) {
    std::ostringstream os;
    os << "DiophParams: tau must exceed m - 1 = " << m - 1;
    throw ConfigError(os.str());
  }
  if (!(gamma > 0.0)) throw ConfigError("DiophParams: gamma must be > 0");
  if (K < 1) throw ConfigError("DiophParams: K must be >= 1");
}

DiophReport diophantine_check(const FrequencyData& f, const DiophParams& p) {
  f.validate();
  const int m = static_cast<int>(f.omega.size());
  p.validate(m);
  const int r = static_cast<int>(f.omegaN.size());

  std::vector<std::vector<int>> ls;
  std::vector<int> cur;
  enumerate_l1_ball(r, r > 0 ? 2 : 0, cur, ls);
  // l = 0 first so that ties report the internal resonance
  std::stable_partition(ls.begin(), ls.end(), [](const std::vector<int>& l) {
    return std::all_of(l.begin(), l.end(), [](int x) { return x == 0; });
  });
  std::vector<double> ldot(ls.size(), 0.0);
  for (std::size_t j = 0; j < ls.size(); ++j)
    for (int i = 0; i < r; ++i) ldot[j] += f.omegaN[i] * ls[j][i];

  DiophReport rep;
  rep.K = p.K;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.gamma_crit = std::numeric_limits<double>::infinity();
  // k and -k give the same divisors once l ranges over a symmetric set.
  for_each_half_lattice(m, p.K, [&](const std::vector<int>& k, int norm) {
    double kd = 0.0;
    for (int i = 0; i < m; ++i) kd += f.omega[i] * k[i];
    const double kt = std::pow(static_cast<double>(norm), p.tau);
    const double bound = p.gamma / kt;
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const double div = std::abs(kd + ldot[j]);
      const double margin = div - bound;
      ++rep.pairs_checked;
      rep.gamma_crit = std::min(rep.gamma_crit, div * kt);
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_k = k;
        rep.worst_l = ls[j];
      }
    }
  });
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

void ParameterBox::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw ConfigError("ParameterBox: lo and hi must be non-empty and of equal size");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ConfigError("ParameterBox: need lo < hi on every axis");
}

bool ParameterBox::contains(const Eigen::VectorXd& nu) const {
  return nu.size() == lo.size() && (nu.array() >= lo.array()).all() &&
         (nu.array() <= hi.array()).all();
}

bool ParameterBox::interior(const Eigen::VectorXd& nu) const {
  return nu.size() == lo.size() && (nu.array() > lo.array()).all() &&
         (nu.array() < hi.array()).all();
}

std::vector<Eigen::VectorXd> box_grid(const ParameterBox& box, const std::vector<int>& per_axis) {
  box.validate();
  const auto d = box.lo.size();
  if (static_cast<Eigen::Index>(per_axis.size()) != d)
    throw ConfigError("box_grid: one node count per axis required");
  std::size_t total = 1;
  for (int n : per_axis) {
    if (n < 1) throw ConfigError("box_grid: node counts must be >= 1");
    total *= static_cast<std::size_t>(n);
  }
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Eigen::VectorXd nu(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const int n = per_axis[i];
      nu[i] = n == 1 ? 0.5 * (box.lo[i] + box.hi[i])
                     : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (n - 1);
    }
    pts.push_back(nu);
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      if (++idx[i] < per_axis[i]) break;
      idx[i] = 0;
    }
  }
  return pts;
}

ShrunkDomain::ShrunkDomain(ParameterMap F, ParameterBox box, double gamma, int boundary_grid)
    : F_(std::move(F)), box_(std::move(box)), gamma_(gamma) {
  box_.validate();
  if (boundary_grid < 2) throw ConfigError("shrink_domain: boundary grid needs >= 2 nodes per axis");
  if (!(gamma >= 0.0)) throw ConfigError("shrink_domain: gamma must be >= 0");
  const std::vector<int> n(box_.lo.size(), boundary_grid);
  for (const auto& nu : box_grid(box_, n)) {
    bool on_boundary = false;
    for (Eigen::Index i = 0; i < nu.size(); ++i)
      on_boundary = on_boundary || nu[i] == box_.lo[i] || nu[i] == box_.hi[i];
    if (on_boundary) images_.push_back(F_(nu));
  }
  if (images_.empty()) throw ConfigError("shrink_domain: empty boundary grid");
}

double ShrunkDomain::boundary_distance(const Eigen::VectorXd& nu) const {
  const Eigen::VectorXd w = F_(nu);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& b : images_) {
    if (b.size() != w.size()) throw DimensionError("shrink_domain: inconsistent image sizes");
    d = std::min(d, (b - w).norm());
  }
  return d;
}

bool ShrunkDomain::operator()(const Eigen::VectorXd& nu) const {
  return box_.interior(nu) && boundary_distance(nu) > gamma_;
}

ShrunkDomain shrink_domain(ParameterMap F, const ParameterBox& box, double gamma,
                           int boundary_grid) {
  return ShrunkDomain(std::move(F), box, gamma, boundary_grid);
}

CantorScan cantor_scan(const FrequencyModel& model, const ParameterBox& box,
                       const std::vector<int>& per_axis, const DiophParams& p,
                       unsigned workers) {
  CantorScan scan;
  scan.points = box_grid(box, per_axis);
  scan.reports = parallel_map(scan.points.size(), workers, [&](std::size_t i) {
    return diophantine_check(model(scan.points[i]), p);
  });
  for (const auto& r : scan.reports) scan.survivors += r.pass ? 1 : 0;
  scan.fraction = scan.points.empty()
                      ? 0.0
                      : static_cast<double>(scan.survivors) / scan.points.size();
  return scan;
}

FrequencyData unfolding_frequency_model(const Eigen::VectorXd& nu, double lambda0) {
  if (nu.size() != 2) throw DimensionError("unfolding_frequency_model: nu = (w, mu2)");
  FrequencyData f;
  f.omega = Eigen::Vector2d(1.0, nu[0]);
  if (nu[1] >= 0.0) {
    const double r = std::sqrt(nu[1]);
    f.omegaN = Eigen::Vector2d(lambda0 - r, lambda0 + r);
  }
  return f;
}

FrequencyData top_frequency_model(const Eigen::VectorXd& nu, double c,
                                  const Eigen::VectorXd& omega) {
  if (nu.size() != 1) throw DimensionError("top_frequency_model: nu = (a)");
  FrequencyData f;
  f.omega = omega;
  const SpectrumReport rep = classify_spectrum(linearize_at_pa({c, 0.0, nu[0]}));
  if (rep.cls == SpectrumClass::EllipticPairs || rep.cls == SpectrumClass::Resonant11) {
    f.omegaN.resize(static_cast<Eigen::Index>(rep.normal_frequencies.size()));
    for (std::size_t i = 0; i < rep.normal_frequencies.size(); ++i)
      f.omegaN[static_cast<Eigen::Index>(i)] = rep.normal_frequencies[i];
  }
  return f;
}

}  // namespace gyro
