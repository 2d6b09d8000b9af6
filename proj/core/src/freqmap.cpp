#include "gyro/freqmap.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/parallel.hpp"

namespace gyro {
namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

class WindowedSignal {
 public:
  WindowedSignal(std::size_t n, double dt) : dt_(dt), w_(n) {
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      w_[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / denom));
    wsum_ = 0.0;
    for (double x : w_) wsum_ += x;
  }

  std::size_t size() const { return w_.size(); }
  double dt() const { return dt_; }
  double weight(std::size_t i) const { return w_[i]; }
  double weight_sum() const { return wsum_; }

  // <f, e^{i omega t}> under the window, and its omega-derivative.
  void correlate(const std::vector<cd>& f, double omega, cd& phi, cd* dphi) const {
    const cd rot = std::polar(1.0, -omega * dt_);
    cd e(1.0, 0.0), acc(0.0, 0.0), dacc(0.0, 0.0);
    for (std::size_t n = 0; n < w_.size(); ++n) {
      if ((n & 255u) == 0) e = std::polar(1.0, -omega * dt_ * static_cast<double>(n));
      const cd term = w_[n] * f[n] * e;
      acc += term;
      if (dphi) dacc += term * static_cast<double>(n);
      e *= rot;
    }
    phi = acc / wsum_;
    if (dphi) *dphi = cd(0.0, -dt_) * dacc / wsum_;
  }

  double power(const std::vector<cd>& f, double omega) const {
    cd phi;
    correlate(f, omega, phi, nullptr);
    return std::norm(phi);
  }

  double power_slope(const std::vector<cd>& f, double omega) const {
    cd phi, dphi;
    correlate(f, omega, phi, &dphi);
    return 2.0 * (std::conj(phi) * dphi).real();
  }

  double rms(const std::vector<cd>& f) const {
    double s = 0.0;
    for (std::size_t n = 0; n < w_.size(); ++n) s += w_[n] * std::norm(f[n]);
    return std::sqrt(s / wsum_);
  }

 private:
  double dt_;
  std::vector<double> w_;
  double wsum_ = 0.0;
};

double coarse_peak(const WindowedSignal& ws, const std::vector<cd>& f, double& bin) {
  std::size_t nfft = 1;
  while (nfft < 2 * ws.size()) nfft <<= 1;
  fftw_complex* buf = fftw_alloc_complex(nfft);
  fftw_plan plan;
  {
    std::lock_guard lk(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(nfft), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < nfft; ++i) {
    const cd x = i < ws.size() ? ws.weight(i) * f[i] : cd(0.0, 0.0);
    buf[i][0] = x.real();
    buf[i][1] = x.imag();
  }
  fftw_execute(plan);
  std::size_t best = 0;
  double best_p = -1.0;
  for (std::size_t i = 0; i < nfft; ++i) {
    const double p = buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
    if (p > best_p) {
      best_p = p;
      best = i;
    }
  }
  {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  bin = kTwoPi / (static_cast<double>(nfft) * ws.dt());
  const double k = best < nfft / 2 ? static_cast<double>(best)
                                   : static_cast<double>(best) - static_cast<double>(nfft);
  return k * bin;
}

// Golden-section maximization of |phi|^2 on [w0 - hw, w0 + hw], then
// bisection on the sign of d|phi|^2/domega down to `tol`.
double refine_peak(const WindowedSignal& ws, const std::vector<cd>& f, double w0, double hw,
                   double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = w0 - hw, b = w0 + hw;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = ws.power(f, x1), f2 = ws.power(f, x2);
  const double gtol = std::max(tol, hw * 1e-7);
  while (b - a > gtol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = ws.power(f, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = ws.power(f, x1);
    }
  }
  const double x = 0.5 * (a + b);
  if (gtol <= tol) return x;

  double h = gtol;
  double lo = x - h, hi = x + h;
  bool bracketed = false;
  for (int it = 0; it < 40; ++it) {
    if (ws.power_slope(f, lo) > 0.0 && ws.power_slope(f, hi) < 0.0) {
      bracketed = true;
      break;
    }
    h *= 2.0;
    lo = x - h;
    hi = x + h;
  }
  if (!bracketed) return x;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (ws.power_slope(f, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Windowed least-squares amplitudes of f on the exponentials e^{i w_k t}.
std::vector<cd> fit_amplitudes(const WindowedSignal& ws, const std::vector<cd>& f,
                               const std::vector<double>& freqs) {
  const auto k = static_cast<Eigen::Index>(freqs.size());
  Eigen::MatrixXcd gram(k, k);
  Eigen::VectorXcd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    cd phi;
    ws.correlate(f, freqs[i], phi, nullptr);
    rhs[i] = phi;
    for (Eigen::Index j = 0; j < k; ++j) {
      // <e^{i w_j t}, e^{i w_i t}> = sum w e^{i (w_j - w_i) t}
      const double d = freqs[j] - freqs[i];
      const cd rot = std::polar(1.0, d * ws.dt());
      cd e(1.0, 0.0), acc(0.0, 0.0);
      for (std::size_t n = 0; n < ws.size(); ++n) {
        if ((n & 255u) == 0) e = std::polar(1.0, d * ws.dt() * static_cast<double>(n));
        acc += ws.weight(n) * e;
        e *= rot;
      }
      gram(i, j) = acc / ws.weight_sum();
    }
  }
  const Eigen::VectorXcd a = gram.partialPivLu().solve(rhs);
  return std::vector<cd>(a.data(), a.data() + k);
}

std::vector<cd> subtract_terms(const WindowedSignal& ws, const std::vector<cd>& f,
                               const std::vector<double>& freqs, const std::vector<cd>& amps,
                               std::size_t skip) {
  std::vector<cd> r = f;
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    if (j == skip) continue;
    const cd rot = std::polar(1.0, freqs[j] * ws.dt());
    cd e = amps[j];
    for (std::size_t n = 0; n < r.size(); ++n) {
      if ((n & 255u) == 0)
        e = amps[j] * std::polar(1.0, freqs[j] * ws.dt() * static_cast<double>(n));
      r[n] -= e;
      e *= rot;
    }
  }
  return r;
}

}  // namespace

void TimeSeries::validate() const {
  if (samples.size() < 16) throw DataError("TimeSeries: at least 16 samples required");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DataError("TimeSeries: dt must be > 0");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw DataError("TimeSeries: non-finite sample");
}

FrequencyDecomposition naff_extract(const TimeSeries& ts, int max_terms, double refine_tol) {
  NaffOptions o;
  o.max_terms = max_terms;
  o.refine_tol = refine_tol;
  return naff_extract(ts, o);
}

FrequencyDecomposition naff_extract(const TimeSeries& ts, const NaffOptions& opt) {
  ts.validate();
  if (opt.max_terms < 1) throw ConfigError("naff_extract: max_terms must be >= 1");
  if (!(opt.refine_tol > 0.0)) throw ConfigError("naff_extract: refine_tol must be > 0");
  const WindowedSignal ws(ts.samples.size(), ts.dt);
  const std::vector<cd>& f = ts.samples;
  const double f_rms = ws.rms(f);
  const double raw_bin = kTwoPi / (static_cast<double>(ws.size()) * ts.dt);

  std::vector<double> freqs;
  std::vector<cd> amps;
  std::vector<cd> resid = f;
  auto snap = [&](double w) { return std::abs(w) <= opt.refine_tol ? 0.0 : w; };

  while (static_cast<int>(freqs.size()) < opt.max_terms) {
    if (ws.rms(resid) <= opt.residual_tol * f_rms || f_rms == 0.0) break;
    double bin = 0.0;
    const double w0 = coarse_peak(ws, resid, bin);
    const double w = snap(refine_peak(ws, resid, w0, bin, opt.refine_tol));
    // Inside the Hann main lobe (two bins) of a known term a new peak is
    // leakage from that term, not a resolvable frequency.
    const bool duplicate = std::any_of(freqs.begin(), freqs.end(), [&](double x) {
      return std::abs(x - w) < 2.0 * raw_bin;
    });
    if (duplicate) break;
    freqs.push_back(w);
    amps = fit_amplitudes(ws, f, freqs);
    resid = subtract_terms(ws, f, freqs, amps, freqs.size());
  }

  for (int pass = 0; pass < opt.passes && freqs.size() > 1; ++pass) {
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const std::vector<cd> g = subtract_terms(ws, f, freqs, amps, j);
      freqs[j] = snap(refine_peak(ws, g, freqs[j], 0.25 * raw_bin, opt.refine_tol));
    }
    amps = fit_amplitudes(ws, f, freqs);
  }
  resid = subtract_terms(ws, f, freqs, amps, freqs.size());

  FrequencyDecomposition out;
  for (std::size_t j = 0; j < freqs.size(); ++j)
    out.terms.push_back({freqs[j], std::abs(amps[j]), std::arg(amps[j])});
  std::stable_sort(out.terms.begin(), out.terms.end(),
                   [](const FrequencyTerm& a, const FrequencyTerm& b) {
                     return a.amplitude > b.amplitude;
                   });
  out.residual_norm = ws.rms(resid);
  return out;
}

namespace {

// Is there k with k_last != 0, |k|_1 <= K and |<k, v>| <= tol?
bool has_relation(const std::vector<double>& basis, double f, int K, double tol) {
  const std::size_t n = basis.size();
  bool found = false;
  auto rec = [&](auto&& self, std::size_t i, int budget, double acc) -> void {
    if (found) return;
    if (i == n) {
      if (std::abs(acc) <= tol) found = true;
      return;
    }
    for (int x = -budget; x <= budget && !found; ++x)
      self(self, i + 1, budget - std::abs(x), acc + x * basis[i]);
  };
  for (int kf = 1; kf <= K && !found; ++kf) rec(rec, 0, K - kf, kf * f);
  return found;
}

}  // namespace

TorusDimension torus_dimension(const std::vector<double>& freqs, int K_rel, double tol) {
  if (K_rel < 1) throw ConfigError("torus_dimension: K_rel must be >= 1");
  for (double f : freqs)
    if (!std::isfinite(f)) throw DataError("torus_dimension: non-finite frequency");
  std::vector<double> sorted = freqs;
  std::sort(sorted.begin(), sorted.end());
  TorusDimension out;
  for (double f : sorted)
    if (!has_relation(out.basis, f, K_rel, tol)) out.basis.push_back(f);
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(PersistenceClass c) {
  switch (c) {
    case PersistenceClass::Survived: return "Survived";
    case PersistenceClass::Resonant: return "Resonant";
    case PersistenceClass::Escaped: return "Escaped";
  }
  return "?";
}

void PersistenceConfig::validate() const {
  top.validate();
  integrator.validate();
  if (windows < 2) throw ConfigError("persistence: windows must be >= 2");
  if (!(window_time > 0.0)) throw ConfigError("persistence: window_time must be > 0");
  if (sample_every < 1) throw ConfigError("persistence: sample_every must be >= 1");
  if (tracked_terms < 1 || tracked_terms > max_terms)
    throw ConfigError("persistence: need 1 <= tracked_terms <= max_terms");
  if (!(escape_radius > 0.0)) throw ConfigError("persistence: escape_radius must be > 0");
  if (window_time / (integrator.dt * sample_every) < 16)
    throw ConfigError("persistence: windows must hold at least 16 samples");
}

double PersistenceConfig::drift_tol(double omega) const {
  return std::max(10.0 * refine_tol, 1e-7 * std::abs(omega));
}

double PersistenceScan::survival_fraction(double epsilon) const {
  std::size_t n = 0, s = 0;
  for (const auto& c : cells) {
    if (c.epsilon != epsilon) continue;
    ++n;
    if (c.cls == PersistenceClass::Survived) ++s;
  }
  return n == 0 ? 0.0 : static_cast<double>(s) / n;
}

ReducedTopState torus_initial_state(const InitialTorus& t, const TopParams& p) {
  const double r2 = t.du1 * t.du1 + t.du2 * t.du2;
  if (!(r2 < 1.0)) throw ConfigError("initial torus: tilt must satisfy du1^2 + du2^2 < 1");
  const Vec3 u(t.du1, t.du2, std::sqrt(1.0 - r2));
  return project_to_constraints(u, p.a * Vec3::UnitZ(), p.a);
}

TimeSeries top_observable(const CoupledTrajectory& tr, std::size_t begin, std::size_t end,
                          double dt) {
  TimeSeries ts;
  ts.dt = dt;
  for (std::size_t i = begin; i < end && i < tr.states.size(); ++i)
    ts.samples.emplace_back(tr.states[i].top.u.x(), tr.states[i].top.u.y());
  return ts;
}

PersistenceCell classify_persistence(const PersistenceConfig& cfg, const InitialTorus& t,
                                     double epsilon) {
  cfg.validate();
  CoupledConfig cc = cfg.coupled;
  cc.epsilon = epsilon;
  cc.validate();
  const auto n = cc.n();
  CoupledState s0;
  s0.top = torus_initial_state(t, cfg.top);
  s0.x = t.x0.size() == 0 ? VecX::Zero(n) : t.x0;
  s0.y = t.y0.size() == 0 ? VecX::Zero(n) : t.y0;
  if (s0.x.size() != n || s0.y.size() != n)
    throw DimensionError("initial torus: oscillator state size differs from omega_osc");

  const double dts = cfg.integrator.dt * cfg.sample_every;
  const auto per_window = static_cast<std::size_t>(std::floor(cfg.window_time / dts + 1e-9));
  const CoupledTrajectory tr = integrate_coupled(s0, cfg.top, cfg.integrator, cc,
                                                 cfg.windows * cfg.window_time, cfg.sample_every);

  PersistenceCell cell;
  cell.epsilon = epsilon;
  for (const auto& st : tr.states) {
    if ((st.top.u - Vec3::UnitZ()).norm() > cfg.escape_radius) {
      cell.cls = PersistenceClass::Escaped;
      cell.drift = std::numeric_limits<double>::infinity();
      return cell;
    }
  }

  NaffOptions opt;
  opt.max_terms = cfg.max_terms;
  opt.refine_tol = cfg.refine_tol;
  std::vector<FrequencyDecomposition> dec;
  for (int w = 0; w < cfg.windows; ++w)
    dec.push_back(naff_extract(top_observable(tr, w * per_window, (w + 1) * per_window, dts), opt));

  const auto tracked = std::min<std::size_t>(cfg.tracked_terms, dec[0].terms.size());
  for (std::size_t j = 0; j < tracked; ++j) cell.freqs.push_back(dec[0].terms[j].frequency);
  for (std::size_t w = 1; w < dec.size(); ++w) {
    for (std::size_t j = 0; j < tracked; ++j) {
      const FrequencyTerm& ref = dec[0].terms[j];
      const FrequencyTerm* best = nullptr;
      for (const auto& term : dec[w].terms)
        if (!best || std::abs(term.frequency - ref.frequency) <
                         std::abs(best->frequency - ref.frequency))
          best = &term;
      if (!best) {
        cell.drift = std::numeric_limits<double>::infinity();
        continue;
      }
      cell.drift = std::max(cell.drift, std::abs(best->frequency - ref.frequency));
      if (ref.amplitude > 0.0)
        cell.amp_change =
            std::max(cell.amp_change, std::abs(best->amplitude - ref.amplitude) / ref.amplitude);
    }
  }

  std::vector<double> all = cell.freqs;
  if (epsilon > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) all.push_back(cc.omega_osc[i]);
  cell.relation_found =
      torus_dimension(all, cfg.K_rel, cfg.rel_tol).dim < static_cast<int>(all.size());

  const double lead = cell.freqs.empty() ? 0.0 : cell.freqs[0];
  const bool stable = !cell.freqs.empty() && cell.drift < cfg.drift_tol(lead) &&
                      cell.amp_change < cfg.amp_tol;
  cell.cls = stable ? PersistenceClass::Survived : PersistenceClass::Resonant;
  return cell;
}

PersistenceScan persistence_scan(const PersistenceConfig& cfg,
                                 const std::vector<InitialTorus>& tori,
                                 const std::vector<double>& epsilons, unsigned workers) {
  cfg.validate();
  for (double e : epsilons)
    if (!(e >= 0.0)) throw ConfigError("persistence_scan: epsilons must be >= 0");
  const std::size_t ne = epsilons.size();
  PersistenceScan scan;
  scan.cells = parallel_map(tori.size() * ne, workers, [&](std::size_t i) {
    const std::size_t ti = i / ne, ei = i % ne;
    try {
      PersistenceCell c = classify_persistence(cfg, tori[ti], epsilons[ei]);
      c.torus = ti;
      return c;
    } catch (const StepFailure& e) {
      std::ostringstream os;
      os << "persistence cell " << i << " (torus " << ti << ", epsilon " << epsilons[ei]
         << "): " << e.what();
      throw StepFailure(os.str(), e.step_index());
    }
  });
  return scan;
}

}  // namespace gyro
