#pragma once

// Frequency analysis of quasi-periodic signals (Hann-windowed NAFF), integer
// relations among frequencies, and persistence scans of the coupled top.

#include <complex>
#include <string_view>
#include <vector>

#include "gyro/integrator.hpp"
#include "gyro/models.hpp"

namespace gyro {

struct TimeSeries {
  std::vector<std::complex<double>> samples;  // sample n taken at t = n dt
  double dt = 1.0;

  void validate() const;  // >= 16 finite samples, dt > 0
};

struct FrequencyTerm {
  double frequency = 0.0;  // rad / time
  double amplitude = 0.0;
  double phase = 0.0;
};

struct FrequencyDecomposition {
  std::vector<FrequencyTerm> terms;  // amplitudes non-increasing
  double residual_norm = 0.0;        // windowed RMS of what is left
};

struct NaffOptions {
  int max_terms = 8;
  double refine_tol = 1e-12;    // bracket width on each frequency
  double residual_tol = 1e-12;  // stop when residual RMS <= this * signal RMS
  int passes = 2;               // re-refinement sweeps once all terms are found
};

FrequencyDecomposition naff_extract(const TimeSeries& ts, const NaffOptions& opt);
FrequencyDecomposition naff_extract(const TimeSeries& ts, int max_terms, double refine_tol);

struct TorusDimension {
  int dim = 0;
  std::vector<double> basis;
};

/// Greedy maximal subset (over ascending values) with no relation
/// |<k, f>| <= tol, 0 < |k|_1 <= K_rel.
TorusDimension torus_dimension(const std::vector<double>& freqs, int K_rel, double tol);

// ---------------------------------------------------------------------------

enum class PersistenceClass { Survived, Resonant, Escaped };
std::string_view to_string(PersistenceClass c);

/// Initial condition near P_a: u tilted by (du1, du2), v = a e3 projected
/// onto R_a, oscillators at (x0, y0).
struct InitialTorus {
  double du1 = 0.05;
  double du2 = 0.0;
  VecX x0;  // empty means zeros
  VecX y0;
};

struct PersistenceConfig {
  TopParams top{1.0, 0.0, 3.0};
  // epsilon is overridden per cell. One oscillator just below 2 omega_- of
  // the a = 3 top, so that the larger tilts sit near parametric resonance.
  CoupledConfig coupled{VecX::Constant(1, 0.757), 0.0, {}};
  IntegratorConfig integrator{Scheme::Splitting2, 0.01};
  double window_time = 400.0;
  int windows = 2;
  int sample_every = 10;
  int max_terms = 6;
  double refine_tol = 1e-10;
  int tracked_terms = 2;
  double amp_tol = 1e-3;        // relative amplitude change allowed between windows
  double escape_radius = 0.5;   // |u - e3| beyond this counts as escape
  int K_rel = 6;
  double rel_tol = 1e-6;

  void validate() const;
  double drift_tol(double omega) const;  // max(10 refine_tol, 1e-7 |omega|)
};

struct PersistenceCell {
  std::size_t torus = 0;
  double epsilon = 0.0;
  PersistenceClass cls = PersistenceClass::Survived;
  std::vector<double> freqs;  // tracked frequencies in the first window
  double drift = 0.0;         // max tracked-frequency change between windows
  double amp_change = 0.0;    // max relative amplitude change
  bool relation_found = false;
};

struct PersistenceScan {
  std::vector<PersistenceCell> cells;  // torus-major, then epsilon

  double survival_fraction(double epsilon) const;
};

ReducedTopState torus_initial_state(const InitialTorus& t, const TopParams& p);

/// Observable u1 + i u2 sampled along a trajectory.
TimeSeries top_observable(const CoupledTrajectory& tr, std::size_t begin, std::size_t end,
                          double dt);

PersistenceCell classify_persistence(const PersistenceConfig& cfg, const InitialTorus& t,
                                     double epsilon);

PersistenceScan persistence_scan(const PersistenceConfig& cfg,
                                 const std::vector<InitialTorus>& tori,
                                 const std::vector<double>& epsilons, unsigned workers = 1);

}  // namespace gyro
