#pragma once

// Structure-preserving integrators for the reduced top and the coupled
// top-oscillator system.

#include <string_view>
#include <vector>

#include "gyro/models.hpp"

namespace gyro {

enum class Scheme { ImplicitMidpoint, Splitting2, Splitting4 };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme s);

struct IntegratorConfig {
  Scheme scheme = Scheme::ImplicitMidpoint;
  double dt = 0.01;
  double newton_tol = 1e-13;
  int newton_max_iter = 25;

  void validate() const;
};

/// Deviation of the first integrals from their initial values.
struct DriftSample {
  double dH = 0.0;
  double d_uu = 0.0;  // u.u - 1
  double d_uv = 0.0;  // u.v - a
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<DriftSample> drift;

  std::size_t size() const { return times.size(); }
};

using TopTrajectory = Trajectory<ReducedTopState>;
using CoupledTrajectory = Trajectory<CoupledState>;

/// One step of the configured scheme. A negative dt in cfg steps backwards.
ReducedTopState step(const ReducedTopState& s, const TopParams& p,
                     const IntegratorConfig& cfg);

CoupledState step(const CoupledState& s, const TopParams& p,
                  const IntegratorConfig& cfg, const CoupledConfig& cc);

/// Runs ceil(t_end / dt) steps, recording the initial state, every
/// sample_every-th state and the final state.
TopTrajectory integrate(const ReducedTopState& s0, const TopParams& p,
                        const IntegratorConfig& cfg, double t_end,
                        int sample_every = 1);

CoupledTrajectory integrate_coupled(const CoupledState& s0, const TopParams& p,
                                    const IntegratorConfig& cfg,
                                    const CoupledConfig& cc, double t_end,
                                    int sample_every = 1);

/// Unchecked energy formulas for drift bookkeeping (valid off R_a too).
double top_energy(const ReducedTopState& s, const TopParams& p);
double coupled_energy(const CoupledState& s, const TopParams& p,
                      const CoupledConfig& cc);

}  // namespace gyro
