#include <algorithm>
#include <cmath>

#include "commands.hpp"
#include "gyro/errors.hpp"
#include "gyro/freqmap.hpp"
#include "gyro/linstab.hpp"
#include "gyro/parallel.hpp"
#include "gyro/strata.hpp"

namespace gyrolab {

using gyro::Vec3;
using gyro::VecX;

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

gyro::IntegratorConfig integrator_from(const json& cfg, const std::string& prefix) {
  gyro::IntegratorConfig ic;
  ic.scheme = gyro::parse_scheme(str(cfg, prefix + ".scheme"));
  ic.dt = num(cfg, prefix + ".dt");
  ic.newton_tol = num(cfg, prefix + ".newton_tol");
  ic.newton_max_iter = static_cast<int>(integer(cfg, prefix + ".newton_max_iter"));
  ic.validate();
  return ic;
}

gyro::NormalFormCoefficients coefficients_from(const json& cfg, const std::string& prefix) {
  gyro::NormalFormCoefficients c;
  c.lambda0 = num(cfg, prefix + ".lambda0");
  c.mu1 = num(cfg, prefix + ".mu1");
  c.b = num(cfg, prefix + ".b");
  c.c1 = num(cfg, prefix + ".c1");
  c.c2 = num(cfg, prefix + ".c2");
  if (cfg.contains(prefix) && at(cfg, prefix).contains("mu2")) c.mu2 = num(cfg, prefix + ".mu2");
  return c;
}

namespace {

void add_range(Schema& s, const std::string& path, double lo, double hi, int n) {
  s.push_back({path + ".min", Kind::Number, lo});
  s.push_back({path + ".max", Kind::Number, hi});
  s.push_back({path + ".count", Kind::Integer, n});
}

void add_integrator(Schema& s, const char* scheme) {
  s.push_back({"integrator.scheme", Kind::String, scheme});
  s.push_back({"integrator.dt", Kind::Number, 0.01});
  s.push_back({"integrator.newton_tol", Kind::Number, 1e-13});
  s.push_back({"integrator.newton_max_iter", Kind::Integer, 25});
}

gyro::TopParams top_from(const json& cfg) {
  gyro::TopParams p{num(cfg, "top.c"), num(cfg, "top.rho"), num(cfg, "top.a")};
  p.validate();
  return p;
}

gyro::Coupling coupling_from(const json& cfg) {
  return {str(cfg, "oscillators.coupling"), numbers(cfg, "oscillators.weights")};
}

VecX sized_or_zero(const std::vector<double>& v, Eigen::Index n, const std::string& path) {
  if (v.empty()) return VecX::Zero(n);
  if (static_cast<Eigen::Index>(v.size()) != n)
    throw ConfigError("config: field '" + path + "': expected " + std::to_string(n) + " values");
  return to_eigen(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate

Schema simulate_schema() {
  Schema s{
      {"seed", Kind::Integer, 0},
      {"top.a", Kind::Number, nullptr},
      {"top.c", Kind::Number, 1.0},
      {"top.rho", Kind::Number, 0.0},
      {"t_end", Kind::Number, nullptr},
      {"sample_every", Kind::Integer, 1},
      {"initial.tilt", Kind::NumberArray, json::array({0.0, 0.0})},
      {"initial.u", Kind::NumberArray, json::array()},
      {"initial.v", Kind::NumberArray, json::array()},
      {"oscillators.omega", Kind::NumberArray, json::array()},
      {"oscillators.epsilon", Kind::Number, 0.0},
      {"oscillators.coupling", Kind::String, "cos_sum"},
      {"oscillators.weights", Kind::NumberArray, json::array()},
      {"oscillators.x0", Kind::NumberArray, json::array()},
      {"oscillators.y0", Kind::NumberArray, json::array()},
  };
  add_integrator(s, "implicit-midpoint");
  return s;
}

void run_simulate(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  const gyro::TopParams p = top_from(cfg);
  const gyro::IntegratorConfig ic = integrator_from(cfg, "integrator");
  const double t_end = num(cfg, "t_end");
  if (!(t_end > 0.0)) throw ConfigError("config: field 't_end': must be > 0");
  const long long every = integer(cfg, "sample_every");
  if (every < 1) throw ConfigError("config: field 'sample_every': must be >= 1");

  gyro::ReducedTopState s0;
  const auto u = numbers(cfg, "initial.u"), v = numbers(cfg, "initial.v");
  if (!u.empty() || !v.empty()) {
    if (u.size() != 3 || v.size() != 3)
      throw ConfigError("config: fields 'initial.u' and 'initial.v' need 3 components each");
    s0 = gyro::project_to_constraints(Vec3(u[0], u[1], u[2]), Vec3(v[0], v[1], v[2]), p.a);
  } else {
    const auto tilt = numbers(cfg, "initial.tilt");
    if (tilt.size() != 2) throw ConfigError("config: field 'initial.tilt': expected 2 values");
    s0 = gyro::torus_initial_state({tilt[0], tilt[1], {}, {}}, p);
  }

  const auto omega = numbers(cfg, "oscillators.omega");
  const bool coupled = !omega.empty();
  std::vector<std::string> cols{"t", "u1", "u2", "u3", "v1", "v2", "v3"};
  const auto n = static_cast<Eigen::Index>(omega.size());
  for (Eigen::Index i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i) cols.push_back("y" + std::to_string(i + 1));
  for (const char* c : {"H", "dH", "d_uu", "d_uv"}) cols.push_back(c);

  std::vector<double> times;
  std::vector<gyro::DriftSample> drift;
  std::vector<std::vector<std::string>> rows;
  double h0 = 0.0;
  auto state_cells = [](double t, const gyro::ReducedTopState& s) {
    return std::vector<std::string>{fmt(t),      fmt(s.u.x()), fmt(s.u.y()), fmt(s.u.z()),
                                    fmt(s.v.x()), fmt(s.v.y()), fmt(s.v.z())};
  };
  if (coupled) {
    gyro::CoupledConfig cc{to_eigen(omega), num(cfg, "oscillators.epsilon"), coupling_from(cfg)};
    cc.validate();
    gyro::CoupledState c0{s0, sized_or_zero(numbers(cfg, "oscillators.x0"), n, "oscillators.x0"),
                          sized_or_zero(numbers(cfg, "oscillators.y0"), n, "oscillators.y0")};
    c0.x = gyro::wrap_angles(c0.x);
    h0 = gyro::coupled_energy(c0, p, cc);
    const auto tr = gyro::integrate_coupled(c0, p, ic, cc, t_end, static_cast<int>(every));
    for (std::size_t k = 0; k < tr.size(); ++k) {
      auto r = state_cells(tr.times[k], tr.states[k].top);
      for (Eigen::Index i = 0; i < n; ++i) r.push_back(fmt(tr.states[k].x[i]));
      for (Eigen::Index i = 0; i < n; ++i) r.push_back(fmt(tr.states[k].y[i]));
      r.push_back(fmt(gyro::coupled_energy(tr.states[k], p, cc)));
      rows.push_back(std::move(r));
    }
    times = tr.times;
    drift = tr.drift;
  } else {
    h0 = gyro::top_energy(s0, p);
    const auto tr = gyro::integrate(s0, p, ic, t_end, static_cast<int>(every));
    for (std::size_t k = 0; k < tr.size(); ++k) {
      auto r = state_cells(tr.times[k], tr.states[k]);
      r.push_back(fmt(gyro::top_energy(tr.states[k], p)));
      rows.push_back(std::move(r));
    }
    times = tr.times;
    drift = tr.drift;
  }

  CsvWriter csv(ctx.out_dir / "trajectory.csv", prov, cols);
  double max_dh = 0.0, max_uu = 0.0, max_uv = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = rows[k];
    r.push_back(fmt(drift[k].dH));
    r.push_back(fmt(drift[k].d_uu));
    r.push_back(fmt(drift[k].d_uv));
    csv.write_row(r);
    max_dh = std::max(max_dh, std::abs(drift[k].dH));
    max_uu = std::max(max_uu, std::abs(drift[k].d_uu));
    max_uv = std::max(max_uv, std::abs(drift[k].d_uv));
  }

  ojson body;
  body["scheme"] = gyro::scheme_name(ic.scheme);
  body["samples"] = times.size();
  body["t_final"] = times.empty() ? 0.0 : times.back();
  body["H0"] = h0;
  body["max_abs_dH"] = max_dh;
  if (h0 != 0.0)
    body["max_rel_dH"] = max_dh / std::abs(h0);
  else
    body["max_rel_dH"] = nullptr;
  body["max_abs_d_uu"] = max_uu;
  body["max_abs_d_uv"] = max_uv;
  write_json(ctx.out_dir / "drift.json", prov, body);
}

// ---------------------------------------------------------------------------
// scan-spectrum

Schema scan_spectrum_schema() {
  Schema s{
      {"seed", Kind::Integer, 0},
      {"c", Kind::NumberArray, json::array({1.0})},
      {"threshold_bracket", Kind::NumberArray, json::array({1e-3, 1e3})},
      {"tol", Kind::Number, gyro::kDefaultSpectrumTol},
  };
  add_range(s, "a", 1.5, 2.5, 101);
  return s;
}

void run_scan_spectrum(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  const auto cs = numbers(cfg, "c");
  if (cs.empty()) throw ConfigError("config: field 'c': grid is empty");
  const auto as = linear_range(cfg, "a");
  const auto br = numbers(cfg, "threshold_bracket");
  if (br.size() != 2) throw ConfigError("config: field 'threshold_bracket': expected 2 values");
  const double tol = num(cfg, "tol");

  std::vector<std::string> cols{"c", "a", "a0", "class", "nilpotent"};
  for (int i = 1; i <= 4; ++i) {
    cols.push_back("ev" + std::to_string(i) + "_re");
    cols.push_back("ev" + std::to_string(i) + "_im");
  }
  cols.push_back("omega_1");
  cols.push_back("omega_2");
  CsvWriter csv(ctx.out_dir / "spectrum.csv", prov, cols);

  ojson thresholds = ojson::array();
  for (double c : cs) {
    const double a0 = gyro::stabilization_threshold(c, {br[0], br[1]});
    // stability flips between consecutive hyperbolic/elliptic grid points,
    // skipping the collision itself
    int flips = 0, prev = 0;
    double last_a = 0.0;
    ojson brackets = ojson::array();
    for (double a : as) {
      const auto r = gyro::classify_spectrum(gyro::linearize_at_pa({c, 0.0, a}), tol);
      std::vector<std::string> row{fmt(c), fmt(a), fmt(a0), fmt(gyro::to_string(r.cls)), fmt(r.nilpotent)};
      for (const auto& ev : r.eigenvalues) {
        row.push_back(fmt(ev.real()));
        row.push_back(fmt(ev.imag()));
      }
      for (std::size_t i = 0; i < 2; ++i)
        row.push_back(i < r.normal_frequencies.size() ? fmt(r.normal_frequencies[i]) : "");
      csv.write_row(row);
      const int state = r.cls == gyro::SpectrumClass::EllipticPairs       ? 1
                        : r.cls == gyro::SpectrumClass::HyperbolicQuartet ? -1
                                                                           : 0;
      if (state != 0) {
        if (prev != 0 && state != prev) {
          ++flips;
          brackets.push_back({last_a, a});
        }
        prev = state;
        last_a = a;
      }
    }
    ojson t;
    t["c"] = c;
    t["a0"] = a0;
    t["flips"] = flips;
    t["brackets"] = brackets;
    thresholds.push_back(t);
  }
  ojson body;
  body["grid_points"] = as.size() * cs.size();
  body["thresholds"] = thresholds;
  write_json(ctx.out_dir / "spectrum.json", prov, body);
}

// ---------------------------------------------------------------------------
// strata

Schema strata_schema() {
  Schema s{
      {"seed", Kind::Integer, 0},
      {"coefficients.lambda0", Kind::Number, 1.0},
      {"coefficients.mu1", Kind::Number, 0.0},
      {"coefficients.b", Kind::Number, 1.0},
      {"coefficients.c1", Kind::Number, 0.1},
      {"coefficients.c2", Kind::Number, 0.05},
      {"mu2", Kind::NumberArray, json::array({-0.5, 0.0, 0.5})},
      {"classify.mu2", Kind::Number, -0.5},
      {"classify.points", Kind::PairArray, json::array()},
      {"classify.tol", Kind::Number, 1e-9},
      {"top.c", Kind::Number, 1.0},
  };
  add_range(s, "M", 0.0, 1.0, 201);
  add_range(s, "top.u3", -0.9, 1.0, 20);
  add_range(s, "top.Omega", -3.0, -0.05, 60);
  return s;
}

void run_strata(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  gyro::NormalFormCoefficients c = coefficients_from(cfg, "coefficients");
  const auto mu2s = numbers(cfg, "mu2");
  const auto Ms = linear_range(cfg, "M");

  {
    CsvWriter csv(ctx.out_dir / "critical_surface.csv", prov, {"mu2", "s", "g", "M", "label"});
    for (double mu2 : mu2s) {
      c.mu2 = mu2;
      for (const auto& pt : gyro::critical_surface(c, Ms))
        csv.row(pt.mu2, pt.s, pt.g, pt.M, gyro::to_string(pt.label));
    }
  }
  {
    const auto rows = gyro::top_relative_equilibria(num(cfg, "top.c"), linear_range(cfg, "top.u3"),
                                                    linear_range(cfg, "top.Omega"));
    CsvWriter csv(ctx.out_dir / "top_equilibria.csv", prov, {"u3", "Omega", "kappa", "a", "b", "h", "class"});
    for (const auto& r : rows)
      csv.row(r.u3, r.Omega, r.kappa, r.a, r.b, r.h, r.cls ? gyro::to_string(*r.cls) : "");
  }
  const auto& pts = at(cfg, "classify.points");
  if (!pts.empty()) {
    const double mu2 = num(cfg, "classify.mu2"), tol = num(cfg, "classify.tol");
    CsvWriter csv(ctx.out_dir / "classified.csv", prov, {"mu2", "s", "g", "label", "M"});
    for (const auto& p : pts) {
      const auto sp = gyro::classify_value(mu2, p[0].get<double>(), p[1].get<double>(), c, tol);
      csv.row(mu2, sp.s, sp.g, gyro::to_string(sp.label), sp.M);
    }
  }
}

// ---------------------------------------------------------------------------
// persistence

Schema persistence_schema() {
  const gyro::PersistenceConfig d;
  Schema s{
      {"seed", Kind::Integer, 0},
      {"top.a", Kind::Number, d.top.a},
      {"top.c", Kind::Number, d.top.c},
      {"top.rho", Kind::Number, d.top.rho},
      {"oscillators.omega", Kind::NumberArray, json::array({d.coupled.omega_osc[0]})},
      {"oscillators.coupling", Kind::String, d.coupled.coupling.id},
      {"oscillators.weights", Kind::NumberArray, json::array()},
      {"window_time", Kind::Number, d.window_time},
      {"windows", Kind::Integer, d.windows},
      {"sample_every", Kind::Integer, d.sample_every},
      {"max_terms", Kind::Integer, d.max_terms},
      {"refine_tol", Kind::Number, d.refine_tol},
      {"tracked_terms", Kind::Integer, d.tracked_terms},
      {"amp_tol", Kind::Number, d.amp_tol},
      {"escape_radius", Kind::Number, d.escape_radius},
      {"K_rel", Kind::Integer, d.K_rel},
      {"rel_tol", Kind::Number, d.rel_tol},
      {"epsilons", Kind::NumberArray, json::array({0.0, 1e-4, 1e-3, 1e-2})},
      {"tori.du2_ratio", Kind::Number, 0.3},
      {"tori.x0", Kind::NumberArray, json::array({0.0, 3.0})},
  };
  add_integrator(s, "splitting-2nd");
  add_range(s, "tori.du1", 0.01, 0.12, 12);
  return s;
}

void run_persistence(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  gyro::PersistenceConfig pc;
  pc.top = top_from(cfg);
  const auto omega = numbers(cfg, "oscillators.omega");
  pc.coupled = {to_eigen(omega), 0.0, coupling_from(cfg)};
  pc.integrator = integrator_from(cfg, "integrator");
  pc.window_time = num(cfg, "window_time");
  pc.windows = static_cast<int>(integer(cfg, "windows"));
  pc.sample_every = static_cast<int>(integer(cfg, "sample_every"));
  pc.max_terms = static_cast<int>(integer(cfg, "max_terms"));
  pc.refine_tol = num(cfg, "refine_tol");
  pc.tracked_terms = static_cast<int>(integer(cfg, "tracked_terms"));
  pc.amp_tol = num(cfg, "amp_tol");
  pc.escape_radius = num(cfg, "escape_radius");
  pc.K_rel = static_cast<int>(integer(cfg, "K_rel"));
  pc.rel_tol = num(cfg, "rel_tol");
  pc.validate();

  const auto eps = numbers(cfg, "epsilons");
  if (eps.empty()) throw ConfigError("config: field 'epsilons': grid is empty");
  const auto x0s = numbers(cfg, "tori.x0");
  if (x0s.empty()) throw ConfigError("config: field 'tori.x0': grid is empty");
  const double ratio = num(cfg, "tori.du2_ratio");
  std::vector<gyro::InitialTorus> tori;
  for (double du1 : linear_range(cfg, "tori.du1"))
    for (double x : x0s) {
      gyro::InitialTorus t;
      t.du1 = du1;
      t.du2 = ratio * du1;
      t.x0 = VecX::Constant(pc.coupled.n(), x);
      tori.push_back(t);
    }

  const auto scan = gyro::persistence_scan(pc, tori, eps, ctx.workers);
  std::vector<std::string> cols{"torus", "du1", "du2", "x0", "epsilon", "class", "drift", "amp_change",
                                "relation_found"};
  for (int i = 1; i <= pc.tracked_terms; ++i) cols.push_back("freq_" + std::to_string(i));
  CsvWriter csv(ctx.out_dir / "persistence.csv", prov, cols);
  for (const auto& cell : scan.cells) {
    const auto& t = tori[cell.torus];
    std::vector<std::string> r{fmt(cell.torus), fmt(t.du1), fmt(t.du2), fmt(t.x0[0]), fmt(cell.epsilon),
                               fmt(gyro::to_string(cell.cls)), fmt(cell.drift), fmt(cell.amp_change),
                               fmt(cell.relation_found)};
    for (int i = 0; i < pc.tracked_terms; ++i)
      r.push_back(i < static_cast<int>(cell.freqs.size()) ? fmt(cell.freqs[i]) : "");
    csv.write_row(r);
  }

  ojson survival = ojson::array();
  bool monotone = true;
  double prev = 2.0;
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  for (double e : sorted) {
    const double f = scan.survival_fraction(e);
    monotone = monotone && f <= prev;
    prev = f;
    survival.push_back({{"epsilon", e}, {"fraction", f}});
  }
  ojson body;
  body["tori"] = tori.size();
  body["survival"] = survival;
  body["non_increasing"] = monotone;
  write_json(ctx.out_dir / "persistence.json", prov, body);
}

// ---------------------------------------------------------------------------

const std::vector<Command>& commands() {
  static const std::vector<Command> table{
      {"simulate", "integrate the reduced top, optionally coupled to oscillators", simulate_schema,
       run_simulate},
      {"scan-spectrum", "linear stability class of P_a over an (a, c) grid", scan_spectrum_schema,
       run_scan_spectrum},
      {"normal-form", "degree-4 normalization to the 1:-1 resonance normal form", normal_form_schema,
       run_normal_form},
      {"strata", "critical values of the (S, G) map and the top's steady precessions", strata_schema,
       run_strata},
      {"dioph-scan", "Diophantine survivors over a parameter grid", dioph_scan_schema, run_dioph_scan},
      {"naff", "frequency decomposition of a sampled signal", naff_schema, run_naff},
      {"persistence", "survival of quasi-periodic motion under coupling", persistence_schema,
       run_persistence},
      {"monodromy", "rotation-number monodromy along a loop around the thread", monodromy_schema,
       run_monodromy},
  };
  return table;
}

}  // namespace gyrolab
