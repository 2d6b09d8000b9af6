#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "gyro/dioph.hpp"
#include "gyro/errors.hpp"
#include "gyro/freqmap.hpp"
#include "gyro/monodromy.hpp"
#include "gyro/normalform.hpp"

namespace gyrolab {

namespace {

ojson terms_json(const gyro::PolyHamiltonian& p) {
  ojson a = ojson::array();
  for (int i = 0; i < gyro::PolyHamiltonian::kSize; ++i)
    if (p[i] != 0.0) {
      const auto& e = gyro::PolyHamiltonian::exponent(i);
      a.push_back({{"exponent", {e[0], e[1], e[2], e[3]}}, {"coef", p[i]}});
    }
  return a;
}

ojson coefficients_json(const gyro::NormalFormCoefficients& c) {
  ojson o;
  o["lambda0"] = c.lambda0;
  o["mu1"] = c.mu1;
  o["mu2"] = c.mu2;
  o["b"] = c.b;
  o["c1"] = c.c1;
  o["c2"] = c.c2;
  return o;
}

std::string field_at(const std::string& path, std::size_t i, const std::string& key) {
  return path + "[" + std::to_string(i) + "]." + key;
}

double object_number(const json& obj, const std::string& path, std::size_t i, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError("config: field '" + field_at(path, i, key) + "': expected number");
  return obj[key].get<double>();
}

}  // namespace

// ---------------------------------------------------------------------------
// normal-form

Schema normal_form_schema() {
  return {
      {"seed", Kind::Integer, 0},
      {"unfolding.lambda0", Kind::Number, 1.0},
      {"unfolding.mu1", Kind::Number, 0.02},
      {"unfolding.mu2", Kind::Number, -0.35},
      {"truth.b", Kind::Number, 0.8},
      {"truth.c1", Kind::Number, -0.3},
      {"truth.c2", Kind::Number, 0.25},
      {"generator.degree", Kind::Integer, 3},
      {"generator.scale", Kind::Number, 0.5},
      {"hamiltonian", Kind::ObjectArray, json::array()},
      {"divisor_tol", Kind::Number, 1e-10},
      {"remainder.radii", Kind::NumberArray, json::array({0.04, 0.02, 0.01, 0.005})},
      {"remainder.steps", Kind::Integer, 400},
  };
}

void run_normal_form(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  const gyro::UnfoldingParams up{num(cfg, "unfolding.lambda0"), num(cfg, "unfolding.mu1"),
                                 num(cfg, "unfolding.mu2")};
  up.validate();
  SeededStream rng(prov.seed);

  const auto& terms = at(cfg, "hamiltonian");
  const bool explicit_h = !terms.empty();
  gyro::PolyHamiltonian h;
  gyro::NormalFormCoefficients truth;
  ojson body;
  if (explicit_h) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      if (!t.contains("exponent") || !t["exponent"].is_array() || t["exponent"].size() != 4)
        throw ConfigError("config: field '" + field_at("hamiltonian", i, "exponent") +
                          "': expected 4 integers");
      gyro::Exponent e{};
      for (int k = 0; k < 4; ++k) {
        const auto& x = t["exponent"][k];
        if (!x.is_number_integer() || x.get<int>() < 0)
          throw ConfigError("config: field '" + field_at("hamiltonian", i, "exponent") +
                            "': expected non-negative integers");
        e[k] = x.get<int>();
      }
      h.add_term(e, object_number(t, "hamiltonian", i, "coef"));
    }
    body["mode"] = "explicit";
  } else {
    truth.lambda0 = up.lambda0;
    truth.mu1 = up.mu1;
    truth.mu2 = up.mu2;
    truth.b = num(cfg, "truth.b");
    truth.c1 = num(cfg, "truth.c1");
    truth.c2 = num(cfg, "truth.c2");
    const long long deg = integer(cfg, "generator.degree");
    if (deg < 3 || deg > 4) throw ConfigError("config: field 'generator.degree': must be 3 or 4");
    const double scale = num(cfg, "generator.scale");
    gyro::PolyHamiltonian w;
    for (int idx : gyro::indices_of_degree(static_cast<int>(deg))) w[idx] = scale * (2.0 * rng.uniform() - 1.0);
    h = gyro::lie_transform(gyro::gint_polynomial(truth), w);
    body["mode"] = "round-trip";
  }

  const auto r = gyro::birkhoff_normalize(h, up, 4, num(cfg, "divisor_tol"));
  body["coefficients"] = coefficients_json(r.coeffs);
  body["criticality"] = gyro::to_string(gyro::supercriticality_test(r.coeffs));
  body["min_divisor"] = r.min_divisor;
  if (!explicit_h) {
    body["truth"] = coefficients_json(truth);
    body["max_coefficient_error"] =
        std::max({std::abs(r.coeffs.mu2 - truth.mu2), std::abs(r.coeffs.b - truth.b),
                  std::abs(r.coeffs.c1 - truth.c1), std::abs(r.coeffs.c2 - truth.c2)});
  }

  // H o Phi - G along a random ray; the slope in log-log is the remainder order
  const auto radii = numbers(cfg, "remainder.radii");
  const int steps = static_cast<int>(integer(cfg, "remainder.steps"));
  if (steps < 1) throw ConfigError("config: field 'remainder.steps': must be >= 1");
  gyro::Vec4 dir(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  dir.normalize();
  const gyro::PolyHamiltonian g = gyro::gint_polynomial(r.coeffs);
  ojson rem = ojson::array();
  std::vector<double> lx, ly;
  for (double rad : radii) {
    if (!(rad > 0.0)) throw ConfigError("config: field 'remainder.radii': radii must be > 0");
    const gyro::Vec4 z = rad * dir;
    const double v = std::abs(h.evaluate(gyro::normalizing_map(r, z, steps).first) - g.evaluate(z));
    rem.push_back({{"radius", rad}, {"remainder", v}});
    if (v > 0.0) {
      lx.push_back(std::log(rad));
      ly.push_back(std::log(v));
    }
  }
  ojson rj;
  rj["samples"] = rem;
  if (lx.size() >= 2 && lx.size() == radii.size()) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rj["slope"] = sxx > 0 ? ojson(sxy / sxx) : ojson(nullptr);
  } else {
    rj["slope"] = nullptr;
  }
  body["remainder"] = rj;
  body["generators"] = {{"g3", terms_json(r.g3)}, {"g4", terms_json(r.g4)}};
  write_json(ctx.out_dir / "normal_form.json", prov, body);
}

// ---------------------------------------------------------------------------
// dioph-scan

Schema dioph_scan_schema() {
  return {
      {"seed", Kind::Integer, 0},
      {"model", Kind::String, "unfolding"},
      {"lambda0", Kind::Number, std::numbers::sqrt2},
      {"top.c", Kind::Number, 1.0},
      {"top.omega", Kind::NumberArray, json::array({1.0})},
      {"box.lo", Kind::NumberArray, json::array({0.5, -0.3})},
      {"box.hi", Kind::NumberArray, json::array({1.7, 0.4})},
      {"grid", Kind::NumberArray, json::array({61, 71})},
      {"tau", Kind::Number, 2.0},
      {"gamma", Kind::Number, 1e-3},
      {"K", Kind::Integer, 30},
  };
}

void run_dioph_scan(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  const std::string model_name = str(cfg, "model");
  gyro::FrequencyModel model;
  std::size_t dim = 0;
  if (model_name == "unfolding") {
    const double l0 = num(cfg, "lambda0");
    model = [l0](const Eigen::VectorXd& nu) { return gyro::unfolding_frequency_model(nu, l0); };
    dim = 2;
  } else if (model_name == "top") {
    const double c = num(cfg, "top.c");
    const Eigen::VectorXd omega = to_eigen(numbers(cfg, "top.omega"));
    if (omega.size() < 1) throw ConfigError("config: field 'top.omega': need at least one frequency");
    model = [c, omega](const Eigen::VectorXd& nu) { return gyro::top_frequency_model(nu, c, omega); };
    dim = 1;
  } else {
    throw ConfigError("config: field 'model': expected \"unfolding\" or \"top\", got \"" + model_name + "\"");
  }

  const auto lo = numbers(cfg, "box.lo"), hi = numbers(cfg, "box.hi"), gridd = numbers(cfg, "grid");
  if (lo.size() != dim || hi.size() != dim || gridd.size() != dim)
    throw ConfigError("config: fields 'box.lo', 'box.hi' and 'grid' need " + std::to_string(dim) +
                      " entries for model '" + model_name + "'");
  std::vector<int> grid;
  for (double g : gridd) {
    if (g != std::floor(g) || g < 1) throw ConfigError("config: field 'grid': expected positive integers");
    grid.push_back(static_cast<int>(g));
  }
  const gyro::ParameterBox box{to_eigen(lo), to_eigen(hi)};
  box.validate();
  const gyro::DiophParams dp{num(cfg, "tau"), num(cfg, "gamma"), static_cast<int>(integer(cfg, "K"))};

  const auto scan = gyro::cantor_scan(model, box, grid, dp, ctx.workers);

  std::vector<std::string> cols;
  for (std::size_t i = 1; i <= dim; ++i) cols.push_back("nu_" + std::to_string(i));
  for (const char* c : {"pass", "gamma_crit", "worst_margin", "worst_k", "worst_l"}) cols.push_back(c);
  CsvWriter csv(ctx.out_dir / "dioph.csv", prov, cols);
  auto ints = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
  };
  std::size_t neg = 0, neg_pass = 0, pos = 0, pos_pass = 0;
  // per internal-frequency column: counts of passing/failing points in each half
  std::map<double, std::array<std::size_t, 4>> columns;
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const auto& p = scan.points[i];
    const auto& r = scan.reports[i];
    std::vector<std::string> row;
    for (Eigen::Index k = 0; k < p.size(); ++k) row.push_back(fmt(p[k]));
    row.push_back(fmt(r.pass));
    row.push_back(fmt(r.gamma_crit));
    row.push_back(fmt(r.worst_margin));
    row.push_back(ints(r.worst_k));
    row.push_back(ints(r.worst_l));
    csv.write_row(row);
    if (dim == 2) {
      auto& col = columns[p[0]];
      if (p[1] < 0) {
        ++neg;
        neg_pass += r.pass;
        ++col[r.pass ? 0 : 1];
      } else if (p[1] > 0) {
        ++pos;
        pos_pass += r.pass;
        ++col[r.pass ? 2 : 3];
      }
    }
  }
  ojson body;
  body["points"] = scan.points.size();
  body["survivors"] = scan.survivors;
  body["fraction"] = scan.fraction;
  if (dim == 2) {
    // A column is uniform when all of its points in that half agree: the
    // hyperbolic half is a product (Cantor set in w) x (interval in mu2),
    // while resonance wedges cut the elliptic half across columns.
    std::size_t uni_neg = 0, uni_pos = 0;
    for (const auto& [w, n] : columns) {
      uni_neg += n[0] == 0 || n[1] == 0;
      uni_pos += n[2] == 0 || n[3] == 0;
    }
    auto half = [&](std::size_t n, std::size_t k, std::size_t uniform) {
      return ojson{{"points", n},
                   {"survivors", k},
                   {"fraction", n ? static_cast<double>(k) / n : 0.0},
                   {"uniform_columns", uniform},
                   {"columns", columns.size()}};
    };
    body["mu2_negative"] = half(neg, neg_pass, uni_neg);
    body["mu2_positive"] = half(pos, pos_pass, uni_pos);
  }
  write_json(ctx.out_dir / "dioph.json", prov, body);
}

// ---------------------------------------------------------------------------
// naff

Schema naff_schema() {
  const double w = 0.7;
  json terms = json::array({
      {{"frequency", w}, {"amplitude", 1.0}, {"phase", 0.0}},
      {{"frequency", w * std::numbers::sqrt2}, {"amplitude", 0.6}, {"phase", std::numbers::pi / 2}},
      {{"frequency", -w * std::numbers::phi}, {"amplitude", 0.35}, {"phase", 0.0}},
  });
  return {
      {"seed", Kind::Integer, 0},
      {"input.file", Kind::String, ""},
      {"input.dt", Kind::Number, 1.0},
      {"synthetic.terms", Kind::ObjectArray, terms},
      {"synthetic.samples", Kind::Integer, 4096},
      {"synthetic.dt", Kind::Number, 0.5},
      {"synthetic.noise", Kind::Number, 0.0},
      {"max_terms", Kind::Integer, 6},
      {"refine_tol", Kind::Number, 1e-12},
      {"residual_tol", Kind::Number, 1e-12},
      {"passes", Kind::Integer, 2},
      {"relations.K", Kind::Integer, 6},
      {"relations.tol", Kind::Number, 1e-6},
  };
}

namespace {

// One sample per line: "re" or "re,im". Lines starting with '#' and a
// non-numeric first line (column names) are skipped.
gyro::TimeSeries read_signal(const std::filesystem::path& file, double dt) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: field 'input.file': cannot open '" + file.string() + "'");
  gyro::TimeSeries ts;
  ts.dt = dt;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    bool ok = true;
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        ok = ok && used == cell.size();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || vals.empty() || vals.size() > 2) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw gyro::DataError(file.string() + ":" + std::to_string(lineno) +
                            ": expected 're' or 're,im'");
    }
    header_allowed = false;
    ts.samples.emplace_back(vals[0], vals.size() > 1 ? vals[1] : 0.0);
  }
  return ts;
}

}  // namespace

void run_naff(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  gyro::TimeSeries ts;
  const std::string file = str(cfg, "input.file");
  if (!file.empty()) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = ctx.config_dir / p;
    ts = read_signal(p, num(cfg, "input.dt"));
  } else {
    const auto& terms = at(cfg, "synthetic.terms");
    const long long n = integer(cfg, "synthetic.samples");
    if (n < 1) throw ConfigError("config: field 'synthetic.samples': must be >= 1");
    ts.dt = num(cfg, "synthetic.dt");
    std::vector<std::array<double, 3>> spec;
    for (std::size_t i = 0; i < terms.size(); ++i)
      spec.push_back({object_number(terms[i], "synthetic.terms", i, "frequency"),
                      object_number(terms[i], "synthetic.terms", i, "amplitude"),
                      object_number(terms[i], "synthetic.terms", i, "phase")});
    const double noise = num(cfg, "synthetic.noise");
    SeededStream rng(prov.seed);
    for (long long k = 0; k < n; ++k) {
      std::complex<double> s = 0.0;
      for (const auto& [w, a, ph] : spec) s += std::polar(a, w * static_cast<double>(k) * ts.dt + ph);
      if (noise > 0.0) s += noise * std::complex<double>(rng.normal(), rng.normal());
      ts.samples.push_back(s);
    }
  }

  gyro::NaffOptions opt;
  opt.max_terms = static_cast<int>(integer(cfg, "max_terms"));
  opt.refine_tol = num(cfg, "refine_tol");
  opt.residual_tol = num(cfg, "residual_tol");
  opt.passes = static_cast<int>(integer(cfg, "passes"));
  const auto d = gyro::naff_extract(ts, opt);

  CsvWriter csv(ctx.out_dir / "naff.csv", prov, {"index", "frequency", "amplitude", "phase"});
  std::vector<double> freqs;
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    csv.row(i, d.terms[i].frequency, d.terms[i].amplitude, d.terms[i].phase);
    freqs.push_back(d.terms[i].frequency);
  }
  const auto td = gyro::torus_dimension(freqs, static_cast<int>(integer(cfg, "relations.K")),
                                        num(cfg, "relations.tol"));
  ojson body;
  body["samples"] = ts.samples.size();
  body["dt"] = ts.dt;
  body["terms"] = d.terms.size();
  body["residual_norm"] = d.residual_norm;
  body["torus_dimension"] = td.dim;
  body["basis"] = td.basis;
  write_json(ctx.out_dir / "naff.json", prov, body);
}

// ---------------------------------------------------------------------------
// monodromy

Schema monodromy_schema() {
  return {
      {"seed", Kind::Integer, 0},
      {"coefficients.lambda0", Kind::Number, 1.0},
      {"coefficients.mu1", Kind::Number, 0.0},
      {"coefficients.mu2", Kind::Number, -1.0},
      {"coefficients.b", Kind::Number, 1.0},
      {"coefficients.c1", Kind::Number, 0.1},
      {"coefficients.c2", Kind::Number, 0.05},
      {"loop.center", Kind::NumberArray, json::array({0.0, 0.0})},
      {"loop.radii", Kind::NumberArray, json::array({0.05, 0.05})},
      {"loop.vertices", Kind::Integer, 256},
      {"loop.polygon", Kind::PairArray, json::array()},
      {"loop.steps", Kind::Integer, 64},
      {"loop.turns", Kind::Integer, 1},
      {"loop.margin", Kind::Number, 1e-9},
      {"max_halvings", Kind::Integer, 12},
  };
}

void run_monodromy(const json& cfg, const Provenance& prov, const RunContext& ctx) {
  const gyro::NormalFormCoefficients c = coefficients_from(cfg, "coefficients");
  gyro::LoopSpec loop;
  const int steps = static_cast<int>(integer(cfg, "loop.steps"));
  const int turns = static_cast<int>(integer(cfg, "loop.turns"));
  const auto& poly = at(cfg, "loop.polygon");
  if (!poly.empty()) {
    for (const auto& p : poly) loop.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
    loop.steps = steps;
    loop.turns = turns;
  } else {
    const auto ctr = numbers(cfg, "loop.center"), rad = numbers(cfg, "loop.radii");
    if (ctr.size() != 2) throw ConfigError("config: field 'loop.center': expected 2 values");
    if (rad.size() != 2) throw ConfigError("config: field 'loop.radii': expected 2 values");
    loop = gyro::ellipse_loop(ctr[0], ctr[1], rad[0], rad[1], static_cast<int>(integer(cfg, "loop.vertices")),
                              steps, turns);
  }
  loop.margin = num(cfg, "loop.margin");
  loop.validate();

  const auto r = gyro::monodromy_around_thread(loop, c, ctx.workers, static_cast<int>(integer(cfg, "max_halvings")));

  CsvWriter csv(ctx.out_dir / "theta_branch.csv", prov, {"index", "s", "g", "theta_raw", "theta_branch"});
  ojson nodes = ojson::array();
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    const auto& n = r.log[i];
    csv.row(i, n.s, n.g, n.theta_raw, n.theta_branch);
    nodes.push_back({n.s, n.g, n.theta_branch});
  }
  ojson body;
  body["matrix"] = {{r.matrix[0][0], r.matrix[0][1]}, {r.matrix[1][0], r.matrix[1][1]}};
  body["winding"] = r.winding;
  body["theta_jump"] = r.theta_jump;
  body["refinements"] = r.refinements;
  body["nodes"] = nodes;
  write_json(ctx.out_dir / "monodromy.json", prov, body);
}

}  // namespace gyrolab
