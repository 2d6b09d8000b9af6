// End-to-end checks of the gyrolab executable: exit codes, provenance,
// determinism and the documented example runs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

Run gyrolab(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" GYROLAB_EXE "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& f) { return json::parse(slurp(f)); }

// Data rows of a CSV written by the tool (header comments and column line dropped).
std::vector<std::vector<std::string>> csv_rows(const fs::path& f, std::vector<std::string>* columns = nullptr) {
  std::ifstream in(f);
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("#", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header) {
      if (columns) *columns = cells;
      header = false;
      continue;
    }
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(GYRO_TEST_TMP) / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }

  std::string out(const std::string& sub) const { return "--out '" + (dir_ / sub).string() + "'"; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateAtVerticalEquilibriumIsConstant) {
  const auto cfg = write_config("c.json", {{"top", {{"a", 3.0}}}, {"t_end", 2.0}});
  const auto r = gyrolab("simulate --config '" + cfg.string() + "' " + out("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  std::vector<std::string> cols;
  const auto rows = csv_rows(dir_ / "o" / "trajectory.csv", &cols);
  ASSERT_EQ(cols.front(), "t");
  ASSERT_EQ(rows.size(), 201u);
  for (const auto& row : rows)
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_EQ(row[k], rows[0][k]) << cols[k];
  const json d = read_json(dir_ / "o" / "drift.json");
  EXPECT_EQ(d["max_abs_dH"].get<double>(), 0.0);
  EXPECT_EQ(d["t_final"].get<double>(), 2.0);
}

TEST_F(Cli, SimulateCoupledWritesOscillatorColumns) {
  const auto cfg = write_config("c.json", {{"top", {{"a", 3.0}}},
                                           {"t_end", 1.0},
                                           {"sample_every", 10},
                                           {"initial", {{"tilt", {0.05, 0.0}}}},
                                           {"oscillators", {{"omega", {1.3, 0.7}}, {"epsilon", 1e-3}}},
                                           {"integrator", {{"scheme", "splitting-2nd"}}}});
  const auto r = gyrolab("simulate --config '" + cfg.string() + "' " + out("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  std::vector<std::string> cols;
  const auto rows = csv_rows(dir_ / "o" / "trajectory.csv", &cols);
  EXPECT_EQ(cols, (std::vector<std::string>{"t", "u1", "u2", "u3", "v1", "v2", "v3", "x1", "x2", "y1", "y2", "H",
                                            "dH", "d_uu", "d_uv"}));
  EXPECT_EQ(rows.size(), 11u);
  EXPECT_LT(read_json(dir_ / "o" / "drift.json")["max_rel_dH"].get<double>(), 1e-6);
}

TEST_F(Cli, IdenticalRunsAreByteIdentical) {
  const auto cfg = write_config("c.json", {{"top", {{"a", 3.0}}}, {"t_end", 5.0}, {"initial", {{"tilt", {0.1, 0.02}}}}});
  for (const char* sub : {"a", "b"}) ASSERT_EQ(gyrolab("simulate --config '" + cfg.string() + "' " + out(sub)).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "b" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "drift.json"), slurp(dir_ / "b" / "drift.json"));

  // seeded commands
  for (const char* sub : {"n1", "n2"}) ASSERT_EQ(gyrolab("normal-form --seed 11 " + out(sub)).code, 0);
  EXPECT_EQ(slurp(dir_ / "n1" / "normal_form.json"), slurp(dir_ / "n2" / "normal_form.json"));
  const auto noisy = write_config("noise.json", {{"synthetic", {{"noise", 1e-3}}}});
  for (const char* sub : {"f1", "f2"})
    ASSERT_EQ(gyrolab("naff --seed 5 --config '" + noisy.string() + "' " + out(sub)).code, 0);
  EXPECT_EQ(slurp(dir_ / "f1" / "naff.csv"), slurp(dir_ / "f2" / "naff.csv"));
}

TEST_F(Cli, WorkerCountDoesNotChangeOutput) {
  const auto cfg = write_config("c.json", {{"grid", {21, 31}}});
  ASSERT_EQ(gyrolab("dioph-scan --workers 1 --config '" + cfg.string() + "' " + out("w1")).code, 0);
  ASSERT_EQ(gyrolab("dioph-scan --workers 4 --config '" + cfg.string() + "' " + out("w4")).code, 0);
  EXPECT_EQ(slurp(dir_ / "w1" / "dioph.csv"), slurp(dir_ / "w4" / "dioph.csv"));
  EXPECT_EQ(slurp(dir_ / "w1" / "dioph.json"), slurp(dir_ / "w4" / "dioph.json"));
}

TEST_F(Cli, SeedChangesRandomizedOutputAndHash) {
  ASSERT_EQ(gyrolab("normal-form --seed 1 " + out("s1")).code, 0);
  ASSERT_EQ(gyrolab("normal-form --seed 2 " + out("s2")).code, 0);
  const json a = read_json(dir_ / "s1" / "normal_form.json"), b = read_json(dir_ / "s2" / "normal_form.json");
  EXPECT_NE(a["provenance"]["config_hash"], b["provenance"]["config_hash"]);
  EXPECT_NE(a["generators"], b["generators"]);
  EXPECT_EQ(a["provenance"]["seed"].get<int>(), 1);
}

TEST_F(Cli, MissingRequiredFieldExitsTwoWithPath) {
  const auto cfg = write_config("c.json", {{"t_end", 1.0}});
  const auto r = gyrolab("simulate --config '" + cfg.string() + "' " + out("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("top.a"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "o" / "trajectory.csv"));
}

TEST_F(Cli, SchemaViolationsExitTwo) {
  const std::vector<std::pair<json, std::string>> bad{
      {{{"top", {{"a", "three"}}}, {"t_end", 1.0}}, "top.a"},
      {{{"top", {{"a", 3.0}, {"spin", 1.0}}}, {"t_end", 1.0}}, "top.spin"},
      {{{"top", 3.0}, {"t_end", 1.0}}, "top"},
      {{{"top", {{"a", 3.0}}}, {"t_end", 1.0}, {"sample_every", 1.5}}, "sample_every"},
      {{{"top", {{"a", 3.0}, {"c", -1.0}}}, {"t_end", 1.0}}, "c must be"},
      {{{"top", {{"a", 3.0}}}, {"t_end", 1.0}, {"integrator", {{"scheme", "euler"}}}}, "euler"},
  };
  for (std::size_t i = 0; i < bad.size(); ++i) {
    const auto cfg = write_config("bad" + std::to_string(i) + ".json", bad[i].first);
    const auto r = gyrolab("simulate --config '" + cfg.string() + "' " + out("o"));
    EXPECT_EQ(r.code, 2) << bad[i].first.dump() << "\n" << r.output;
    EXPECT_NE(r.output.find(bad[i].second), std::string::npos) << r.output;
  }
  std::ofstream(dir_ / "broken.json") << "{\"top\": ";
  EXPECT_EQ(gyrolab("simulate --config '" + (dir_ / "broken.json").string() + "'").code, 2);
  EXPECT_EQ(gyrolab("simulate --config '" + (dir_ / "absent.json").string() + "'").code, 2);
  EXPECT_EQ(gyrolab("no-such-command").code, 2);
  EXPECT_EQ(gyrolab("naff --workers 0").code, 2);
}

TEST_F(Cli, NumericFailureExitsThree) {
  const auto cfg = write_config("c.json", {{"unfolding", {{"lambda0", 1e-14}, {"mu1", 0.0}, {"mu2", 0.0}}}});
  const auto r = gyrolab("normal-form --config '" + cfg.string() + "' " + out("o"));
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("numerical failure"), std::string::npos) << r.output;
}

TEST_F(Cli, ProvenanceHeaders) {
  ASSERT_EQ(gyrolab("scan-spectrum " + out("o")).code, 0);
  const std::string csv = slurp(dir_ / "o" / "spectrum.csv");
  EXPECT_EQ(csv.rfind("# tool: gyrolab ", 0), 0u);
  EXPECT_NE(csv.find("# config_hash: fnv1a64:"), std::string::npos);
  EXPECT_NE(csv.find("# seed: 0"), std::string::npos);
  // every default is explicit in the header
  EXPECT_NE(csv.find("\"threshold_bracket\""), std::string::npos);

  const std::string js = slurp(dir_ / "o" / "spectrum.json");
  EXPECT_EQ(js.rfind("{\n  \"provenance\"", 0), 0u);
  const json j = json::parse(js);
  EXPECT_EQ(j["provenance"]["command"], "scan-spectrum");
  EXPECT_EQ(j["provenance"]["config"]["a"]["count"].get<int>(), 101);
  EXPECT_NE(csv.find(j["provenance"]["config_hash"].get<std::string>()), std::string::npos);
}

TEST_F(Cli, ConfigHashIgnoresSpellingOfNumbers) {
  const auto a = write_config("a.json", {{"top", {{"a", 3}}}, {"t_end", 1}});
  const auto b = write_config("b.json", {{"t_end", 1.0}, {"top", {{"a", 3.0}, {"c", 1.0}}}});
  ASSERT_EQ(gyrolab("simulate --config '" + a.string() + "' " + out("a")).code, 0);
  ASSERT_EQ(gyrolab("simulate --config '" + b.string() + "' " + out("b")).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "b" / "trajectory.csv"));
}

TEST_F(Cli, CsvNumbersRoundTrip) {
  ASSERT_EQ(gyrolab("scan-spectrum " + out("o")).code, 0);
  const auto rows = csv_rows(dir_ / "o" / "spectrum.csv");
  ASSERT_EQ(rows.size(), 101u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double a = i + 1 == rows.size() ? 2.5 : 1.5 + (2.5 - 1.5) * static_cast<double>(i) / 100.0;
    EXPECT_EQ(std::stod(rows[i][1]), a) << rows[i][1];
  }
}

TEST_F(Cli, ScanSpectrumFlipsOnceNearThreshold) {
  ASSERT_EQ(gyrolab("scan-spectrum " + out("o")).code, 0);
  const json j = read_json(dir_ / "o" / "spectrum.json");
  const auto& t = j["thresholds"][0];
  EXPECT_EQ(t["flips"].get<int>(), 1);
  EXPECT_NEAR(t["brackets"][0][0].get<double>(), 1.99, 1e-12);
  EXPECT_NEAR(t["brackets"][0][1].get<double>(), 2.01, 1e-12);
  for (const auto& row : csv_rows(dir_ / "o" / "spectrum.csv")) EXPECT_NEAR(std::stod(row[2]), 2.0, 1e-8);

  const auto multi = write_config("c.json", {{"c", {0.25, 4.0}}, {"a", {{"min", 0.1}, {"max", 6.0}, {"count", 60}}}});
  ASSERT_EQ(gyrolab("scan-spectrum --config '" + multi.string() + "' " + out("m")).code, 0);
  const json m = read_json(dir_ / "m" / "spectrum.json");
  EXPECT_NEAR(m["thresholds"][0]["a0"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(m["thresholds"][1]["a0"].get<double>(), 4.0, 1e-8);
  for (const auto& t2 : m["thresholds"]) EXPECT_EQ(t2["flips"].get<int>(), 1);
}

TEST_F(Cli, EmptyGridExitsTwo) {
  const auto a = write_config("a.json", {{"a", {{"count", 0}}}});
  const auto c = write_config("c.json", {{"c", json::array()}});
  EXPECT_EQ(gyrolab("scan-spectrum --config '" + a.string() + "' " + out("a")).code, 2);
  EXPECT_EQ(gyrolab("scan-spectrum --config '" + c.string() + "' " + out("c")).code, 2);
}

TEST_F(Cli, MonodromyDefaultLoopHasIntegerMatrix) {
  const auto r = gyrolab("monodromy " + out("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = read_json(dir_ / "o" / "monodromy.json");
  ASSERT_TRUE(j["matrix"][0][1].is_number_integer());
  EXPECT_EQ(j["matrix"], json::parse("[[1,1],[0,1]]"));
  EXPECT_EQ(j["winding"].get<int>(), 1);
  EXPECT_EQ(j["nodes"][0].size(), 3u);
  EXPECT_EQ(csv_rows(dir_ / "o" / "theta_branch.csv").size(), j["nodes"].size());
}

TEST_F(Cli, DiophScanHalfPlaneAsymmetry) {
  ASSERT_EQ(gyrolab("dioph-scan " + out("o")).code, 0);
  const json j = read_json(dir_ / "o" / "dioph.json");
  const auto& neg = j["mu2_negative"];
  const auto& pos = j["mu2_positive"];
  EXPECT_EQ(neg["uniform_columns"], neg["columns"]);
  EXPECT_LT(pos["uniform_columns"].get<int>(), pos["columns"].get<int>() / 2);
  EXPECT_LT(pos["fraction"].get<double>(), neg["fraction"].get<double>());
}

TEST_F(Cli, NormalFormRoundTripPreset) {
  ASSERT_EQ(gyrolab("normal-form " + out("o")).code, 0);
  const json j = read_json(dir_ / "o" / "normal_form.json");
  EXPECT_EQ(j["mode"], "round-trip");
  EXPECT_LT(j["max_coefficient_error"].get<double>(), 1e-6);
  EXPECT_GE(j["remainder"]["slope"].get<double>(), 4.7);
  EXPECT_EQ(j["criticality"], "Supercritical");
}

TEST_F(Cli, NormalFormExplicitHamiltonian) {
  // lambda S + N + mu2 M + 2b M^2 with lambda = 1, mu2 = -0.2, b = 0.5
  json terms = json::array({
      {{"exponent", {1, 0, 0, 1}}, {"coef", 1.0}},
      {{"exponent", {0, 1, 1, 0}}, {"coef", -1.0}},
      {{"exponent", {0, 0, 2, 0}}, {"coef", 0.5}},
      {{"exponent", {0, 0, 0, 2}}, {"coef", 0.5}},
      {{"exponent", {2, 0, 0, 0}}, {"coef", -0.1}},
      {{"exponent", {0, 2, 0, 0}}, {"coef", -0.1}},
      {{"exponent", {4, 0, 0, 0}}, {"coef", 0.25}},
      {{"exponent", {2, 2, 0, 0}}, {"coef", 0.5}},
      {{"exponent", {0, 4, 0, 0}}, {"coef", 0.25}},
  });
  const auto cfg = write_config("c.json", {{"unfolding", {{"lambda0", 1.0}, {"mu1", 0.0}, {"mu2", -0.2}}},
                                           {"hamiltonian", terms}});
  const auto r = gyrolab("normal-form --config '" + cfg.string() + "' " + out("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = read_json(dir_ / "o" / "normal_form.json");
  EXPECT_EQ(j["mode"], "explicit");
  EXPECT_NEAR(j["coefficients"]["b"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["coefficients"]["c1"].get<double>(), 0.0, 1e-12);
  EXPECT_FALSE(j.contains("truth"));

  const auto bad = write_config("bad.json", {{"hamiltonian", json::array({{{"exponent", {1, 0}}, {"coef", 1.0}}})}});
  const auto rb = gyrolab("normal-form --config '" + bad.string() + "' " + out("b"));
  EXPECT_EQ(rb.code, 2);
  EXPECT_NE(rb.output.find("hamiltonian[0].exponent"), std::string::npos) << rb.output;
}

TEST_F(Cli, NaffSyntheticAndFileInput) {
  ASSERT_EQ(gyrolab("naff " + out("o")).code, 0);
  const json j = read_json(dir_ / "o" / "naff.json");
  EXPECT_EQ(j["terms"].get<int>(), 3);
  EXPECT_EQ(j["torus_dimension"].get<int>(), 3);

  {
    std::ofstream f(dir_ / "signal.csv");
    f << "# two tones\nre,im\n";
    for (int k = 0; k < 2048; ++k) {
      const double t = 0.25 * k;
      f.precision(17);
      f << std::cos(1.1 * t) + 0.5 * std::cos(0.3 * t) << "," << std::sin(1.1 * t) + 0.5 * std::sin(0.3 * t)
        << "\n";
    }
  }
  const auto cfg = write_config("c.json", {{"input", {{"file", "signal.csv"}, {"dt", 0.25}}}});
  ASSERT_EQ(gyrolab("naff --config '" + cfg.string() + "' " + out("f")).code, 0);
  const auto rows = csv_rows(dir_ / "f" / "naff.csv");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_NEAR(std::stod(rows[0][1]), 1.1, 1e-8);
  EXPECT_NEAR(std::stod(rows[1][1]), 0.3, 1e-8);

  {
    std::ofstream f(dir_ / "junk.csv");
    f << "re\n1.0\nabc\n";
  }
  const auto junk = write_config("j.json", {{"input", {{"file", "junk.csv"}}}});
  EXPECT_EQ(gyrolab("naff --config '" + junk.string() + "' " + out("j")).code, 2);
}

TEST_F(Cli, StrataOutputs) {
  const auto cfg = write_config("c.json", {{"classify", {{"points", {{0.0, 0.0}, {0.0, -5.0}}}}}});
  ASSERT_EQ(gyrolab("strata --config '" + cfg.string() + "' " + out("o")).code, 0);
  std::vector<std::string> cols;
  const auto surf = csv_rows(dir_ / "o" / "critical_surface.csv", &cols);
  EXPECT_EQ(cols, (std::vector<std::string>{"mu2", "s", "g", "M", "label"}));
  EXPECT_FALSE(surf.empty());
  const auto top = csv_rows(dir_ / "o" / "top_equilibria.csv");
  EXPECT_EQ(top.size(), 20u * 60u);
  const auto cl = csv_rows(dir_ / "o" / "classified.csv");
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0][3], "Thread");
  EXPECT_EQ(cl[1][3], "Outside");

  const auto sub = write_config("s.json", {{"coefficients", {{"b", -1.0}}}});
  EXPECT_EQ(gyrolab("strata --config '" + sub.string() + "' " + out("s")).code, 2);
}

TEST_F(Cli, PersistenceSmallGrid) {
  const auto cfg = write_config("c.json", {{"tori", {{"du1", {{"min", 0.02}, {"max", 0.04}, {"count", 2}}}, {"x0", {0.0}}}},
                                           {"epsilons", {0.0, 1e-3}},
                                           {"window_time", 200.0}});
  ASSERT_EQ(gyrolab("persistence --config '" + cfg.string() + "' " + out("o")).code, 0);
  const json j = read_json(dir_ / "o" / "persistence.json");
  EXPECT_EQ(j["tori"].get<int>(), 2);
  EXPECT_EQ(j["survival"][0]["fraction"].get<double>(), 1.0);
  EXPECT_EQ(csv_rows(dir_ / "o" / "persistence.csv").size(), 4u);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const fs::path target = dir_ / "env_out";
  const auto r = gyrolab("monodromy", "GYROLAB_OUT_DIR='" + target.string() + "'");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(target / "monodromy.json"));
}

TEST_F(Cli, PrintConfigShowsDefaults) {
  const auto r = gyrolab("persistence --print-config");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.output);
  EXPECT_EQ(j["integrator"]["scheme"], "splitting-2nd");
  EXPECT_EQ(j["epsilons"].size(), 4u);
}
