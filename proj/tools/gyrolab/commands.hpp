#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "gyro/integrator.hpp"
#include "gyro/normalform.hpp"

namespace gyrolab {

struct RunContext {
  std::filesystem::path out_dir;
  std::filesystem::path config_dir;  // relative input paths resolve here
  unsigned workers = 1;
};

struct Command {
  std::string name;
  std::string summary;
  Schema (*schema)();
  void (*run)(const json& cfg, const Provenance& prov, const RunContext& ctx);
};

const std::vector<Command>& commands();

// Individual commands, split across translation units.
Schema simulate_schema();
void run_simulate(const json&, const Provenance&, const RunContext&);
Schema scan_spectrum_schema();
void run_scan_spectrum(const json&, const Provenance&, const RunContext&);
Schema strata_schema();
void run_strata(const json&, const Provenance&, const RunContext&);
Schema persistence_schema();
void run_persistence(const json&, const Provenance&, const RunContext&);
Schema normal_form_schema();
void run_normal_form(const json&, const Provenance&, const RunContext&);
Schema dioph_scan_schema();
void run_dioph_scan(const json&, const Provenance&, const RunContext&);
Schema naff_schema();
void run_naff(const json&, const Provenance&, const RunContext&);
Schema monodromy_schema();
void run_monodromy(const json&, const Provenance&, const RunContext&);

// helpers shared by the command files
Eigen::VectorXd to_eigen(const std::vector<double>& v);
gyro::IntegratorConfig integrator_from(const json& cfg, const std::string& prefix);
gyro::NormalFormCoefficients coefficients_from(const json& cfg, const std::string& prefix);

}  // namespace gyrolab
