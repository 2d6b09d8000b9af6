// gyrolab: command-line front end. Exit codes: 0 success, 2 configuration
// error, 3 numerical failure.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "gyro/errors.hpp"
#include "gyro/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string config;
  std::string out;
  unsigned workers = gyro::default_workers();
  std::optional<long long> seed;
  bool print_config = false;
};

int run(const gyrolab::Command& cmd, const Options& opt) {
  namespace fs = std::filesystem;
  using gyrolab::json;
  json user = json::object();
  fs::path config_dir = fs::current_path();
  if (!opt.config.empty()) {
    user = gyrolab::load_config_file(opt.config);
    config_dir = fs::absolute(opt.config).parent_path();
  }
  if (opt.seed) {
    if (!user.is_object()) throw gyrolab::ConfigError("config: top level must be a JSON object");
    user["seed"] = *opt.seed;
  }
  const json cfg = gyrolab::resolve(cmd.schema(), user);
  if (cfg["seed"].get<long long>() < 0) throw gyrolab::ConfigError("config: field 'seed': must be >= 0");
  if (opt.print_config) {
    std::cout << cfg.dump(2) << "\n";
    return 0;
  }

  gyrolab::RunContext ctx;
  if (!opt.out.empty())
    ctx.out_dir = opt.out;
  else if (const char* env = std::getenv("GYROLAB_OUT_DIR"); env && *env)
    ctx.out_dir = env;
  else
    ctx.out_dir = ".";
  ctx.config_dir = config_dir;
  ctx.workers = std::max(1u, opt.workers);
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw gyro::Error("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());

  const gyrolab::Provenance prov{cmd.name, cfg, cfg["seed"].get<std::uint64_t>()};
  cmd.run(cfg, prov, ctx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gyrolab: Lagrange top stability, normal forms and torus persistence"};
  app.set_version_flag("--version", std::string("gyrolab ") + GYROLAB_VERSION);
  app.require_subcommand(1);

  Options opt;
  const gyrolab::Command* chosen = nullptr;
  for (const auto& cmd : gyrolab::commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.summary);
    sub->add_option("--config", opt.config, "JSON configuration file (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: $GYROLAB_OUT_DIR or .)");
    sub->add_option("--workers", opt.workers, "worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed for randomized sampling, overrides the config")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--print-config", opt.print_config, "print the resolved configuration and exit");
    sub->callback([&chosen, &cmd] { chosen = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    return run(*chosen, opt);
  } catch (const gyrolab::ConfigError& e) {
    std::cerr << "gyrolab " << chosen->name << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const gyro::InputError& e) {
    std::cerr << "gyrolab " << chosen->name << ": invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gyro::NumericError& e) {
    std::cerr << "gyrolab " << chosen->name << ": numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "gyrolab " << chosen->name << ": error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
