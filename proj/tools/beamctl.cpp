#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "beamctl/commands.hpp"
#include "beamctl/config.hpp"
#include "beamctl/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral exact-controllability toolkit for the Euler-Bernoulli beam"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  long long seed = -1;

  for (const char* name : {"simulate", "observability", "strategic-check", "control", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "OpenMP threads (overrides config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized runs (overrides config)")
        ->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    beamctl::ExperimentConfig cfg =
        beamctl::load_config(*beamctl::parse_command(name), config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    const beamctl::CommandOutcome outcome = beamctl::run_command(cfg, std::cerr);
    for (const auto& f : outcome.files) std::cout << f.string() << "\n";
    for (const auto& what : outcome.failures) {
      std::cerr << "beamctl " << name << ": FAILED " << what << "\n";
    }
    return outcome.status;
  } catch (const beamctl::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const beamctl::InvalidArgument& e) {
    std::cerr << "beamctl " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const beamctl::InvalidRegion& e) {
    std::cerr << "beamctl " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "beamctl " << name << ": " << e.what() << "\n";
    return 1;
  }
}
