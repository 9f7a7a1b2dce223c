#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "beamctl/config.hpp"

namespace beamctl {

struct CommandOutcome {
  int status = 0;  // 0 ok, 1 an asserted invariant failed
  std::vector<std::string> failures;
  std::vector<std::filesystem::path> files;
};

/// Runs one command and writes its artifacts under cfg.out. Human-readable
/// progress (including wall-clock times) goes to `log`, never to the files.
CommandOutcome run_command(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace beamctl
