#pragma once

// Flat `key = value` experiment configs. One key per line, '#' starts a
// comment, blank lines are ignored. Keys are typed and checked per command;
// anything unknown or malformed raises ConfigError with the line number.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/modal_space.hpp"

namespace beamctl {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

enum class Command { Simulate, Observability, StrategicCheck, Control, Sweep };

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command command);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Single-term modal forcing amp * cos(omega t) * sin(mu_mode x) for simulate.
struct ForcingSpec {
  int mode = 0;
  double omega = 0.0;
  double amp = 0.0;
};

struct ExperimentConfig {
  Command command = Command::Simulate;
  int M = 16;
  double T = kDefaultHorizon;
  double xi = 0.5;
  std::optional<Rational> xi_rational;  // set whenever xi was given as p/q
  bool pointwise = false;               // control: region = pointwise
  int n = 0;
  std::vector<int> n_list;
  std::optional<double> epsilon;
  double tolerance = 1e-6;
  int grid = 0;  // 0: default_trace_grid(M, T)
  ModalState data;
  std::string data_label = "smooth-decay";
  std::uint64_t seed = 2026;
  std::string out = ".";
  int threads = 0;  // 0: OpenMP default

  // simulate
  std::optional<ForcingSpec> forcing;
  int field_nx = 65;
  int field_nt = 101;

  // observability
  int mass_modes = 0;  // 0: M
  double kernel_step = 0.01;
  double kernel_tmax = 10.0;
  double plot_step = 0.05;

  // strategic-check
  int check_m = 10000;

  // sweep
  int battery_size = 8;
  std::string scaling_mode = "auto";  // auto | general | strategic
  double scaling_margin = 0.2;
};

/// Parses `text` for `command`. The data preset is resolved against M after
/// all keys are read, so key order does not matter.
ExperimentConfig parse_config(Command command, const std::string& text);
ExperimentConfig load_config(Command command, const std::string& path);

}  // namespace beamctl
