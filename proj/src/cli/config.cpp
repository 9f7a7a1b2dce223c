#include "beamctl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace beamctl {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::set<std::string>& allowed_keys(Command command) {
  static const std::set<std::string> simulate = {
      "M", "T", "xi", "data", "data.a", "data.beta", "grid", "forcing.mode",
      "forcing.omega", "forcing.amp", "field.nx", "field.nt", "out", "seed", "threads"};
  static const std::set<std::string> observability = {
      "M", "T", "xi", "n", "mass_modes", "kernel.step", "kernel.tmax", "plot.step",
      "out", "seed", "threads"};
  static const std::set<std::string> strategic = {"xi", "check_m", "out", "seed",
                                                  "threads"};
  static const std::set<std::string> control = {
      "M", "T", "xi", "region", "n", "epsilon", "tolerance", "grid", "data",
      "data.a", "data.beta", "out", "seed", "threads"};
  static const std::set<std::string> sweep = {
      "M", "T", "xi", "n_list", "epsilon", "tolerance", "grid", "data", "data.a",
      "data.beta", "battery_size", "scaling.mode", "scaling.margin", "out", "seed",
      "threads"};
  switch (command) {
    case Command::Simulate: return simulate;
    case Command::Observability: return observability;
    case Command::StrategicCheck: return strategic;
    case Command::Control: return control;
    case Command::Sweep: return sweep;
  }
  return simulate;
}

template <class Int>
Int to_int(const Entry& e, const std::string& key) {
  Int v{};
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(e.line, key + ": expected an integer, got '" + e.value + "'");
  }
  return v;
}

double to_double(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(line, key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::vector<std::string> items;
  for (std::string item; in >> item;) items.push_back(item);
  return items;
}

std::vector<double> to_doubles(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_list(e.value)) {
    out.push_back(to_double(item, e.line, key));
  }
  return out;
}

Rational to_rational(const Entry& e) {
  const auto slash = e.value.find('/');
  if (slash == std::string::npos) {
    throw ConfigError(e.line, "xi: expected a rational p/q, got '" + e.value + "'");
  }
  Entry num{trim(e.value.substr(0, slash)), e.line};
  Entry den{trim(e.value.substr(slash + 1)), e.line};
  Rational r{to_int<std::int64_t>(num, "xi"), to_int<std::int64_t>(den, "xi")};
  if (r.den <= 0 || r.num < 0 || r.num > r.den) {
    throw ConfigError(e.line, "xi: need 0 <= p <= q, got '" + e.value + "'");
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what),
      line_(line) {}

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "observability") return Command::Observability;
  if (name == "strategic-check") return Command::StrategicCheck;
  if (name == "control") return Command::Control;
  if (name == "sweep") return Command::Sweep;
  return std::nullopt;
}

std::string command_name(Command command) {
  switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Observability: return "observability";
    case Command::StrategicCheck: return "strategic-check";
    case Command::Control: return "control";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

ExperimentConfig parse_config(Command command, const std::string& text) {
  std::map<std::string, Entry> entries;
  const std::set<std::string>& allowed = allowed_keys(command);
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!allowed.count(key)) {
      throw ConfigError(line_no, "unknown key '" + key + "' for command " +
                                     command_name(command));
    }
    if (value.empty()) throw ConfigError(line_no, key + ": empty value");
    if (entries.count(key)) {
      throw ConfigError(line_no, "duplicate key '" + key + "' (first on line " +
                                     std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, line_no};
  }

  ExperimentConfig cfg;
  cfg.command = command;
  auto get = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto positive_int = [&](const std::string& key, int& target, int min) {
    if (const Entry* e = get(key)) {
      target = to_int<int>(*e, key);
      if (target < min) {
        throw ConfigError(e->line, key + ": must be >= " + std::to_string(min));
      }
    }
  };
  auto positive_double = [&](const std::string& key, double& target) {
    if (const Entry* e = get(key)) {
      target = to_double(e->value, e->line, key);
      if (!(target > 0.0)) throw ConfigError(e->line, key + ": must be > 0");
    }
  };

  positive_int("M", cfg.M, 1);
  positive_double("T", cfg.T);
  positive_int("threads", cfg.threads, 1);
  positive_int("grid", cfg.grid, 2);
  if (const Entry* e = get("seed")) cfg.seed = to_int<std::uint64_t>(*e, "seed");
  if (const Entry* e = get("out")) cfg.out = e->value;

  const Entry* xi = get("xi");
  if (!xi) throw ConfigError(0, "missing required key 'xi'");
  if (command == Command::Simulate && xi->value.find('/') == std::string::npos) {
    cfg.xi = to_double(xi->value, xi->line, "xi");
    if (cfg.xi < 0.0 || cfg.xi > 1.0) throw ConfigError(xi->line, "xi: must lie in [0, 1]");
  } else {
    cfg.xi_rational = to_rational(*xi);
    cfg.xi = cfg.xi_rational->value();
  }

  if (const Entry* e = get("region")) {
    if (e->value == "pointwise") {
      cfg.pointwise = true;
    } else if (e->value != "internal") {
      throw ConfigError(e->line, "region: expected internal or pointwise");
    }
  }
  const bool needs_n = command == Command::Observability ||
                       (command == Command::Control && !cfg.pointwise);
  if (const Entry* e = get("n")) {
    positive_int("n", cfg.n, 1);
    if (!needs_n) throw ConfigError(e->line, "n: not used with region = pointwise");
  } else if (needs_n) {
    throw ConfigError(0, "missing required key 'n'");
  }
  if (needs_n) {
    const Entry* e = get("n");
    const Rational& r = *cfg.xi_rational;
    // xi + 1/n <= 1, exactly
    if (r.num * cfg.n + r.den > r.den * static_cast<std::int64_t>(cfg.n)) {
      throw ConfigError(e->line, "window [xi, xi + 1/n] leaves (0, 1)");
    }
  }

  if (command == Command::Sweep) {
    const Entry* e = get("n_list");
    if (!e) throw ConfigError(0, "missing required key 'n_list'");
    for (const std::string& item : split_list(e->value)) {
      const int n = to_int<int>(Entry{item, e->line}, "n_list");
      if (n < 1) throw ConfigError(e->line, "n_list: entries must be >= 1");
      if (!cfg.n_list.empty() && n <= cfg.n_list.back()) {
        throw ConfigError(e->line, "n_list: must be strictly increasing");
      }
      cfg.n_list.push_back(n);
    }
    if (cfg.n_list.empty()) throw ConfigError(e->line, "n_list: empty");
    const Rational& r = *cfg.xi_rational;
    if (r.num * cfg.n_list.front() + r.den >
        r.den * static_cast<std::int64_t>(cfg.n_list.front())) {
      throw ConfigError(e->line, "window [xi, xi + 1/n] leaves (0, 1) for the first n");
    }
  }

  if (const Entry* e = get("epsilon")) {
    cfg.epsilon = to_double(e->value, e->line, "epsilon");
    if (*cfg.epsilon < 0.0) throw ConfigError(e->line, "epsilon: must be >= 0");
  }
  positive_double("tolerance", cfg.tolerance);
  positive_int("field.nx", cfg.field_nx, 2);
  positive_int("field.nt", cfg.field_nt, 2);
  positive_int("mass_modes", cfg.mass_modes, 1);
  positive_double("kernel.step", cfg.kernel_step);
  positive_double("kernel.tmax", cfg.kernel_tmax);
  positive_double("plot.step", cfg.plot_step);
  positive_int("check_m", cfg.check_m, 0);
  positive_int("battery_size", cfg.battery_size, 1);
  if (const Entry* e = get("scaling.mode")) {
    if (e->value != "auto" && e->value != "general" && e->value != "strategic") {
      throw ConfigError(e->line, "scaling.mode: expected auto, general or strategic");
    }
    cfg.scaling_mode = e->value;
  }
  if (const Entry* e = get("scaling.margin")) {
    cfg.scaling_margin = to_double(e->value, e->line, "scaling.margin");
    if (cfg.scaling_margin < 0.0) throw ConfigError(e->line, "scaling.margin: must be >= 0");
  }

  if (get("forcing.mode") || get("forcing.omega") || get("forcing.amp")) {
    ForcingSpec f;
    const Entry* mode = get("forcing.mode");
    if (!mode) {
      const Entry* any = get("forcing.omega") ? get("forcing.omega") : get("forcing.amp");
      throw ConfigError(any->line, "forcing.* needs forcing.mode");
    }
    f.mode = to_int<int>(*mode, "forcing.mode");
    if (f.mode < 0 || f.mode >= cfg.M) {
      throw ConfigError(mode->line, "forcing.mode: must lie in [0, M)");
    }
    if (const Entry* e = get("forcing.omega")) {
      f.omega = to_double(e->value, e->line, "forcing.omega");
      if (f.omega < 0.0) throw ConfigError(e->line, "forcing.omega: must be >= 0");
    }
    f.amp = 1.0;
    if (const Entry* e = get("forcing.amp")) f.amp = to_double(e->value, e->line, "forcing.amp");
    cfg.forcing = f;
  }

  // initial data
  if (command != Command::StrategicCheck && command != Command::Observability) {
    cfg.data = ModalState::zero(cfg.M);
    const Entry* data = get("data");
    const Entry* da = get("data.a");
    const Entry* db = get("data.beta");
    std::string preset = data ? data->value : (da || db ? "coeffs" : "smooth-decay");
    if (preset != "coeffs" && (da || db)) {
      const Entry* e = da ? da : db;
      throw ConfigError(e->line, "data.a / data.beta need data = coeffs");
    }
    const int line = data ? data->line : 0;
    if (preset == "smooth-decay") {
      for (int m = 0; m < cfg.M; ++m) cfg.data.a[m] = 1.0 / ((m + 1.0) * (m + 1.0));
    } else if (preset.rfind("single-mode", 0) == 0) {
      const Entry k_entry{trim(preset.substr(11)), line};
      if (k_entry.value.empty()) throw ConfigError(line, "data: single-mode needs k");
      const int k = to_int<int>(k_entry, "data");
      if (k < 0 || k >= cfg.M) throw ConfigError(line, "data: single-mode k must lie in [0, M)");
      cfg.data.a[k] = 1.0;
    } else if (preset == "coeffs") {
      if (!da && !db) throw ConfigError(line, "data = coeffs needs data.a or data.beta");
      auto fill = [&](const Entry* e, Eigen::VectorXd& target, const std::string& key) {
        if (!e) return;
        const std::vector<double> values = to_doubles(*e, key);
        if (static_cast<int>(values.size()) > cfg.M) {
          throw ConfigError(e->line, key + ": more than M coefficients");
        }
        for (std::size_t m = 0; m < values.size(); ++m) target[m] = values[m];
      };
      fill(da, cfg.data.a, "data.a");
      fill(db, cfg.data.beta, "data.beta");
    } else {
      throw ConfigError(line, "data: unknown preset '" + preset + "'");
    }
    cfg.data_label = preset;
  }
  return cfg;
}

ExperimentConfig load_config(Command command, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(command, buf.str());
}

}  // namespace beamctl
