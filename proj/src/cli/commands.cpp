#include "beamctl/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "beamctl/errors.hpp"
#include "beamctl/hum_control.hpp"
#include "beamctl/kernels.hpp"
#include "beamctl/limit_lab.hpp"
#include "beamctl/observability.hpp"
#include "beamctl/plot.hpp"
#include "json.hpp"

namespace beamctl {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    row(cells);
  }

 private:
  std::ofstream out_;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : json(nullptr);
}

json xi_json(const ExperimentConfig& cfg) {
  if (cfg.xi_rational) {
    return {{"num", cfg.xi_rational->num}, {"den", cfg.xi_rational->den},
            {"value", cfg.xi}};
  }
  return {{"value", cfg.xi}};
}

json data_json(const ModalState& s) {
  return {{"a", std::vector<double>(s.a.data(), s.a.data() + s.a.size())},
          {"beta", std::vector<double>(s.beta.data(), s.beta.data() + s.beta.size())}};
}

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg, CommandOutcome& outcome)
      : dir_(cfg.out), outcome_(outcome) {
    fs::create_directories(dir_);
  }
  fs::path path(const std::string& name) {
    outcome_.files.push_back(dir_ / name);
    return dir_ / name;
  }
  void text(const std::string& name, const std::string& body) {
    std::ofstream out(path(name));
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
  }
  void write_json(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  CommandOutcome& outcome_;
};

void fail(CommandOutcome& outcome, const std::string& what) {
  outcome.status = 1;
  outcome.failures.push_back(what);
}

int trace_grid(const ExperimentConfig& cfg) {
  return cfg.grid > 0 ? cfg.grid : default_trace_grid(cfg.M, cfg.T);
}

std::vector<double> time_axis(double T, int grid) {
  std::vector<double> t(grid);
  for (int k = 0; k < grid; ++k) t[k] = T * k / (grid - 1);
  return t;
}

// --------------------------------------------------------------- simulate

void simulate(const ExperimentConfig& cfg, CommandOutcome& outcome, std::ostream& log) {
  Artifacts files(cfg, outcome);
  const int M = cfg.M;
  ControlField forcing = ControlField::zero(M);
  if (cfg.forcing) {
    forcing.frequencies = {cfg.forcing->omega};
    forcing.cos_amp = Eigen::MatrixXd::Zero(M, 1);
    forcing.sin_amp = Eigen::MatrixXd::Zero(M, 1);
    forcing.cos_amp(cfg.forcing->mode, 0) = cfg.forcing->amp;
  }
  const std::vector<TrigSeries> modes = trajectory(cfg.data, forcing, M);
  TrigSeries u_xi;
  for (int m = 0; m < M; ++m) {
    u_xi.append(modes[m], std::sin(spatial_frequency(m) * cfg.xi));
  }
  u_xi = u_xi.simplified();

  const int grid = trace_grid(cfg);
  const std::vector<double> t = time_axis(cfg.T, grid);
  const std::vector<double> u = kernels::sample_series(u_xi, cfg.T, grid);
  {
    Csv csv(files.path("trace.csv"), {"t", "u_xi"});
    for (int k = 0; k < grid; ++k) csv.row({t[k], u[k]});
  }
  {
    Csv csv(files.path("field.csv"), {"t", "x", "u"});
    std::vector<double> y(M);
    for (int i = 0; i < cfg.field_nt; ++i) {
      const double ti = cfg.T * i / (cfg.field_nt - 1);
      for (int m = 0; m < M; ++m) y[m] = modes[m](ti);
      for (int j = 0; j < cfg.field_nx; ++j) {
        const double x = static_cast<double>(j) / (cfg.field_nx - 1);
        csv.row({ti, x, reconstruct(std::span<const double>(y), x)});
      }
    }
  }
  Plot plot;
  plot.title = "u(xi, t), xi = " + format_number(cfg.xi);
  plot.x_label = "t";
  plot.y_label = "u(xi, t)";
  plot.series.push_back({"u(xi, t)", t, u});
  files.text("trace.svg", render_svg(plot));
  log << "simulate: " << grid << " trace samples, " << cfg.field_nt * cfg.field_nx
      << " field samples\n";
}

// ---------------------------------------------------------- observability

void observability(const ExperimentConfig& cfg, CommandOutcome& outcome,
                   std::ostream& log) {
  Artifacts files(cfg, outcome);
  const int n = cfg.n;
  const int mass_modes = cfg.mass_modes > 0 ? cfg.mass_modes : cfg.M;
  const WindowMassDiagnostics wm = window_mass_diagnostics(cfg.xi, n, mass_modes);
  {
    Csv csv(files.path("window_mass.csv"),
            {"m", "mass", "lower_bound", "scaled_mass", "rescaled_kernel", "bound_violated"});
    for (const WindowMassRow& r : wm.rows) {
      const double b = (2.0 * r.m + 1.0) * cfg.xi / 2.0;
      const double t = (2.0 * r.m + 1.0) / (2.0 * n);
      csv.row({std::to_string(r.m), format_number(r.mass), format_number(r.lower_bound),
               format_number(r.scaled_mass), format_number(overlap_kernel(b, t)),
               r.bound_violated ? "1" : "0"});
    }
  }

  const std::vector<double> bs = kernels::open_unit_grid(cfg.kernel_step);
  const std::vector<double> ts = kernels::positive_grid(cfg.kernel_step, cfg.kernel_tmax);
  const auto start = std::chrono::steady_clock::now();
  const kernels::BoundSweepTally tally = kernels::inverse_bound_sweep(bs, ts);
  const double sweep_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::vector<double> plot_b = kernels::open_unit_grid(cfg.plot_step);
  const std::vector<double> plot_t = kernels::positive_grid(cfg.plot_step, cfg.kernel_tmax);
  std::vector<double> min_i, bound;
  {
    Csv csv(files.path("kernel.csv"), {"b", "t", "I", "bound"});
    for (double b : plot_b) {
      const double rhs = kInverseBoundConstant * std::pow(std::sin(std::numbers::pi * b), 2);
      double lowest = std::numeric_limits<double>::infinity();
      for (double t : plot_t) {
        const double I = overlap_kernel(b, t);
        lowest = std::min(lowest, I);
        csv.row({b, t, I, rhs});
      }
      min_i.push_back(lowest);
      bound.push_back(rhs);
    }
  }

  const InternalRegion internal{cfg.xi, n};
  const double lambda_internal = observability_constant(internal, cfg.T, cfg.M);
  const double lambda_point = observability_constant(PointwiseRegion{cfg.xi}, cfg.T, cfg.M);
  const StrategicReport strategic =
      strategic_check(cfg.xi_rational->num, cfg.xi_rational->den);
  {
    Csv csv(files.path("constants.csv"), {"name", "value"});
    auto put = [&](const std::string& name, double v) { csv.row({name, format_number(v)}); };
    put("inverse_bound_constant", kInverseBoundConstant);
    put("inverse_bound_points", static_cast<double>(tally.points));
    put("inverse_bound_violations", static_cast<double>(tally.violations));
    put("inverse_bound_min_slack", tally.min_slack);
    put("inverse_bound_worst_b", tally.worst_b);
    put("inverse_bound_worst_t", tally.worst_t);
    put("window_mass_lower_bound", window_mass_lower_bound(n));
    put("window_mass_infimum", wm.infimum);
    put("window_mass_argmin_m", wm.argmin_m);
    put("window_mass_bound_violations", wm.violations);
    put("observability_constant_internal", lambda_internal);
    put("observability_constant_pointwise", lambda_point);
    put("strategic", strategic.strategic ? 1.0 : 0.0);
  }

  Plot plot;
  plot.title = "min over t of I(b, t) against c sin^2(pi b)";
  plot.x_label = "b";
  plot.y_label = "I";
  plot.series.push_back({"min_t I(b, t)", plot_b, min_i});
  plot.series.push_back({"c sin^2(pi b)", plot_b, bound, "#d62728", true});
  files.text("kernel.svg", render_svg(plot));

  log << "observability: " << tally.points << " grid points in " << sweep_seconds
      << " s, " << tally.violations << " violations; window-mass bound violated for "
      << wm.violations << " of " << mass_modes << " modes (diagnostic)\n";
  if (tally.violations > 0) {
    fail(outcome, "inverse_bound_violations = " + std::to_string(tally.violations) +
                      " (worst b = " + format_number(tally.worst_b) +
                      ", t = " + format_number(tally.worst_t) + ")");
  }
}

// -------------------------------------------------------- strategic-check

void strategic(const ExperimentConfig& cfg, CommandOutcome& outcome, std::ostream& log) {
  Artifacts files(cfg, outcome);
  const StrategicReport r = strategic_check(cfg.xi_rational->num, cfg.xi_rational->den);
  double direct_min = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= cfg.check_m; ++m) {
    direct_min = std::min(direct_min, std::abs(std::sin(spatial_frequency(m) * cfg.xi)));
  }
  // sin(mu_m xi) in floating point carries ~eps * mu_m of argument rounding
  const double slack =
      1e-12 + 8.0 * std::numeric_limits<double>::epsilon() * spatial_frequency(cfg.check_m);
  json j = {{"schema", "beamctl/1"},
            {"kind", "strategic_report"},
            {"xi", xi_json(cfg)},
            {"strategic", r.strategic},
            {"witness_m", r.witness_m ? json(*r.witness_m) : json(nullptr)},
            {"lower_bound", optional_number(r.lower_bound)},
            {"direct_min", number(direct_min)},
            {"direct_checked_m", cfg.check_m},
            {"direct_slack", slack}};
  files.write_json("strategic.json", j);
  log << "strategic-check: xi = " << cfg.xi_rational->num << "/" << cfg.xi_rational->den
      << (r.strategic ? " is strategic" : " is not strategic") << "\n";
  if (r.lower_bound && direct_min < *r.lower_bound - slack) {
    fail(outcome, "direct_min = " + format_number(direct_min) + " below lower_bound = " +
                      format_number(*r.lower_bound));
  }
}

// ---------------------------------------------------------------- control

void control(const ExperimentConfig& cfg, CommandOutcome& outcome, std::ostream& log) {
  Artifacts files(cfg, outcome);
  const ControlRegion region = cfg.pointwise ? ControlRegion{PointwiseRegion{cfg.xi}}
                                             : ControlRegion{InternalRegion{cfg.xi, cfg.n}};
  const ControlProblem problem{region, cfg.T, cfg.data, cfg.M, cfg.epsilon, cfg.tolerance};
  const auto start = std::chrono::steady_clock::now();
  const HumSolution sol = solve_hum(problem);
  const ControlField g = synthesize_control(sol.adjoint0, region, cfg.T);
  const NullControlReport report = verify_null_control(problem, g);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const int grid = trace_grid(cfg);
  const std::vector<double> t = time_axis(cfg.T, grid);
  const TrigSeries phi = trace_series(sol.adjoint0, cfg.xi);
  const std::vector<double> phi_xi = kernels::sample_series(phi, cfg.T, grid);
  Plot plot;
  plot.x_label = "t";
  if (cfg.pointwise) {
    Csv csv(files.path("control.csv"), {"t", "v"});
    for (int k = 0; k < grid; ++k) csv.row({t[k], phi_xi[k]});
    plot.title = "pointwise control v(t) at xi = " + format_number(cfg.xi);
    plot.y_label = "v(t)";
    plot.series.push_back({"v(t)", t, phi_xi});
  } else {
    const TrigSeries eff = effective_trace_series(sol.adjoint0, cfg.xi, cfg.n);
    const std::vector<double> eff_s = kernels::sample_series(eff, cfg.T, grid);
    const double centre = cfg.xi + 0.5 / cfg.n;
    Csv csv(files.path("control.csv"), {"t", "phi_xi", "effective_trace", "g_centre"});
    std::vector<double> g_centre(grid);
    for (int k = 0; k < grid; ++k) {
      g_centre[k] = g.field_value(centre, t[k]);
      csv.row({t[k], phi_xi[k], eff_s[k], g_centre[k]});
    }
    plot.title = "internal control on [xi, xi + 1/n], n = " + std::to_string(cfg.n);
    plot.y_label = "signal";
    plot.series.push_back({"g(centre, t) / n", t, {}});
    for (double v : g_centre) plot.series.back().y.push_back(v / cfg.n);
    plot.series.push_back({"phi(xi,t) + phi_x(xi,t)/2n", t, eff_s, "#d62728", true});
  }
  files.text("control.svg", render_svg(plot));

  files.write_json("gramian.json", gramian_to_json(sol.gramian));
  const bool passed = report.relative_residual <= cfg.tolerance;
  json j = {{"schema", "beamctl/1"},
            {"kind", "control_report"},
            {"region", region_to_json(region)},
            {"M", cfg.M},
            {"T", cfg.T},
            {"data", data_json(cfg.data)},
            {"solution", solution_to_json(sol)},
            {"final_residual", number(report.final_residual)},
            {"relative_residual", number(report.relative_residual)},
            {"hum_identity_error", optional_number(report.hum_identity_error)},
            {"sign", report.sign},
            {"control_energy", number(control_energy(g, cfg.T))},
            {"tolerance", cfg.tolerance},
            {"passed", passed}};
  files.write_json("report.json", j);
  log << "control: " << describe(region) << " relative residual "
      << format_number(report.relative_residual) << " in " << seconds << " s\n";
  if (!passed) {
    fail(outcome, "relative_residual = " + format_number(report.relative_residual) +
                      " > tolerance = " + format_number(cfg.tolerance));
  }
}

// ------------------------------------------------------------------ sweep

void sweep_command(const ExperimentConfig& cfg, CommandOutcome& outcome, std::ostream& log) {
  Artifacts files(cfg, outcome);
  SweepOptions options;
  options.grid = cfg.grid;
  options.seed = cfg.seed;
  options.battery_size = cfg.battery_size;
  const auto start = std::chrono::steady_clock::now();
  const SweepResult result = sweep(cfg.xi_rational->num, cfg.xi_rational->den, cfg.n_list,
                                   cfg.data, cfg.T, cfg.M, cfg.epsilon, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const ConvergenceChecks checks = convergence_checks(result, cfg.tolerance);

  {
    std::vector<std::string> header = {
        "n", "adjoint_norm_l2", "adjoint_norm_f", "scaled_adjoint_norm_l2",
        "scaled_adjoint_norm_f", "control_energy", "final_residual", "hum_identity_error",
        "duality_error", "trace_l2_distance", "trace_hm1_distance", "pairing_error_rms"};
    for (int k = 1; k <= kCheckpointCount; ++k) {
      header.push_back("psi_distance_t" + std::to_string(k));
    }
    Csv csv(files.path("sweep.csv"), header);
    auto opt = [](const std::optional<double>& v) {
      return v ? format_number(*v) : std::string();
    };
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const SweepRecord& r = result.records[i];
      std::vector<std::string> row = {
          std::to_string(r.n), format_number(r.adjoint_norm_l2),
          format_number(r.adjoint_norm_f), format_number(r.scaled_adjoint_norm_l2),
          format_number(r.scaled_adjoint_norm_f), format_number(r.control_energy),
          format_number(r.final_residual), format_number(r.hum_identity_error),
          format_number(r.duality_error), opt(r.trace_l2_distance),
          opt(r.trace_hm1_distance),
          checks.pairing_rms.empty() ? std::string() : format_number(checks.pairing_rms[i])};
      for (int k = 0; k < kCheckpointCount; ++k) {
        row.push_back(k < static_cast<int>(r.checkpoint_distances.size())
                          ? format_number(r.checkpoint_distances[k])
                          : std::string());
      }
      csv.row(row);
    }
  }

  json scaling = nullptr;
  bool scaling_passed = true;
  if (result.records.size() >= 3) {
    ScalingMode mode = result.strategic.strategic ? ScalingMode::Strategic
                                                  : ScalingMode::General;
    if (cfg.scaling_mode == "general") mode = ScalingMode::General;
    if (cfg.scaling_mode == "strategic") {
      if (!result.strategic.strategic) {
        throw InvalidArgument("scaling.mode = strategic needs a strategic xi");
      }
      mode = ScalingMode::Strategic;
    }
    const ScalingReport rep = scaling_report(result.records, mode, cfg.scaling_margin);
    scaling_passed = rep.passed;
    json fits = json::array();
    for (const ExponentFit& f : rep.fits) {
      fits.push_back({{"quantity", f.quantity},
                      {"exponent", number(f.exponent)},
                      {"intercept", number(f.intercept)},
                      {"asserted", f.asserted},
                      {"bound", f.bound},
                      {"passed", f.passed}});
      if (!f.passed) {
        fail(outcome, f.quantity + " exponent = " + format_number(f.exponent) +
                          " not below " + format_number(f.bound) + " - margin " +
                          format_number(rep.margin));
      }
    }
    scaling = {{"mode", mode == ScalingMode::Strategic ? "strategic" : "general"},
               {"margin", rep.margin},
               {"fits", fits},
               {"passed", rep.passed}};
  }

  json pointwise = nullptr;
  if (result.pointwise) {
    const PointwiseReference& p = *result.pointwise;
    pointwise = {{"relative_residual", number(p.relative_residual)},
                 {"hum_identity_error", number(p.hum_identity_error)},
                 {"pairings", p.pairings}};
  }
  json j = {{"schema", "beamctl/1"},
            {"kind", "sweep_summary"},
            {"xi", xi_json(cfg)},
            {"M", cfg.M},
            {"T", cfg.T},
            {"n_list", cfg.n_list},
            {"seed", cfg.seed},
            {"battery_size", cfg.battery_size},
            {"strategic", result.strategic.strategic},
            {"witness_m", result.strategic.witness_m ? json(*result.strategic.witness_m)
                                                     : json(nullptr)},
            {"divergent_modes", result.divergent_modes},
            {"fdual_diagnostics", result.fdual_diagnostics},
            {"data_fdual_norm", optional_number(result.data_fdual_norm)},
            {"note", result.note},
            {"pointwise", pointwise},
            {"checks",
             {{"max_residual", number(checks.max_residual)},
              {"residuals_ok", checks.residuals_ok},
              {"max_duality_error", number(checks.max_duality_error)},
              {"duality_ok", checks.duality_ok},
              {"worst_trace_ratio", number(checks.worst_trace_ratio)},
              {"trace_monotone", checks.trace_monotone},
              {"pairing_slope", number(checks.pairing_slope)},
              {"pairing_trend", checks.pairing_trend}}},
            {"scaling", scaling},
            {"passed", checks.passed() && scaling_passed}};
  files.write_json("scaling.json", j);

  Plot plot;
  plot.title = "effective trace vs pointwise control";
  plot.x_label = "n";
  plot.y_label = "distance";
  plot.log_x = plot.log_y = true;
  std::vector<double> ns, l2, hm1, rms;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const SweepRecord& r = result.records[i];
    ns.push_back(r.n);
    l2.push_back(r.trace_l2_distance.value_or(NAN));
    hm1.push_back(r.trace_hm1_distance.value_or(NAN));
    rms.push_back(checks.pairing_rms.empty() ? NAN : checks.pairing_rms[i]);
  }
  plot.series.push_back({"L2 distance", ns, l2});
  plot.series.push_back({"H^-1 surrogate", ns, hm1, "#d62728", true});
  plot.series.push_back({"pairing error (rms)", ns, rms, "#2ca02c"});
  files.text("convergence.svg", render_svg(plot));

  log << "sweep: " << result.records.size() << " problems in " << seconds << " s\n";
  if (!result.note.empty()) log << "sweep: " << result.note << "\n";
  if (!checks.residuals_ok) {
    fail(outcome, "max final residual = " + format_number(checks.max_residual));
  }
  if (!checks.duality_ok) {
    fail(outcome, "max duality error = " + format_number(checks.max_duality_error));
  }
  if (!checks.trace_monotone) {
    fail(outcome, "trace distance ratio = " + format_number(checks.worst_trace_ratio));
  }
  if (!checks.pairing_trend) {
    fail(outcome, "pairing error slope = " + format_number(checks.pairing_slope));
  }
}

}  // namespace

CommandOutcome run_command(const ExperimentConfig& cfg, std::ostream& log) {
  CommandOutcome outcome;
  switch (cfg.command) {
    case Command::Simulate: simulate(cfg, outcome, log); break;
    case Command::Observability: observability(cfg, outcome, log); break;
    case Command::StrategicCheck: strategic(cfg, outcome, log); break;
    case Command::Control: control(cfg, outcome, log); break;
    case Command::Sweep: sweep_command(cfg, outcome, log); break;
  }
  return outcome;
}

}  // namespace beamctl
