#include "beamctl/hum_control.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "beamctl/errors.hpp"
#include "beamctl/kernels.hpp"

namespace beamctl {
namespace {

constexpr double kSingularRatio = 1e-12;
constexpr int kMaxRefinement = 8;

double condition_from(const Eigen::VectorXd& eigenvalues) {
  const double lo = eigenvalues(0);
  const double hi = eigenvalues(eigenvalues.size() - 1);
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::VectorXd residual_long_double(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& b) {
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    long double acc = b(i);
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      acc -= static_cast<long double>(A(i, j)) * x(j);
    }
    r(i) = static_cast<double>(acc);
  }
  return r;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Eigen::VectorXd to_vector(const ModalState& state) {
  Eigen::VectorXd v(2 * state.modes());
  for (int m = 0; m < state.modes(); ++m) {
    v(2 * m) = state.a[m];
    v(2 * m + 1) = state.beta[m];
  }
  return v;
}

ModalState from_vector(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0) throw InvalidArgument("from_vector: odd length");
  const int M = static_cast<int>(v.size() / 2);
  ModalState s = ModalState::zero(M);
  for (int m = 0; m < M; ++m) {
    s.a[m] = v(2 * m);
    s.beta[m] = v(2 * m + 1);
  }
  return s;
}

double Gramian::quadratic_form(const ModalState& p) const {
  const Eigen::VectorXd v = to_vector(p);
  return v.dot(entries * v);
}

Gramian assemble_gramian(const ControlRegion& region, double T, int M) {
  if (!(T > 0.0)) throw InvalidArgument("assemble_gramian: T must be > 0");
  Gramian g{kernels::gramian_entries(region, T, M), region, T, M, 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.entries,
                                                     Eigen::EigenvaluesOnly);
  g.condition_estimate = condition_from(eig.eigenvalues());
  return g;
}

Eigen::VectorXd pairing_vector(const ModalState& y) {
  Eigen::VectorXd r(2 * y.modes());
  for (int m = 0; m < y.modes(); ++m) {
    const double w = temporal_frequency(m);
    r(2 * m) = -0.5 * w * y.beta[m];
    r(2 * m + 1) = 0.5 * w * y.a[m];
  }
  return r;
}

HumSolution solve_hum(const ControlProblem& problem) {
  validate(problem.region);
  if (problem.initial_data.modes() != problem.M) {
    throw InvalidArgument("solve_hum: initial data must have M modes");
  }
  if (problem.regularization && *problem.regularization < 0.0) {
    throw InvalidArgument("solve_hum: regularization must be >= 0");
  }
  HumSolution out{ModalState::zero(problem.M), {},
                  assemble_gramian(problem.region, problem.T, problem.M)};
  const Eigen::MatrixXd& lambda = out.gramian.entries;
  const int dim = out.gramian.dim();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  out.diagnostics.condition_estimate = condition_from(ev);
  const double eps =
      problem.regularization.value_or(1e-10 * lambda.trace() / dim);
  out.diagnostics.regularization = eps;

  if (eps == 0.0 && ev(0) <= kSingularRatio * ev(dim - 1)) {
    Eigen::Index idx = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&idx);
    const int mode = static_cast<int>(idx / 2);
    throw NonInvertibleGramian(
        "solve_hum: Gramian is singular to tolerance (lambda_min = " +
            std::to_string(ev(0)) + "); near-null mode m = " +
            std::to_string(mode),
        mode);
  }

  const Eigen::VectorXd r = pairing_vector(problem.initial_data);
  const double rnorm = r.norm();
  if (rnorm == 0.0) return out;

  const Eigen::MatrixXd A =
      lambda + eps * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    Eigen::Index idx = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&idx);
    throw NonInvertibleGramian("solve_hum: Cholesky failed on Lambda + eps I",
                               static_cast<int>(idx / 2));
  }
  Eigen::VectorXd x = llt.solve(r);
  int steps = 0;
  double rel = residual_long_double(A, x, r).norm() / rnorm;
  while (steps < kMaxRefinement && rel > 1e-15) {
    const Eigen::VectorXd x_next = x + llt.solve(residual_long_double(A, x, r));
    const double rel_next = residual_long_double(A, x_next, r).norm() / rnorm;
    ++steps;
    if (!(rel_next < rel)) break;
    x = x_next;
    rel = rel_next;
  }
  out.adjoint0 = from_vector(x);
  out.diagnostics.refinement_steps = steps;
  out.diagnostics.solve_residual = rel;
  out.diagnostics.gramian_residual =
      residual_long_double(lambda, x, r).norm() / rnorm;
  out.diagnostics.energy = x.dot(lambda * x);
  return out;
}

ControlField synthesize_control(const ModalState& adjoint0,
                                const ControlRegion& region, double T) {
  validate(region);
  if (!(T > 0.0)) throw InvalidArgument("synthesize_control: T must be > 0");
  const int M = adjoint0.modes();
  const double gain = region_gain(region);
  ControlField f;
  f.region = region;
  f.frequencies.resize(M);
  f.cos_amp = Eigen::MatrixXd::Zero(M, M);
  f.sin_amp = Eigen::MatrixXd::Zero(M, M);
  for (int j = 0; j < M; ++j) f.frequencies[j] = temporal_frequency(j);
  // g_m(t) = 2 int_0^1 g(x,t) sin(mu_m x) dx
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < M; ++j) {
      const double s = 2.0 * gain * spatial_overlap(m, j, region);
      f.cos_amp(m, j) = s * adjoint0.a[j];
      f.sin_amp(m, j) = s * adjoint0.beta[j];
    }
  }
  f.source = ControlField::Source{adjoint0, gain};
  return f;
}

double control_adjoint_product(const ControlField& control, const ModalState& p,
                               double T) {
  const std::vector<TrigSeries> phi = homogeneous_trajectory(p);
  double sum = 0.0;
  for (int m = 0; m < p.modes(); ++m) {
    sum += integrate_product(control.modal_series(m), phi[m], T);
  }
  return 0.5 * sum;
}

double control_energy(const ControlField& control, double T) {
  if (!control.source || !control.region) {
    throw std::logic_error("control_energy: needs a synthesized control");
  }
  const std::vector<TrigSeries> phi =
      homogeneous_trajectory(control.source->adjoint);
  const int M = control.source->adjoint.modes();
  const double gain = control.source->gain;
  if (const auto* r = std::get_if<InternalRegion>(&*control.region)) {
    double sum = 0.0;
    for (int m = 0; m < M; ++m) {
      for (int j = 0; j < M; ++j) {
        sum += window_overlap(m, j, r->xi, r->xi + r->width()) *
               integrate_product(phi[m], phi[j], T);
      }
    }
    return gain * gain * sum;
  }
  return l2_norm_squared(control.point_signal(), T);
}

std::optional<double> hum_identity_check(const ModalState& y, const ModalState& adjoint,
                                         const ControlRegion& region, double T) {
  const ControlField g = synthesize_control(adjoint, region, T);
  const double energy = control_adjoint_product(g, adjoint, T);
  if (energy == 0.0) return std::nullopt;
  return std::abs(duality_pairing(y, adjoint) - energy) / std::abs(energy);
}

NullControlReport verify_null_control(const ControlProblem& problem,
                                      const ControlField& control) {
  const ModalState& y = problem.initial_data;
  const FinalState plus = evolve_to_final(y, control, problem.T);
  const FinalState minus = evolve_to_final(y, control.negated(), problem.T);
  NullControlReport out;
  const bool flip = minus.residual < plus.residual;
  out.sign = flip ? -1 : 1;
  out.final_state = flip ? minus.state : plus.state;
  out.final_residual = flip ? minus.residual : plus.residual;
  const double initial = norm(y, SpaceTag::l2());
  out.relative_residual = initial > 0.0 ? out.final_residual / initial : 0.0;

  if (control.source && control.has_closed_form()) {
    const ModalState& p = control.source->adjoint;
    const ControlField applied = flip ? control.negated() : control;
    const double energy = control_adjoint_product(applied, p, problem.T);
    if (energy != 0.0) {
      out.hum_identity_error =
          std::abs(duality_pairing(y, p) - energy) / std::abs(energy);
    }
  }
  return out;
}

nlohmann::json region_to_json(const ControlRegion& region) {
  if (const auto* r = std::get_if<InternalRegion>(&region)) {
    return {{"type", "internal"}, {"xi", r->xi}, {"n", r->n}};
  }
  return {{"type", "pointwise"}, {"xi", std::get<PointwiseRegion>(region).xi}};
}

ControlRegion region_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "internal") {
    return InternalRegion{j.at("xi").get<double>(), j.at("n").get<int>()};
  }
  if (type == "pointwise") return PointwiseRegion{j.at("xi").get<double>()};
  throw InvalidArgument("unknown region type '" + type + "'");
}

nlohmann::json gramian_to_json(const Gramian& g) {
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = 0; j < g.dim(); ++j) entries.push_back(g.entries(i, j));
  }
  return {{"schema", "beamctl/1"},
          {"kind", "gramian"},
          {"dim", g.dim()},
          {"M", g.M},
          {"T", g.T},
          {"region", region_to_json(g.region)},
          {"ordering", "interleaved a_m, beta_m"},
          {"entries", std::move(entries)},
          {"condition_estimate", json_number(g.condition_estimate)}};
}

Gramian gramian_from_json(const nlohmann::json& j) {
  if (j.at("schema").get<std::string>() != "beamctl/1") {
    throw InvalidArgument("gramian_from_json: unsupported schema");
  }
  Gramian g;
  const int dim = j.at("dim").get<int>();
  g.M = j.at("M").get<int>();
  g.T = j.at("T").get<double>();
  g.region = region_from_json(j.at("region"));
  const auto& e = j.at("entries");
  if (dim != 2 * g.M || e.size() != static_cast<std::size_t>(dim) * dim) {
    throw InvalidArgument("gramian_from_json: inconsistent dimensions");
  }
  g.entries.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) g.entries(i, k) = e[i * dim + k].get<double>();
  }
  const auto& c = j.at("condition_estimate");
  g.condition_estimate =
      c.is_null() ? std::numeric_limits<double>::infinity() : c.get<double>();
  return g;
}

nlohmann::json solution_to_json(const HumSolution& s) {
  const auto to_array = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  const HumDiagnostics& d = s.diagnostics;
  return {{"schema", "beamctl/1"},
          {"kind", "hum_solution"},
          {"M", s.gramian.M},
          {"T", s.gramian.T},
          {"region", region_to_json(s.gramian.region)},
          {"adjoint", {{"a", to_array(s.adjoint0.a)}, {"beta", to_array(s.adjoint0.beta)}}},
          {"diagnostics",
           {{"condition_estimate", json_number(d.condition_estimate)},
            {"regularization", d.regularization},
            {"solve_residual", d.solve_residual},
            {"gramian_residual", d.gramian_residual},
            {"energy", d.energy},
            {"refinement_steps", d.refinement_steps}}}};
}

}  // namespace beamctl
