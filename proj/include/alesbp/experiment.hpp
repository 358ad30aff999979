#pragma once

// Convergence, free-stream and audit drivers for the moving-domain
// advection-diffusion experiment.

#include "alesbp/advection_diffusion.hpp"
#include "alesbp/error.hpp"
#include "alesbp/stability_audit.hpp"
#include "alesbp/time_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace alesbp {

enum class MeshCase { Stationary, Moving };

inline MeshCase parse_case(std::string_view s) {
  if (s == "stationary") return MeshCase::Stationary;
  if (s == "moving") return MeshCase::Moving;
  throw InvalidArgument("unknown case '" + std::string(s) + "' (expected stationary or moving)");
}

inline std::string to_string(MeshCase c) { return c == MeshCase::Moving ? "moving" : "stationary"; }

inline JacobianMode parse_jacobian_mode(std::string_view s) {
  if (s == "exact") return JacobianMode::Exact;
  if (s == "coupled") return JacobianMode::Coupled;
  throw InvalidArgument("unknown jacobian mode '" + std::string(s) + "' (expected exact or coupled)");
}

inline std::string to_string(JacobianMode m) { return m == JacobianMode::Exact ? "exact" : "coupled"; }

struct FilterConfig {
  bool enabled = true;
  int order = 4;          // undivided difference order k
  double strength = 1.0;  // sigma * 4^k
};

struct ExperimentConfig {
  double epsilon = 0.1 * std::numbers::pi;
  double amplitude = 0.1;
  std::vector<int> N{8, 16, 32, 64, 128};
  SbpOrder order = SbpOrder::Order42;
  double t_end = 2.0 * std::numbers::pi;
  double dt_safety = 0.5;
  MeshCase mesh_case = MeshCase::Moving;
  JacobianMode jacobian_mode = JacobianMode::Exact;
  DivergenceMode divergence_mode = DivergenceMode::Discrete;
  FilterConfig filter;
  double grid_ratio = 5.0;
  int samples = 32;
  double alpha = 0.0;
  std::string out;

  void validate() const {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(dt_safety > 0.0 && dt_safety <= 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1]");
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (!(grid_ratio > 0.0)) throw InvalidArgument("grid_ratio must be positive");
    if (samples < 1) throw InvalidArgument("samples must be >= 1");
    if (N.empty()) throw InvalidArgument("N list is empty");
    for (std::size_t i = 0; i < N.size(); ++i) {
      if (N[i] < 8) throw InvalidArgument("N must be >= 8, got " + std::to_string(N[i]));
      if (i > 0 && N[i] != 2 * N[i - 1]) throw InvalidArgument("N list must double from row to row");
    }
    if (filter.enabled && (filter.order < 1 || filter.strength < 0.0))
      throw InvalidArgument("filter order must be >= 1 and strength >= 0");
  }

  ManufacturedSolution mms() const { return {amplitude, epsilon}; }
};

inline double mms_solution(double x, double t, double xe, const ExperimentConfig& cfg) {
  return cfg.mms().solution(x, t, xe);
}

struct MmsData {
  double F = 0.0;
  double g_s = 0.0;
  double u0 = 0.0;
};

/// F at x, g_s at the inflow end and u_0 at x, all on the configured motion.
inline MmsData mms_data(double x, double t, const ExperimentConfig& cfg) {
  const auto layout = layout_for_ratio(8, cfg.grid_ratio);
  const TwoBlockMotion motion(layout, cfg.mesh_case == MeshCase::Moving);
  const auto q = motion.trajectory(t);
  const auto q0 = motion.trajectory(0.0);
  const auto m = cfg.mms();
  return {m.forcing(x, t, q.xe, q.xe_dot), m.inflow_data(t, q), m.initial(x, q0.xe)};
}

inline AdvectionDiffusionAle make_model(const ExperimentConfig& cfg, int n_layer,
                                        Forcing forcing = Forcing::manufactured()) {
  const auto layout = layout_for_ratio(n_layer, cfg.grid_ratio);
  TwoBlockMotion motion(layout, cfg.mesh_case == MeshCase::Moving);
  return AdvectionDiffusionAle(std::move(motion), cfg.order, cfg.mms(), forcing, cfg.divergence_mode);
}

/// dt = dt_safety * dx_min^2 / eps with dx_min over the whole period.
inline double time_step(const ExperimentConfig& cfg, const AdvectionDiffusionAle& model) {
  const double h = model.motion().min_spacing_over_period();
  return cfg.dt_safety * h * h / cfg.epsilon;
}

inline std::optional<Filter> make_filter(const ExperimentConfig& cfg, const AdvectionDiffusionAle& model) {
  if (!cfg.filter.enabled) return std::nullopt;
  return make_model_filter(model, cfg.filter.order, cfg.filter.strength);
}

struct CaseResult {
  int N = 0;
  double linf_error = 0.0;
  long steps = 0;
  double dt = 0.0;
};

/// One manufactured-solution run to t_end; discrete L_inf error over all nodes.
inline CaseResult run_case(const ExperimentConfig& cfg, int n_layer) {
  cfg.validate();
  const auto model = make_model(cfg, n_layer);
  RunOptions opt;
  opt.dt = time_step(cfg, model);
  opt.t_end = cfg.t_end;
  opt.mode = cfg.jacobian_mode;
  opt.filter = make_filter(cfg, model);
  long steps = -1;
  opt.observer = [&steps](const SolverState&) { ++steps; };
  const auto final = run(model.initial_state(), model, ButcherTableau::classical_rk4(), opt);
  const double err = max_abs(Vec(final.u - model.exact_solution(final.t)));
  return {n_layer, err, steps, opt.dt};
}

struct ConvergenceRow {
  int N = 0;
  double log10_err = 0.0;
  std::optional<double> rate;  // empty for the first row
};

inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ConvergenceRow> rows;
  for (int n : cfg.N) {
    ConvergenceRow r;
    r.N = n;
    r.log10_err = std::log10(run_case(cfg, n).linf_error);
    if (!rows.empty()) r.rate = (r.log10_err - rows.back().log10_err) / std::log10(0.5);
    rows.push_back(r);
  }
  return rows;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "N,log10_err,rate\n";
  char buf[96];
  for (const auto& r : rows) {
    if (r.rate)
      std::snprintf(buf, sizeof buf, "%d,%.4f,%.2f\n", r.N, r.log10_err, *r.rate);
    else
      std::snprintf(buf, sizeof buf, "%d,%.4f,\n", r.N, r.log10_err);
    os << buf;
  }
}

struct FreeStreamResult {
  double u_inf = 0.0;
  bool filtered = false;
  double max_deviation = 0.0;  // max over all steps of ||U - u_inf 1||_inf
  long steps = 0;
};

/// Coupled-Jacobian march of a constant state over [0, t_end].
inline FreeStreamResult run_freestream(const ExperimentConfig& cfg, int n_layer, double u_inf, bool filtered) {
  cfg.validate();
  const auto model = make_model(cfg, n_layer, Forcing::free_stream(u_inf));
  RunOptions opt;
  opt.dt = time_step(cfg, model);
  opt.t_end = cfg.t_end;
  opt.mode = JacobianMode::Coupled;
  if (filtered) opt.filter = make_model_filter(model, cfg.filter.order, cfg.filter.strength);
  FreeStreamResult res{u_inf, filtered, 0.0, -1};
  opt.observer = [&](const SolverState& s) {
    ++res.steps;
    res.max_deviation = std::max(res.max_deviation, (s.u.array() - u_inf).abs().maxCoeff());
  };
  run(model.initial_state(), model, ButcherTableau::classical_rk4(), opt);
  return res;
}

/// Energy audit of the semi-discrete scheme at `samples` equispaced times in [0, t_end).
inline std::vector<AuditReport> audit_sweep(const ExperimentConfig& cfg, int n_layer, double tol = 1e-10) {
  cfg.validate();
  const auto model = make_model(cfg, n_layer);
  std::vector<AuditReport> out;
  out.reserve(static_cast<std::size_t>(cfg.samples));
  for (int k = 0; k < cfg.samples; ++k) {
    const double t = cfg.t_end * k / cfg.samples;
    const auto ale = model.ale_operators(t);
    const auto sys = assemble(model.system_matrix(t), ale.Dm, ale.jsqrt);
    out.push_back(audit(sys, ale, model.surface(t), cfg.alpha, t, tol));
  }
  return out;
}

}  // namespace alesbp
