#include "ksweep/timeloop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ksweep/quadrature.hpp"

namespace ksweep {

TimeScheme parse_time_scheme(const std::string& name) {
  if (name == "euler") return TimeScheme::euler;
  if (name == "bdf2") return TimeScheme::bdf2;
  throw std::invalid_argument("unknown time scheme: " + name);
}

std::string to_string(TimeScheme s) { return s == TimeScheme::euler ? "euler" : "bdf2"; }

int step_count(const TimeConfig& cfg) {
  if (cfg.final_time < 0) throw std::invalid_argument("final time must be non-negative");
  if (cfg.final_time == 0) return 0;
  if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
  const double n = std::round(cfg.final_time / cfg.dt);
  if (std::abs(n * cfg.dt - cfg.final_time) > 1e-9 * std::max(cfg.final_time, cfg.dt))
    throw std::invalid_argument("dt must divide the final time");
  return static_cast<int>(n);
}

Discretization discretize(const ProblemConfig& p, int nx, int nv) {
  Discretization d;
  d.problem = p;
  d.mesh = build_mesh(p.x_lo, p.x_hi, p.v_lo, p.v_hi, nx, nv, p.x_periodic);
  d.coupling.poisson =
      std::make_shared<PoissonSolver>(d.mesh, p.poisson_bc, p.poisson_scale, p.zeta);
  d.coupling.doping = project_spatial(p.doping, d.mesh);
  d.coupling.field_scale = p.field_scale;
  const auto zero = [](double) { return 0.0; };
  if (p.x_periodic)
    d.inflow = InflowMoments(d.mesh);
  else
    d.inflow = inflow_moments(d.mesh, p.inflow_left ? p.inflow_left : zero,
                              p.inflow_right ? p.inflow_right : zero);
  return d;
}

PhaseField initial_field(const Discretization& d) { return project(d.problem.initial, d.mesh); }

SweepContext step_context(const Discretization& d, const PhaseField& f_now,
                          const PhaseField* f_prev, double t_next, double dt,
                          TimeScheme scheme) {
  const ProblemConfig& p = d.problem;
  const bool bdf2 = scheme == TimeScheme::bdf2 && f_prev != nullptr;
  SweepContext ctx = make_sweep_context(d.mesh, p.eps, dt, bdf2 ? 1.5 : 1.0, p.theta, p.omega);
  ctx.x_inflow = d.inflow;
  PhaseField& s = ctx.explicit_source;
  if (p.source) {
    const auto q = [&](double x, double v) { return p.source(x, v, t_next); };
    s = project(q, d.mesh);
    for (double& c : s.coeffs) c *= p.eps;
  }
  const double h = p.eps / dt;
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
    if (bdf2)
      s.coeffs[k] += h * (4.0 * f_now.coeffs[k] - f_prev->coeffs[k]) / 2.0;
    else
      s.coeffs[k] += h * f_now.coeffs[k];
  }
  return ctx;
}

StepResult advance(const Discretization& d, const PhaseField& f_now, const PhaseField* f_prev,
                   double t_next, double dt, TimeScheme scheme, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const SweepContext ctx = step_context(d, f_now, f_prev, t_next, dt, scheme);
  const StepSystem sys(ctx, d.coupling, cfg);
  const SolverState y0 = sys.state_from(f_now);

  SweepCounter counter(std::max(cfg.max_sweeps - 1, 1L));
  const SolveResult solved = sys.solve(y0, counter);
  StepResult r;
  r.state = solved.y;
  r.outcome.iterations = solved.drive.evaluations;
  r.outcome.history = solved.drive.residuals;
  r.outcome.residual = solved.drive.residuals.empty() ? 0.0 : solved.drive.residuals.back();
  r.outcome.sweeps = counter.count();

  const bool diverged = solved.failed || solved.drive.diverged;
  if (diverged) {
    r.outcome.status.kind = StatusKind::inf;
    r.outcome.status.residual = r.outcome.residual;
    r.f = f_now;
  } else if (solved.drive.budget_exhausted) {
    r.outcome.status = classify(r.outcome.history, true, 0.0, cfg);
    r.f = f_now;
  } else {
    SweepCounter rc(1);
    r.f = sys.reconstruct(solved.y, rc);
    r.outcome.sweeps += rc.count();
    r.e = sys.field_of(moment_P(r.f));
    r.outcome.status = classify(r.outcome.history, false, l2_norm_squared(r.f), cfg);
  }
  if (r.e.values.empty()) r.e = sys.field_of(y0.rho);
  r.outcome.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

StepResult bdf2_startup(const Discretization& d, const PhaseField& f0, double dt,
                        const SolverConfig& cfg) {
  StepResult r = advance(d, f0, nullptr, dt, dt, TimeScheme::euler, cfg);
  r.outcome.startup = true;
  return r;
}

ErrorNorms error_norms(const PhaseField& f, const EffectiveField& e, const ProblemConfig& p,
                       double t) {
  if (!p.exact_f || !p.exact_E) throw std::invalid_argument("problem has no exact solution");
  const PhaseMesh& m = f.mesh;
  const GaussRule& g = gauss4();
  double ef = 0, nf = 0, ee = 0, ne = 0;
  for (int i = 0; i < m.nx; ++i) {
    // E is cell-constant: compare against the exact field at the cell midpoint.
    const double eh = e[i] / p.field_scale, ex = p.exact_E(m.xc(i), t);
    ee += m.dx * (eh - ex) * (eh - ex);
    ne += m.dx * ex * ex;
    for (int qx = 0; qx < g.size(); ++qx) {
      const double xi = g.nodes[qx], x = m.xc(i) + xi * m.dx;
      const double wx = g.weights[qx] * m.dx;
      for (int j = 0; j < m.nv; ++j) {
        const double* u = f.cell(i, j);
        for (int qv = 0; qv < g.size(); ++qv) {
          const double eta = g.nodes[qv], v = m.vc(j) + eta * m.dv;
          const double w = wx * g.weights[qv] * m.dv;
          const double fh = u[0] + u[1] * xi + u[2] * eta, fx = p.exact_f(x, v, t);
          ef += w * (fh - fx) * (fh - fx);
          nf += w * fx * fx;
        }
      }
    }
  }
  if (!(nf > 0) || !(ne > 0)) throw std::domain_error("exact solution has zero norm");
  return {std::sqrt(ef / nf), std::sqrt(ee / ne)};
}

double energy_monitor(const PhaseField& f, double theta) {
  const PhaseMesh& m = f.mesh;
  const GaussRule& g = gauss4();
  double s = 0;
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.nv; ++j) {
      const double* u = f.cell(i, j);
      for (int qv = 0; qv < g.size(); ++qv) {
        const double eta = g.nodes[qv];
        const double inv_m = 1.0 / maxwellian(m.vc(j) + eta * m.dv, theta);
        for (int qx = 0; qx < g.size(); ++qx) {
          const double fh = u[0] + u[1] * g.nodes[qx] + u[2] * eta;
          s += g.weights[qx] * g.weights[qv] * fh * fh * inv_m;
        }
      }
    }
  return s * m.dx * m.dv;
}

RunResult run_simulation(const Discretization& d, const TimeConfig& cfg,
                         const StepObserver& observer) {
  RunResult run;
  run.planned_steps = step_count(cfg);
  run.f = initial_field(d);
  run.e = electric_field(
      d.coupling.poisson->solve(moment_P(run.f), d.coupling.doping, Compatibility::remove_mean),
      d.coupling.field_scale);
  PhaseField f_prev;
  bool have_prev = false;
  for (int n = 0; n < run.planned_steps; ++n) {
    const double t_next = (n + 1) * cfg.dt;
    StepResult r;
    if (cfg.scheme == TimeScheme::bdf2 && !have_prev)
      r = bdf2_startup(d, run.f, cfg.dt, cfg.solver);
    else
      r = advance(d, run.f, have_prev ? &f_prev : nullptr, t_next, cfg.dt, cfg.scheme,
                  cfg.solver);
    RunRecord rec;
    rec.step = n + 1;
    rec.t = t_next;
    rec.outcome = r.outcome;
    run.total_sweeps += r.outcome.sweeps;
    run.total_iterations += r.outcome.iterations;
    run.total_ms += r.outcome.wall_ms;
    run.e = r.e;
    const Status st = r.outcome.status;
    if (!st.terminal()) {
      rec.energy = energy_monitor(r.f, d.problem.theta);
      if (cfg.scheme == TimeScheme::bdf2) {
        f_prev = std::move(run.f);
        have_prev = true;
      }
      run.f = std::move(r.f);
    }
    run.records.push_back(rec);
    if (observer) observer(rec);
    if (st.kind == StatusKind::false_converged && run.status.ok()) run.status = st;
    if (st.terminal()) {
      run.status = st;
      run.terminated = true;
      break;
    }
  }
  return run;
}

}  // namespace ksweep
