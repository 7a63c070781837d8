#include "ksweep/step_system.hpp"

#include <stdexcept>

#include "ksweep/ddsa.hpp"
#include "ksweep/krylov.hpp"

namespace ksweep {

StepSystem::StepSystem(const SweepContext& ctx, FieldCoupling coupling, SolverConfig cfg)
    : ctx_(ctx), coupling_(std::move(coupling)), cfg_(cfg) {
  cfg_.validate();
  if (!coupling_.poisson) throw std::invalid_argument("step system needs a Poisson solver");
  if (cfg_.ddsa && periodic())
    throw std::invalid_argument("drift-diffusion acceleration needs Dirichlet x-boundaries");
  ctx_homogeneous_ = ctx_;
  ctx_homogeneous_.explicit_source = PhaseField(mesh());
  ctx_homogeneous_.x_inflow = InflowMoments(mesh());
}

Potential StepSystem::potential_of(const SpatialField& rho) const {
  return coupling_.poisson->solve(rho, coupling_.doping, Compatibility::remove_mean);
}

EffectiveField StepSystem::field_of(const SpatialField& rho) const {
  return electric_field(potential_of(rho), coupling_.field_scale);
}

SolverState StepSystem::state_from(const PhaseField& f) const {
  SolverState y(mesh(), periodic());
  y.rho = moment_P(f);
  y.trace = face_traces(f);
  if (periodic()) y.periodic = outflow_traces(f);
  return y;
}

PhaseField StepSystem::sweep_state(const SolverState& y, const EffectiveField& e,
                                   SweepCounter& counter) const {
  if (y.has_periodic())
    return apply_N(e, ctx_, y.rho, y.trace, inflow_from_traces(mesh(), y.periodic), counter);
  return apply_N(e, ctx_, y.rho, y.trace, counter);
}

SolverState StepSystem::nls_map(const SolverState& y, SweepCounter& counter, bool ddsa) const {
  const EffectiveField e = field_of(y.rho);
  const PhaseField f = sweep_state(y, e, counter);
  SolverState out(mesh(), y.has_periodic());
  out.rho = moment_P(f);
  out.trace = face_traces(f);
  if (y.has_periodic()) out.periodic = outflow_traces(f);
  if (ddsa) return ddsa_correct(out, y, e, ctx_, true, cfg_.ddsa_beta0);
  return out;
}

Eigen::VectorXd StepSystem::inner_vector(const SolverState& z) const {
  const int n = 2 * mesh().nx;
  Eigen::VectorXd v(2 * n + static_cast<Eigen::Index>(z.periodic.size()));
  for (int k = 0; k < n; ++k) {
    v[k] = z.trace.positive.coeffs[k];
    v[n + k] = z.trace.negative.coeffs[k];
  }
  for (std::size_t k = 0; k < z.periodic.size(); ++k) v[2 * n + k] = z.periodic[k];
  return v;
}

void StepSystem::set_inner(SolverState& z, const Eigen::VectorXd& v) const {
  const int n = 2 * mesh().nx;
  for (int k = 0; k < n; ++k) {
    z.trace.positive.coeffs[k] = v[k];
    z.trace.negative.coeffs[k] = v[n + k];
  }
  for (std::size_t k = 0; k < z.periodic.size(); ++k) z.periodic[k] = v[2 * n + k];
}

Eigen::VectorXd StepSystem::inner_map(const SpatialField& rho, const EffectiveField& e,
                                      const Eigen::VectorXd& zv, bool homogeneous,
                                      SweepCounter& counter, PhaseField* f_out) const {
  SolverState z(mesh(), periodic());
  set_inner(z, zv);
  const SweepContext& ctx = homogeneous ? ctx_homogeneous_ : ctx_;
  const SpatialField sigma = homogeneous ? SpatialField(mesh()) : rho;
  const InflowMoments inflow =
      periodic() ? inflow_from_traces(mesh(), z.periodic) : ctx.x_inflow;
  PhaseField f = apply_N(e, ctx, sigma, z.trace, inflow, counter);
  SolverState out(mesh(), periodic());
  out.trace = face_traces(f);
  if (periodic()) out.periodic = outflow_traces(f);
  if (f_out) *f_out = std::move(f);
  return inner_vector(out);
}

Eigen::MatrixXd StepSystem::inner_operator_dense(const EffectiveField& e) const {
  SweepCounter counter;
  const Eigen::Index n = inner_vector(SolverState(mesh(), periodic())).size();
  Eigen::MatrixXd k(n, n);
  const SpatialField zero(mesh());
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::VectorXd unit = Eigen::VectorXd::Unit(n, c);
    k.col(c) = inner_map(zero, e, unit, true, counter, nullptr);
  }
  return k;
}

InnerSolveResult StepSystem::nest_inner_solve(const SpatialField& rho, const EffectiveField& e,
                                              const SolverState& z0,
                                              SweepCounter& counter) const {
  InnerSolveResult res;
  res.z = z0;
  const long start = counter.count();
  const Eigen::VectorXd x0 = inner_vector(z0);
  PhaseField f;
  const Eigen::VectorXd h0 = inner_map(rho, e, x0, false, counter, &f);
  const double ref = h0.norm();
  const double abs_tol = cfg_.inner_tol * ref;
  Eigen::VectorXd x = x0;

  if (cfg_.inner == InnerMethod::krylov) {
    const Eigen::VectorXd r0 = h0 - x0;
    if (r0.norm() <= abs_tol) {
      res.z = z0;
      set_inner(res.z, h0);
      res.f = std::move(f);
      res.converged = true;
      res.residual = ref > 0 ? r0.norm() / ref : 0.0;
      res.iterations = static_cast<int>(counter.count() - start);
      return res;
    }
    const LinearOperator a = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
      out = v - inner_map(rho, e, v, true, counter, nullptr);
    };
    const GmresResult g = gmres(a, x0, r0, abs_tol, static_cast<int>(x0.size()) + 1);
    x = g.x;
    res.converged = g.converged;
    res.residual = ref > 0 ? g.residual_norm / ref : 0.0;
  } else {
    Eigen::VectorXd h = h0;
    while (true) {
      const double r = (h - x).norm();
      x = h;
      if (r <= abs_tol) {
        res.converged = true;
        res.residual = ref > 0 ? r / ref : 0.0;
        break;
      }
      h = inner_map(rho, e, x, false, counter, &f);
      if (!h.allFinite()) throw std::runtime_error("inner iteration diverged");
    }
    set_inner(res.z, x);
    res.f = std::move(f);
    res.iterations = static_cast<int>(counter.count() - start);
    return res;
  }
  // Final sweep with the converged traces.
  const Eigen::VectorXd hx = inner_map(rho, e, x, false, counter, &f);
  set_inner(res.z, hx);
  res.f = std::move(f);
  res.iterations = static_cast<int>(counter.count() - start);
  return res;
}

SpatialField StepSystem::nest_outer_map(const SpatialField& rho, SolverState& z,
                                        SweepCounter& counter, bool ddsa) const {
  const EffectiveField e = field_of(rho);
  InnerSolveResult inner = nest_inner_solve(rho, e, z, counter);
  z.trace = inner.z.trace;
  z.periodic = inner.z.periodic;
  SpatialField out = moment_P(inner.f);
  if (ddsa) {
    SolverState star(mesh(), false), prev(mesh(), false);
    star.rho = out;
    prev.rho = rho;
    out = ddsa_correct(star, prev, e, ctx_, false, cfg_.ddsa_beta0).rho;
  }
  return out;
}

SolveResult StepSystem::solve(const SolverState& y0, SweepCounter& counter) const {
  SolveResult result;
  DriveConfig dc;
  dc.tol = cfg_.outer_tol;
  dc.window = cfg_.aa_window;
  dc.relax = cfg_.aa_relax;
  const bool aa = is_anderson(cfg_.method);
  const PhaseMesh& m = mesh();

  try {
    if (!is_nest(cfg_.method)) {
      const FixedPointMap g = [&](const Eigen::VectorXd& v) {
        const SolverState y = SolverState::unflatten(
            m, std::span<const double>(v.data(), v.size()), periodic());
        const std::vector<double> out = nls_map(y, counter).flatten();
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
            out.data(), static_cast<Eigen::Index>(out.size())));
      };
      const std::vector<double> flat = y0.flatten();
      const Eigen::VectorXd v0 =
          Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
      result.drive = aa ? anderson_drive(g, v0, dc) : picard_drive(g, v0, dc);
      result.y = SolverState::unflatten(
          m, std::span<const double>(result.drive.y.data(), result.drive.y.size()), periodic());
    } else {
      SolverState z = y0;
      const FixedPointMap g = [&](const Eigen::VectorXd& v) {
        SpatialField rho(m);
        for (int k = 0; k < 2 * m.nx; ++k) rho.coeffs[k] = v[k];
        const SpatialField out = nest_outer_map(rho, z, counter, cfg_.ddsa);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
            out.coeffs.data(), static_cast<Eigen::Index>(out.coeffs.size())));
      };
      const Eigen::VectorXd v0 = Eigen::Map<const Eigen::VectorXd>(
          y0.rho.coeffs.data(), static_cast<Eigen::Index>(y0.rho.coeffs.size()));
      result.drive = aa ? anderson_drive(g, v0, dc) : picard_drive(g, v0, dc);
      result.y = z;
      for (int k = 0; k < 2 * m.nx; ++k) result.y.rho.coeffs[k] = result.drive.y[k];
    }
  } catch (const std::runtime_error&) {
    // Non-finite data reaching a linear solve; reported as divergence.
    result.failed = true;
    result.y = y0;
  }
  return result;
}

PhaseField StepSystem::reconstruct(const SolverState& y, SweepCounter& counter) const {
  return sweep_state(y, field_of(y.rho), counter);
}

}  // namespace ksweep
