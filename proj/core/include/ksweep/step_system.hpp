#pragma once

#include <memory>

#include "ksweep/field.hpp"
#include "ksweep/fixed_point.hpp"
#include "ksweep/solver.hpp"
#include "ksweep/state.hpp"
#include "ksweep/transport.hpp"

namespace ksweep {

/// Field coupling shared by all steps of a run.
struct FieldCoupling {
  std::shared_ptr<const PoissonSolver> poisson;
  SpatialField doping;
  double field_scale = 1.0;
};

struct InnerSolveResult {
  SolverState z;          // traces and periodic block; rho untouched
  PhaseField f;           // sweep at the converged traces
  int iterations = 0;     // sweeps spent
  double residual = 0.0;  // final relative residual
  bool converged = false;
};

struct SolveResult {
  SolverState y;
  DriveResult drive;
  bool failed = false;  // a non-budget exception aborted the iteration
};

/// The per-step nonlinear system: fixed sweep context plus field coupling.
class StepSystem {
 public:
  StepSystem(const SweepContext& ctx, FieldCoupling coupling, SolverConfig cfg);

  const SweepContext& context() const { return ctx_; }
  const SolverConfig& config() const { return cfg_; }
  const PhaseMesh& mesh() const { return ctx_.explicit_source.mesh; }
  bool periodic() const { return mesh().x_periodic; }

  EffectiveField field_of(const SpatialField& rho) const;
  Potential potential_of(const SpatialField& rho) const;

  /// Initial iterate from a phase-space field: (P f, v = 0 face traces of f,
  /// outflow traces). Traces are stored unmasked; the sweep only reads the
  /// upwind side, so the masked-out half never affects f and the map stays
  /// continuous when E changes sign.
  SolverState state_from(const PhaseField& f) const;

  /// One application of the N operator at state y with field e.
  PhaseField sweep_state(const SolverState& y, const EffectiveField& e,
                         SweepCounter& counter) const;

  /// (rho, traces) -> (P f, face traces of f) with f = N(F(rho), rho, traces).
  /// One sweep.
  /// With `ddsa` the output is corrected by the drift-diffusion solve.
  SolverState nls_map(const SolverState& y, SweepCounter& counter, bool ddsa) const;
  SolverState nls_map(const SolverState& y, SweepCounter& counter) const {
    return nls_map(y, counter, cfg_.ddsa);
  }

  /// Solves traces = T_E N(rho, traces) (plus the periodic block) at frozen E.
  InnerSolveResult nest_inner_solve(const SpatialField& rho, const EffectiveField& e,
                                    const SolverState& z0, SweepCounter& counter) const;

  /// Dense matrix of the linear part K of the inner map (unit-vector sweeps).
  Eigen::MatrixXd inner_operator_dense(const EffectiveField& e) const;

  /// rho -> P f with f from the converged inner solve; `z` carries the warm
  /// start in and the converged traces out.
  SpatialField nest_outer_map(const SpatialField& rho, SolverState& z, SweepCounter& counter,
                              bool ddsa) const;

  /// Runs the configured method from y0. The counter's budget bounds the work.
  SolveResult solve(const SolverState& y0, SweepCounter& counter) const;

  /// Phase-space solution at a converged state (one sweep).
  PhaseField reconstruct(const SolverState& y, SweepCounter& counter) const;

 private:
  Eigen::VectorXd inner_vector(const SolverState& z) const;
  void set_inner(SolverState& z, const Eigen::VectorXd& v) const;
  Eigen::VectorXd inner_map(const SpatialField& rho, const EffectiveField& e,
                            const Eigen::VectorXd& z, bool homogeneous, SweepCounter& counter,
                            PhaseField* f_out) const;

  SweepContext ctx_;
  SweepContext ctx_homogeneous_;
  FieldCoupling coupling_;
  SolverConfig cfg_;
};

}  // namespace ksweep
