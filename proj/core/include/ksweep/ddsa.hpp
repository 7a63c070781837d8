#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "ksweep/state.hpp"
#include "ksweep/transport.hpp"

namespace ksweep {

/// Interface penalty of the direct DG flux  beta0 [phi] / dx + <phi_x>.
constexpr double kDdgPenalty = 2.0;

/// P1 DG discretization of
///   eps (c0/dt phi - d/dx(1/omega dphi/dx) + d/dx(E/omega phi))
/// The diffusion coefficient is 1/omega for every Maxwellian temperature.
/// with phi = 0 at both ends. Unknowns are (phi0, phi1) per spatial cell.
struct DriftDiffusionOperator {
  PhaseMesh mesh;
  Eigen::SparseMatrix<double> matrix;
  double beta0 = kDdgPenalty;
};

/// Throws std::invalid_argument if omega vanishes anywhere on the grid.
DriftDiffusionOperator dd_assemble(const EffectiveField& e, const SweepContext& ctx,
                                   const PhaseMesh& mesh, double beta0 = kDdgPenalty);

/// Load vector of |E| (trace_star - trace_prev) + (omega/eps)(rho_star - rho_prev)
/// tested against {1, xi} on each cell.
std::vector<double> dd_rhs(const SolverState& y_star, const SolverState& y_prev,
                           const EffectiveField& e, const SweepContext& ctx);

SpatialField dd_solve(const DriftDiffusionOperator& op, const std::vector<double>& rhs);

/// Corrected state: rho* + phi0 and, when `correct_trace`, trace* + M(0) phi0
/// on both v = 0 limits. The masked view matches the one-sided update.
SolverState ddsa_correct(const SolverState& y_star, const SolverState& y_prev,
                         const EffectiveField& e, const SweepContext& ctx,
                         bool correct_trace = true, double beta0 = kDdgPenalty);

}  // namespace ksweep
