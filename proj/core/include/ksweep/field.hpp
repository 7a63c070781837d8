#pragma once

#include <memory>
#include <vector>

#include "ksweep/mesh.hpp"
#include "ksweep/transport.hpp"

namespace ksweep {

/// Continuous piecewise-linear potential by nodal value. Dirichlet potentials
/// carry nx + 1 nodes; periodic ones nx (the last node wraps to the first).
struct Potential {
  std::vector<double> nodes;
  double dx = 1.0;
  bool periodic = false;
};

struct PoissonBC {
  bool periodic = false;
  double left = 0.0;
  double right = 0.0;

  static PoissonBC dirichlet(double l, double r) { return {false, l, r}; }
  static PoissonBC periodic_bc() { return {true, 0.0, 0.0}; }
};

/// How a periodic solve treats a load with nonzero mean. `strict` throws;
/// `remove_mean` drops the mean (used inside iterations, where the density
/// drifts slightly from the compatible value before convergence).
enum class Compatibility { strict, remove_mean };

/// P1 finite elements for  int Phi' w' = -scale * int (zeta rho - D) w.
/// The load is integrated exactly. Periodic solutions have zero mean.
class PoissonSolver {
 public:
  PoissonSolver(const PhaseMesh& mesh, PoissonBC bc, double scale = 1.0, double zeta = 1.0);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  Potential solve(const SpatialField& rho, const SpatialField& doping,
                  Compatibility mode = Compatibility::strict) const;

  const PoissonBC& bc() const { return bc_; }

 private:
  struct Periodic;
  PhaseMesh mesh_;
  PoissonBC bc_;
  double scale_;
  double zeta_;
  std::unique_ptr<Periodic> periodic_;
};

Potential poisson_solve(const SpatialField& rho, const SpatialField& doping,
                        const PoissonBC& bc, double scale = 1.0, double zeta = 1.0,
                        Compatibility mode = Compatibility::strict);

/// Per-cell field_scale * dPhi/dx.
EffectiveField electric_field(const Potential& phi, double field_scale);

/// Velocity integral over all velocity cells.
SpatialField moment_P(const PhaseField& f);

/// Traces of f at v = 0 from both sides, unmasked: positive from the first
/// v > 0 cell, negative from the last v < 0 cell.
BoundaryTrace face_traces(const PhaseField& f);

/// Keeps the positive trace where E < 0 and the negative trace where E > 0.
BoundaryTrace mask_traces(const BoundaryTrace& t, const EffectiveField& e);

/// Upwind traces of f at v = 0, masked by the sign of E.
BoundaryTrace trace_T(const PhaseField& f, const EffectiveField& e);

}  // namespace ksweep
