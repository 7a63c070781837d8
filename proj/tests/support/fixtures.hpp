#pragma once

#include <cstdint>
#include <memory>

#include "ksweep/problems.hpp"
#include "ksweep/step_system.hpp"
#include "ksweep/timeloop.hpp"

namespace ksweep::testing {

/// Uniform random coefficients in [-1, 1], reproducible from the seed.
PhaseField random_field(const PhaseMesh& m, std::uint64_t seed);
SpatialField random_spatial(const PhaseMesh& m, std::uint64_t seed);
EffectiveField random_efield(int nx, std::uint64_t seed, double scale = 1.0);
BoundaryTrace random_trace(const PhaseMesh& m, std::uint64_t seed);

/// rho0 M with the exact cell moments of the Maxwellian, constant in x.
PhaseField maxwellian_field(const PhaseMesh& m, double rho0, double theta);

/// Periodic, field-free problem whose state rho0 M is a discrete equilibrium.
ProblemConfig equilibrium_problem(double rho0 = 1.5, double eps = 0.3);

/// First-step system of a problem on an n x n mesh.
struct FirstStep {
  Discretization d;
  PhaseField f0;
  SweepContext ctx;
  std::unique_ptr<StepSystem> system;
};

FirstStep first_step(const ProblemConfig& p, int n, double dt, const SolverConfig& cfg);

}  // namespace ksweep::testing
