#include "fixtures.hpp"

#include <random>

namespace ksweep::testing {

namespace {

void fill(std::vector<double>& v, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& x : v) x = u(rng);
}

}  // namespace

PhaseField random_field(const PhaseMesh& m, std::uint64_t seed) {
  PhaseField f(m);
  fill(f.coeffs, seed);
  return f;
}

SpatialField random_spatial(const PhaseMesh& m, std::uint64_t seed) {
  SpatialField s(m);
  fill(s.coeffs, seed);
  return s;
}

EffectiveField random_efield(int nx, std::uint64_t seed, double scale) {
  EffectiveField e(nx);
  fill(e.values, seed, scale);
  return e;
}

BoundaryTrace random_trace(const PhaseMesh& m, std::uint64_t seed) {
  BoundaryTrace t(m);
  fill(t.positive.coeffs, seed);
  fill(t.negative.coeffs, seed + 1);
  return t;
}

PhaseField maxwellian_field(const PhaseMesh& m, double rho0, double theta) {
  PhaseField f(m);
  for (int j = 0; j < m.nv; ++j) {
    const double a = m.v_lo + j * m.dv;
    const auto mom = maxwellian_moments(a, a + m.dv, theta);
    for (int i = 0; i < m.nx; ++i) {
      double* u = f.cell(i, j);
      u[0] = rho0 * mom[0] / m.dv;
      u[2] = 12.0 * rho0 * mom[1] / m.dv;
    }
  }
  return f;
}

ProblemConfig equilibrium_problem(double rho0, double eps) {
  ProblemConfig p = manufactured(eps);
  p.name = "equilibrium";
  p.source = {};
  p.exact_f = {};
  p.exact_E = {};
  p.doping = [rho0](double) { return rho0; };
  const double theta = p.theta;
  p.initial = [rho0, theta](double, double v) { return rho0 * maxwellian(v, theta); };
  p.tolerance = 1e-10;
  return p;
}

FirstStep first_step(const ProblemConfig& p, int n, double dt, const SolverConfig& cfg) {
  FirstStep s;
  s.d = discretize(p, n, n);
  s.f0 = initial_field(s.d);
  s.ctx = step_context(s.d, s.f0, nullptr, dt, dt, TimeScheme::euler);
  s.system = std::make_unique<StepSystem>(s.ctx, s.d.coupling, cfg);
  return s;
}

}  // namespace ksweep::testing
