#pragma once

#include <functional>
#include <string>

#include "ksweep/field.hpp"
#include "ksweep/mesh.hpp"

namespace ksweep {

using VelocityFunction = std::function<double(double v)>;
using SpaceTimeFunction = std::function<double(double x, double v, double t)>;

/// Everything that defines a test problem apart from the discretization.
struct ProblemConfig {
  std::string name;
  double x_lo = 0.0, x_hi = 1.0, v_lo = -1.0, v_hi = 1.0;
  bool x_periodic = false;

  double eps = 1.0;
  double theta = 1.0;
  double field_scale = 1.0;    // multiplies dPhi/dx in the transport equation
  double poisson_scale = 1.0;  // multiplies (zeta rho - D) in the Poisson load
  double zeta = 1.0;

  SpatialFunction omega;
  SpatialFunction doping;
  PoissonBC poisson_bc;

  VelocityFunction inflow_left;   // f at x_lo for v > 0; empty means zero
  VelocityFunction inflow_right;  // f at x_hi for v < 0; empty means zero
  SpaceTimeFunction source;       // q; empty means zero
  PhaseFunction initial;

  double final_time = 1.0;
  bool fc_enabled = false;
  double fc_lo = 5e4;
  double fc_hi = 2e5;
  double tolerance = 0.0;  // solver tolerance override; 0 keeps the default

  SpaceTimeFunction exact_f;
  std::function<double(double x, double t)> exact_E;

  std::string omega_variant;
  double omega_min = 1.0;
  double transition_width = 0.0;
};

enum class OmegaVariant { single, silicon, multiscale };

/// Throws std::invalid_argument for unknown names.
OmegaVariant parse_omega_variant(const std::string& name);
std::string to_string(OmegaVariant v);
double omega_min_of(OmegaVariant v);

/// C1 cubic 3s^2 - 2s^3, clamped to [0, 1] outside the unit interval.
double smoothstep(double s);

constexpr double kDiodeTransitionWidth = 0.05;

/// 500 near the contacts, 2 in the channel, smoothstep transitions of width w
/// centered at x = 0.1 and x = 0.5.
double doping_profile(double x, double width = kDiodeTransitionWidth);

/// 1 near the contacts, omega_min in the channel, same transitions as the doping.
double omega_profile(double x, double omega_min, double width = kDiodeTransitionWidth);

ProblemConfig diode(double eps, OmegaVariant variant,
                    double width = kDiodeTransitionWidth);

/// Periodic problem with a known smooth solution, used for convergence studies.
ProblemConfig manufactured(double eps = 1.0);

}  // namespace ksweep
