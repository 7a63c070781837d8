#include "ksweep/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ksweep/transport.hpp"

namespace ksweep {

namespace {

constexpr double kAlpha = 0.129;
constexpr double kBeta = 0.803;
constexpr double kGamma = 1.0;
constexpr double kZeta = 1.0;
constexpr double kLeftKnot = 0.1;
constexpr double kRightKnot = 0.5;

double two_plateau(double x, double edge, double middle, double width) {
  const double s1 = smoothstep((x - (kLeftKnot - 0.5 * width)) / width);
  const double s2 = smoothstep((x - (kRightKnot - 0.5 * width)) / width);
  return edge + (middle - edge) * (s1 - s2);
}

}  // namespace

OmegaVariant parse_omega_variant(const std::string& name) {
  if (name == "single") return OmegaVariant::single;
  if (name == "silicon") return OmegaVariant::silicon;
  if (name == "multiscale") return OmegaVariant::multiscale;
  throw std::invalid_argument("unknown collision-frequency variant: " + name);
}

std::string to_string(OmegaVariant v) {
  switch (v) {
    case OmegaVariant::single: return "single";
    case OmegaVariant::silicon: return "silicon";
    case OmegaVariant::multiscale: return "multiscale";
  }
  return "single";
}

double omega_min_of(OmegaVariant v) {
  switch (v) {
    case OmegaVariant::single: return 1.0;
    case OmegaVariant::silicon: return 0.277;
    case OmegaVariant::multiscale: return 0.01;
  }
  return 1.0;
}

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double doping_profile(double x, double width) { return two_plateau(x, 500.0, 2.0, width); }

double omega_profile(double x, double omega_min, double width) {
  return two_plateau(x, 1.0, omega_min, width);
}

ProblemConfig diode(double eps, OmegaVariant variant, double width) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  ProblemConfig p;
  p.name = "diode";
  p.x_lo = 0.0;
  p.x_hi = 0.6;
  p.v_lo = -2.0;
  p.v_hi = 2.0;
  p.eps = eps;
  p.theta = kAlpha * kAlpha;
  p.field_scale = kBeta * kBeta;
  p.poisson_scale = kGamma * kGamma / (kBeta * kBeta);
  p.zeta = kZeta;
  const double wmin = omega_min_of(variant);
  if (variant == OmegaVariant::single)
    p.omega = [](double) { return 1.0; };
  else
    p.omega = [wmin, width](double x) { return omega_profile(x, wmin, width); };
  p.doping = [width](double x) { return doping_profile(x, width); };
  p.poisson_bc = PoissonBC::dirichlet(0.0, 1.0);
  const double theta = p.theta;
  const double d_left = doping_profile(p.x_lo, width);
  const double d_right = doping_profile(p.x_hi, width);
  p.inflow_left = [d_left, theta](double v) { return d_left * maxwellian(v, theta); };
  p.inflow_right = [d_right, theta](double v) { return d_right * maxwellian(v, theta); };
  p.initial = [width, theta](double x, double v) {
    return doping_profile(x, width) * maxwellian(v, theta);
  };
  p.final_time = 0.5;
  p.fc_enabled = true;
  p.omega_variant = to_string(variant);
  p.omega_min = wmin;
  p.transition_width = width;
  return p;
}

ProblemConfig manufactured(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  using std::numbers::pi;
  const double sqrt_pi = std::sqrt(pi);
  ProblemConfig p;
  p.name = "manufactured";
  p.x_lo = -pi;
  p.x_hi = pi;
  p.v_lo = -pi;
  p.v_hi = pi;
  p.x_periodic = true;
  p.eps = eps;
  p.theta = 1.0 / 8.0;
  p.omega = [](double) { return 1.0; };
  p.doping = [sqrt_pi](double) { return sqrt_pi; };
  p.poisson_bc = PoissonBC::periodic_bc();
  p.exact_f = [](double x, double v, double t) {
    return (2.0 - std::cos(2.0 * x - 2.0 * pi * t)) * std::exp(-4.0 * v * v);
  };
  p.exact_E = [sqrt_pi](double x, double t) {
    return -0.25 * sqrt_pi * std::sin(2.0 * x - 2.0 * pi * t);
  };
  p.source = [eps, sqrt_pi](double x, double v, double t) {
    const double ph = 2.0 * x - 2.0 * pi * t;
    return 2.0 / eps * std::exp(-4.0 * v * v) * std::sin(ph) *
           (v - eps * pi + v * sqrt_pi * (2.0 - std::cos(ph)));
  };
  auto exact = p.exact_f;
  p.initial = [exact](double x, double v) { return exact(x, v, 0.0); };
  p.final_time = 1.0;
  p.fc_enabled = false;
  p.tolerance = 1e-10;
  p.omega_variant = "single";
  return p;
}

}  // namespace ksweep
