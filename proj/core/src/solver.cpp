#include "ksweep/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ksweep/quadrature.hpp"

namespace ksweep {

Method parse_method(const std::string& name) {
  if (name == "nls-pic") return Method::nls_pic;
  if (name == "nls-aa") return Method::nls_aa;
  if (name == "nest-pic") return Method::nest_pic;
  if (name == "nest-aa") return Method::nest_aa;
  throw std::invalid_argument("unknown solver method: " + name);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::nls_pic: return "nls-pic";
    case Method::nls_aa: return "nls-aa";
    case Method::nest_pic: return "nest-pic";
    case Method::nest_aa: return "nest-aa";
  }
  return "nls-aa";
}

bool is_nest(Method m) { return m == Method::nest_pic || m == Method::nest_aa; }
bool is_anderson(Method m) { return m == Method::nls_aa || m == Method::nest_aa; }

InnerMethod parse_inner_method(const std::string& name) {
  if (name == "krylov" || name == "gmres") return InnerMethod::krylov;
  if (name == "picard") return InnerMethod::picard;
  throw std::invalid_argument("unknown inner method: " + name);
}

std::string to_string(InnerMethod m) {
  return m == InnerMethod::krylov ? "krylov" : "picard";
}

void SolverConfig::validate() const {
  if (!(outer_tol > 0) || !(inner_tol > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(aa_relax > 0 && aa_relax <= 1)) throw std::invalid_argument("aa_relax must be in (0, 1]");
  if (aa_window < 1) throw std::invalid_argument("aa_window must be at least 1");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be positive");
  if (fc_enabled && !(fc_lo < fc_hi)) throw std::invalid_argument("fc bounds must be ordered");
  if (!(ddsa_beta0 > 0)) throw std::invalid_argument("ddsa penalty must be positive");
}

std::string format_short_sci(double r) {
  if (!std::isfinite(r)) return "inf";
  if (r == 0) return "0.0E0";
  int e = static_cast<int>(std::floor(std::log10(std::abs(r))));
  double m = r / std::pow(10.0, e);
  m = std::round(m * 10.0) / 10.0;
  if (std::abs(m) >= 10.0) {
    m /= 10.0;
    ++e;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fE%d", m, e);
  return buf;
}

std::string Status::label() const {
  switch (kind) {
    case StatusKind::converged: return "converged";
    case StatusKind::inf: return "INF";
    case StatusKind::false_converged: return "FC";
    case StatusKind::residual: return "R(" + format_short_sci(residual) + ")";
  }
  return "converged";
}

Status classify(const std::vector<double>& history, bool budget_exhausted,
                double norm_squared, const SolverConfig& cfg, double blowup_factor) {
  Status s;
  s.residual = history.empty() ? 0.0 : history.back();
  for (double r : history) {
    if (!std::isfinite(r) || r > blowup_factor * history.front()) {
      s.kind = StatusKind::inf;
      return s;
    }
  }
  if (budget_exhausted) {
    s.kind = StatusKind::residual;
    return s;
  }
  if (!std::isfinite(norm_squared)) {
    s.kind = StatusKind::inf;
    return s;
  }
  if (cfg.fc_enabled && (norm_squared < cfg.fc_lo || norm_squared > cfg.fc_hi)) {
    s.kind = StatusKind::false_converged;
    return s;
  }
  s.kind = StatusKind::converged;
  return s;
}

KappaEstimates kappa_estimates(double eps, double dt, double omega_max, double e_max,
                               double dv, double c_inv, double omega_min) {
  KappaEstimates k;
  const double e2 = eps * eps / dt;
  const double a1 = omega_max / (e2 + omega_max);
  const double b1 = e_max > 0 ? e_max / (c_inv * dv * eps / dt + e_max) : 0.0;
  k.nls1 = std::sqrt(std::max(a1, b1));
  const double eta_min = 2.0 * e2 + omega_min - 2.0 * std::pow(eps, 2.5);
  if (eta_min > 0) {
    const double a2 = omega_max / (2.0 * e2 + omega_max - 2.0 * std::pow(eps, 2.5));
    const double b2 = e_max > 0 ? e_max / (c_inv * dv * std::pow(eps, 1.5) + e_max) : 0.0;
    k.nls2 = std::sqrt(std::max(a2, b2));
  }
  k.nest = std::sqrt(omega_max / (2.0 * e2 + omega_max));
  return k;
}

double inverse_inequality_constant(const PhaseMesh& mesh) {
  // Trace at eta = -1/2 of u0 + u2 eta, per unit x-length: (u0 - u2/2)^2.
  // Cell mass per unit x-length: dv (u0^2 + u2^2 / 12).
  Eigen::Matrix2d trace;
  trace << 1.0, -0.5, -0.5, 0.25;
  Eigen::Matrix2d mass;
  mass << mesh.dv, 0.0, 0.0, mesh.dv / 12.0;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(trace, mass);
  const double lmax = es.eigenvalues().maxCoeff();  // ||Tu||^2 <= lmax ||u||^2
  return 1.0 / (lmax * mesh.dv);
}

namespace {

double potential_at(const Potential& phi, int i, double xi) {
  const int n = static_cast<int>(phi.nodes.size());
  const double l = phi.nodes[i];
  const double r = phi.nodes[phi.periodic ? (i + 1) % n : i + 1];
  return 0.5 * (l + r) + xi * (r - l);
}

double trace_sum_at(const BoundaryTrace& t, int i, double xi) {
  return t.positive.at(i, xi) + t.negative.at(i, xi);
}

double nls_norm(const SolverState& y, const EffectiveField& e, const Potential& phi,
                const SweepContext& ctx, double c_inv, bool second) {
  const PhaseMesh& m = y.mesh();
  const GaussRule& g = gauss2();
  const double m0 = maxwellian(0.0, ctx.theta);
  const double eps = ctx.eps, e2 = eps * eps / ctx.dt;
  const BoundaryTrace t = mask_traces(y.trace, e);
  double s = 0;
  for (int i = 0; i < m.nx; ++i) {
    for (int q = 0; q < 2; ++q) {
      const double xi = g.nodes[q];
      const double om = ctx.omega_gauss[2 * i + q];
      const double sig = y.rho.at(i, xi), r = trace_sum_at(t, i, xi);
      const double wsig = second ? 2.0 * e2 + om - 2.0 * std::pow(eps, 2.5) : e2 + om;
      const double wr = second ? eps * (2.0 * c_inv * std::pow(eps, 1.5) * m.dv + std::abs(e[i]))
                               : eps * (c_inv * eps * m.dv / ctx.dt + std::abs(e[i]));
      const double weight = std::exp(-potential_at(phi, i, xi) / ctx.theta);
      s += g.weights[q] * m.dx * 0.5 * (wsig * sig * sig + wr * r * r / m0) * weight;
    }
  }
  return s;
}

}  // namespace

double nest_norm_squared(const SpatialField& sigma, const SweepContext& ctx) {
  const PhaseMesh& m = sigma.mesh;
  const GaussRule& g = gauss2();
  const double e2 = 2.0 * ctx.eps * ctx.eps / ctx.dt;
  double s = 0;
  for (int i = 0; i < m.nx; ++i)
    for (int q = 0; q < 2; ++q) {
      const double v = sigma.at(i, g.nodes[q]);
      s += g.weights[q] * m.dx * 0.5 * (e2 + ctx.omega_gauss[2 * i + q]) * v * v;
    }
  return s;
}

double nls1_norm_squared(const SolverState& y, const EffectiveField& e, const Potential& phi,
                         const SweepContext& ctx, double c_inv) {
  return nls_norm(y, e, phi, ctx, c_inv, false);
}

double nls2_norm_squared(const SolverState& y, const EffectiveField& e, const Potential& phi,
                         const SweepContext& ctx, double c_inv) {
  return nls_norm(y, e, phi, ctx, c_inv, true);
}

double fitted_rate(const std::vector<double>& residuals, int window) {
  const int n = static_cast<int>(residuals.size());
  const int w = std::min(window, n);
  if (w < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = n - w; k < n; ++k) {
    const double x = k, yv = std::log(residuals[k]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
  }
  const double slope = (w * sxy - sx * sy) / (w * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace ksweep
