#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksweep/field.hpp"
#include "ksweep/state.hpp"
#include "ksweep/transport.hpp"

namespace ksweep {

enum class Method { nls_pic, nls_aa, nest_pic, nest_aa };
enum class InnerMethod { krylov, picard };

/// Accepts "nls-pic", "nls-aa", "nest-pic", "nest-aa"; throws otherwise.
Method parse_method(const std::string& name);
std::string to_string(Method m);
bool is_nest(Method m);
bool is_anderson(Method m);

InnerMethod parse_inner_method(const std::string& name);
std::string to_string(InnerMethod m);

struct SolverConfig {
  Method method = Method::nls_aa;
  bool ddsa = false;
  double outer_tol = 1e-8;
  double inner_tol = 1e-10;
  int aa_window = 15;
  double aa_relax = 1.0;
  long max_sweeps = 50000;
  bool fc_enabled = true;
  double fc_lo = 5e4;
  double fc_hi = 2e5;
  InnerMethod inner = InnerMethod::krylov;
  double ddsa_beta0 = 2.0;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

enum class StatusKind { converged, inf, residual, false_converged };

struct Status {
  StatusKind kind = StatusKind::converged;
  double residual = 0.0;

  /// "converged", "INF", "FC" or "R(8.4E-1)".
  std::string label() const;
  bool ok() const { return kind == StatusKind::converged; }
  bool terminal() const { return kind == StatusKind::inf || kind == StatusKind::residual; }
};

/// Residual in the one-decimal mantissa form used in failure labels.
std::string format_short_sci(double r);

struct StepOutcome {
  Status status;
  int iterations = 0;
  long sweeps = 0;
  double residual = 0.0;
  double wall_ms = 0.0;
  std::vector<double> history;
  bool startup = false;
};

/// INF if any residual is non-finite or exceeds blowup x the first; R(last)
/// on budget exhaustion; FC if converged with ||f||^2 outside (lo, hi).
Status classify(const std::vector<double>& history, bool budget_exhausted,
                double norm_squared, const SolverConfig& cfg,
                double blowup_factor = 1e10);

struct KappaEstimates {
  double nls1 = 0.0;
  std::optional<double> nls2;
  double nest = 0.0;
};

KappaEstimates kappa_estimates(double eps, double dt, double omega_max, double e_max,
                               double dv, double c_inv, double omega_min);

inline KappaEstimates kappa_estimates(double eps, double dt, double omega_max,
                                      double e_max, double dv, double c_inv) {
  return kappa_estimates(eps, dt, omega_max, e_max, dv, c_inv, omega_max);
}

/// Largest C with  C dv ||T u||^2 <= ||u||^2  over the P1 velocity basis of
/// one cell (trace at a velocity face against the cell mass).
double inverse_inequality_constant(const PhaseMesh& mesh);

/// Weighted diagnostic norms (squared). `phi` supplies the e^{-Phi/theta} weight.
double nest_norm_squared(const SpatialField& sigma, const SweepContext& ctx);
double nls1_norm_squared(const SolverState& y, const EffectiveField& e, const Potential& phi,
                         const SweepContext& ctx, double c_inv);
double nls2_norm_squared(const SolverState& y, const EffectiveField& e, const Potential& phi,
                         const SweepContext& ctx, double c_inv);

/// Geometric rate from the last `window` residuals (least-squares slope of log r).
double fitted_rate(const std::vector<double>& residuals, int window = 20);

}  // namespace ksweep
