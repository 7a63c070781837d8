#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksweep/mesh.hpp"

namespace ksweep {

/// Per-spatial-cell constant advection velocity in v (field scale times the
/// potential gradient).
struct EffectiveField {
  std::vector<double> values;

  EffectiveField() = default;
  explicit EffectiveField(int nx, double value = 0.0) : values(nx, value) {}
  explicit EffectiveField(std::vector<double> v) : values(std::move(v)) {}

  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }
  double max_abs() const;
};

/// Velocity-sign subdomain: positive is v > 0, negative is v < 0.
enum class Subdomain { positive, negative };

/// Upwind traces of f on the line v = 0. `positive` is the limit from v > 0
/// and is nonzero only in columns with E < 0; `negative` is the limit from
/// v < 0 and is nonzero only where E > 0.
struct BoundaryTrace {
  SpatialField positive;
  SpatialField negative;

  BoundaryTrace() = default;
  explicit BoundaryTrace(const PhaseMesh& m) : positive(m), negative(m) {}
};

/// Weighted moments of the x-inflow data per velocity cell:
/// m0_j = int |v| f_in dv and m1_j = int |v| f_in eta dv over K^v_j.
/// Cells with v > 0 take data at x_lo, cells with v < 0 at x_hi.
struct InflowMoments {
  std::vector<double> m0;
  std::vector<double> m1;

  InflowMoments() = default;
  explicit InflowMoments(const PhaseMesh& m) : m0(m.nv, 0.0), m1(m.nv, 0.0) {}
};

double maxwellian(double v, double theta);

/// Exact cell moments of the Maxwellian on [a, b]: int M dv and
/// int M eta dv with eta = (v - (a+b)/2) / (b - a).
std::array<double, 2> maxwellian_moments(double a, double b, double theta);

/// Inflow moments from boundary data f(v) on each x-end (4-point Gauss).
InflowMoments inflow_moments(const PhaseMesh& mesh,
                             const std::function<double(double)>& left,
                             const std::function<double(double)>& right);

/// Inflow moments from per-velocity-cell linear traces (A_j + B_j eta), the
/// layout produced by outflow_traces. Used for periodic wrap-around.
InflowMoments inflow_from_traces(const PhaseMesh& mesh, std::span<const double> traces);

/// Outflow traces at the x-ends: 2 * nv values (A_j, B_j). v > 0 cells are
/// read at the right face of the last column, v < 0 cells at the left face of
/// the first column.
std::vector<double> outflow_traces(const PhaseField& f);

/// Everything a sweep needs besides the field, scattering density and trace.
struct SweepContext {
  double eps = 1.0;
  double dt = 1.0;
  double time_coeff = 1.0;
  double theta = 1.0;
  std::vector<double> omega_gauss;  // 2 per spatial cell, 2-point Gauss nodes
  std::vector<double> omega_nodes;  // nx + 1 node values
  std::vector<double> maxwell_m0;   // per velocity cell: int M dv
  std::vector<double> maxwell_m1;   // per velocity cell: int M eta dv
  PhaseField explicit_source;       // eps * (q + history), as DG coefficients
  InflowMoments x_inflow;

  double omega_max() const;
};

/// Throws std::invalid_argument on eps, dt, theta <= 0 or omega outside [0, 1].
SweepContext make_sweep_context(const PhaseMesh& mesh, double eps, double dt,
                                double time_coeff, double theta,
                                const SpatialFunction& omega);

/// Upwind value of a two-sided trace: minus for a.n > 0, plus for a.n < 0 and
/// the average for a.n = 0.
double upwind_trace(double minus, double plus, double advect_normal);

/// Cell visitation order for one subdomain. Columns follow the x-flow
/// direction; within a column v runs away from the inflow v-face.
std::vector<int> sweep_ordering(const PhaseMesh& mesh, Subdomain sd,
                                const EffectiveField& e);

/// Inverts the subdomain's advection-reaction operator cell by cell, writing
/// that subdomain's cells of `out`. x-inflow comes from `x_inflow`.
void sweep(Subdomain sd, const EffectiveField& e, const SweepContext& ctx,
           const SpatialField& sigma, const BoundaryTrace& r,
           const InflowMoments& x_inflow, PhaseField& out);

struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("sweep budget exhausted") {}
};

class SweepCounter {
 public:
  explicit SweepCounter(long budget = std::numeric_limits<long>::max())
      : budget_(budget) {}

  /// Registers one sweep; throws BudgetExhausted when none remain.
  void tick() {
    if (count_ >= budget_) throw BudgetExhausted();
    ++count_;
  }
  long count() const { return count_; }
  long budget() const { return budget_; }
  long remaining() const { return budget_ - count_; }

 private:
  long count_ = 0;
  long budget_;
};

/// Both subdomain sweeps; one tick of the counter.
PhaseField apply_N(const EffectiveField& e, const SweepContext& ctx,
                   const SpatialField& sigma, const BoundaryTrace& r,
                   const InflowMoments& x_inflow, SweepCounter& counter);

PhaseField apply_N(const EffectiveField& e, const SweepContext& ctx,
                   const SpatialField& sigma, const BoundaryTrace& r,
                   SweepCounter& counter);

/// Weak residual of the fully coupled discrete system for every test
/// function (scattering density from f itself, v = 0 and x-periodic
/// neighbors read from f). Length 3 * cells.
std::vector<double> global_residual_vector(const PhaseField& f, const EffectiveField& e,
                                           const SweepContext& ctx);

double global_residual(const PhaseField& f, const EffectiveField& e,
                       const SweepContext& ctx);

}  // namespace ksweep
