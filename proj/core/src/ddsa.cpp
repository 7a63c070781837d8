#include "ksweep/ddsa.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "ksweep/field.hpp"
#include "ksweep/quadrature.hpp"

namespace ksweep {

namespace {

// Value and derivative of the local basis {1, xi} at xi.
struct Trace {
  double value[2];
  double deriv[2];
};

Trace basis_at(double xi, double h) { return {{1.0, xi}, {0.0, 1.0 / h}}; }

}  // namespace

DriftDiffusionOperator dd_assemble(const EffectiveField& e, const SweepContext& ctx,
                                   const PhaseMesh& mesh, double beta0) {
  const int nx = mesh.nx;
  const double h = mesh.dx;
  for (double w : ctx.omega_gauss)
    if (!(w > 0)) throw std::invalid_argument("drift-diffusion operator needs omega > 0");
  for (double w : ctx.omega_nodes)
    if (!(w > 0)) throw std::invalid_argument("drift-diffusion operator needs omega > 0");

  const double eps = ctx.eps;
  const GaussRule& g = gauss2();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(16 * nx);
  auto add = [&](int row, int col, double v) { trip.emplace_back(row, col, eps * v); };

  for (int i = 0; i < nx; ++i) {
    const double react = ctx.time_coeff / ctx.dt * h;
    add(2 * i, 2 * i, react);
    add(2 * i + 1, 2 * i + 1, react / 12.0);
    double kappa = 0.0, b0 = 0.0, b1 = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double om = ctx.omega_gauss[2 * i + q];
      kappa += g.weights[q] / om;
      b0 += g.weights[q] * e[i] / om;
      b1 += g.weights[q] * e[i] / om * g.nodes[q];
    }
    // int phi' w' / omega with phi' = phi1 / h
    add(2 * i + 1, 2 * i + 1, kappa / h);
    // -int b phi w', w' = 1/h for the slope test function
    add(2 * i + 1, 2 * i, -b0);
    add(2 * i + 1, 2 * i + 1, -b1);
  }

  // Interface terms with [g] = g(right) - g(left); the exterior of a
  // boundary edge is zero and averages become one-sided values.
  for (int edge = 0; edge <= nx; ++edge) {
    const int left = edge - 1, right = edge;
    const bool has_l = left >= 0, has_r = right < nx;
    const double kappa = 1.0 / ctx.omega_nodes[edge];
    double e_edge;
    if (has_l && has_r)
      e_edge = 0.5 * (e[left] + e[right]);
    else
      e_edge = has_l ? e[left] : e[right];
    const double b = e_edge / ctx.omega_nodes[edge];
    const bool interior = has_l && has_r;
    const double avg = interior ? 0.5 : 1.0;
    // One-sided boundary fluxes need twice the interior penalty for coercivity.
    const double penalty = (interior ? 1.0 : 2.0) * beta0 * kappa / h;

    struct Side {
      int cell;
      double sign;  // contribution of this side's value to the jump
      Trace t;
    };
    std::vector<Side> sides;
    if (has_l) sides.push_back({left, -1.0, basis_at(0.5, h)});
    if (has_r) sides.push_back({right, 1.0, basis_at(-0.5, h)});

    for (const Side& ts : sides) {      // test side
      for (const Side& us : sides) {    // trial side
        for (int a = 0; a < 2; ++a) {
          for (int c = 0; c < 2; ++c) {
            const double jw = ts.sign * ts.t.value[a];
            const double jphi = us.sign * us.t.value[c];
            double v = kappa * avg * us.t.deriv[c] * jw;
            v += kappa * avg * ts.t.deriv[a] * jphi;
            v += penalty * jphi * jw;
            // drift: -b phi_upwind [w]
            const bool upwind = (b > 0 && us.sign < 0) || (b < 0 && us.sign > 0) ||
                                (b == 0 && interior);
            if (upwind) {
              const double weight = (b == 0) ? 0.5 : 1.0;
              v -= b * weight * us.t.value[c] * jw;
            }
            add(2 * ts.cell + a, 2 * us.cell + c, v);
          }
        }
      }
    }
  }

  DriftDiffusionOperator op;
  op.mesh = mesh;
  op.beta0 = beta0;
  op.matrix.resize(2 * nx, 2 * nx);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  return op;
}

std::vector<double> dd_rhs(const SolverState& y_star, const SolverState& y_prev,
                           const EffectiveField& e, const SweepContext& ctx) {
  const PhaseMesh& m = y_star.mesh();
  const GaussRule& g = gauss2();
  std::vector<double> rhs(2 * m.nx, 0.0);
  const BoundaryTrace ts = mask_traces(y_star.trace, e), tp = mask_traces(y_prev.trace, e);
  for (int i = 0; i < m.nx; ++i) {
    const double dt0 = ts.positive.mean(i) + ts.negative.mean(i) - tp.positive.mean(i) -
                       tp.negative.mean(i);
    const double dt1 = ts.positive.slope(i) + ts.negative.slope(i) - tp.positive.slope(i) -
                       tp.negative.slope(i);
    const double dr0 = y_star.rho.mean(i) - y_prev.rho.mean(i);
    const double dr1 = y_star.rho.slope(i) - y_prev.rho.slope(i);
    for (int q = 0; q < 2; ++q) {
      const double xi = g.nodes[q];
      const double val = std::abs(e[i]) * (dt0 + dt1 * xi) +
                         ctx.omega_gauss[2 * i + q] / ctx.eps * (dr0 + dr1 * xi);
      rhs[2 * i] += m.dx * g.weights[q] * val;
      rhs[2 * i + 1] += m.dx * g.weights[q] * val * xi;
    }
  }
  return rhs;
}

SpatialField dd_solve(const DriftDiffusionOperator& op, const std::vector<double>& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(op.matrix);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("drift-diffusion factorization failed");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = lu.solve(b);
  SpatialField phi(op.mesh);
  for (Eigen::Index k = 0; k < x.size(); ++k) phi.coeffs[k] = x[k];
  return phi;
}

SolverState ddsa_correct(const SolverState& y_star, const SolverState& y_prev,
                         const EffectiveField& e, const SweepContext& ctx,
                         bool correct_trace, double beta0) {
  const PhaseMesh& m = y_star.mesh();
  const DriftDiffusionOperator op = dd_assemble(e, ctx, m, beta0);
  const SpatialField phi = dd_solve(op, dd_rhs(y_star, y_prev, e, ctx));
  SolverState out = y_star;
  for (int k = 0; k < 2 * m.nx; ++k) out.rho.coeffs[k] += phi.coeffs[k];
  if (correct_trace) {
    // Both v = 0 limits move together so the active side stays consistent
    // when the sign of E changes between iterations.
    const double m0 = maxwellian(0.0, ctx.theta);
    for (int k = 0; k < 2 * m.nx; ++k) {
      out.trace.positive.coeffs[k] += m0 * phi.coeffs[k];
      out.trace.negative.coeffs[k] += m0 * phi.coeffs[k];
    }
  }
  return out;
}

}  // namespace ksweep
