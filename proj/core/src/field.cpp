#include "ksweep/field.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace ksweep {

struct PoissonSolver::Periodic {
  Eigen::LLT<Eigen::MatrixXd> llt;
};

PoissonSolver::PoissonSolver(const PhaseMesh& mesh, PoissonBC bc, double scale, double zeta)
    : mesh_(mesh), bc_(bc), scale_(scale), zeta_(zeta) {
  if (!bc_.periodic) return;
  const int n = mesh_.nx;
  if (n < 2) throw std::invalid_argument("periodic Poisson needs at least two cells");
  // Cyclic stiffness plus a rank-one term fixing the mean; SPD for n >= 2.
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, 1.0 / mesh_.dx);
  for (int i = 0; i < n; ++i) {
    k(i, i) += 2.0 / mesh_.dx;
    k(i, (i + 1) % n) -= 1.0 / mesh_.dx;
    k(i, (i + n - 1) % n) -= 1.0 / mesh_.dx;
  }
  periodic_ = std::make_unique<Periodic>();
  periodic_->llt.compute(k);
  if (periodic_->llt.info() != Eigen::Success)
    throw std::runtime_error("periodic Poisson factorization failed");
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

Potential PoissonSolver::solve(const SpatialField& rho, const SpatialField& doping,
                               Compatibility mode) const {
  const int n = mesh_.nx;
  const double dx = mesh_.dx;
  // Nodal load b_i = -int g phi_i with g = scale (zeta rho - D), linear per cell.
  std::vector<double> b(n + 1, 0.0);
  double total = 0.0, magnitude = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g0 = scale_ * (zeta_ * rho.mean(i) - doping.mean(i));
    const double g1 = scale_ * (zeta_ * rho.slope(i) - doping.slope(i));
    b[i] -= dx * (g0 / 2.0 - g1 / 12.0);
    b[i + 1] -= dx * (g0 / 2.0 + g1 / 12.0);
    total += dx * g0;
    magnitude += dx * (std::abs(g0) + std::abs(g1) / 2.0);
  }

  Potential phi;
  phi.dx = dx;
  phi.periodic = bc_.periodic;
  if (bc_.periodic) {
    b[0] += b[n];
    b.pop_back();
    if (std::abs(total) > 1e-10 * std::max(magnitude, 1e-300)) {
      if (mode == Compatibility::strict)
        throw std::domain_error("periodic Poisson load has nonzero mean");
    }
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= n;
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = b[i] - mean;
    const Eigen::VectorXd sol = periodic_->llt.solve(rhs);
    phi.nodes.assign(sol.data(), sol.data() + n);
    return phi;
  }

  phi.nodes.assign(n + 1, 0.0);
  phi.nodes[0] = bc_.left;
  phi.nodes[n] = bc_.right;
  const int m = n - 1;
  if (m <= 0) return phi;
  // Thomas algorithm on the interior nodes 1..n-1.
  std::vector<double> diag(m, 2.0 / dx), sup(m, -1.0 / dx), rhs(m);
  for (int k = 0; k < m; ++k) rhs[k] = b[k + 1];
  rhs[0] += bc_.left / dx;
  rhs[m - 1] += bc_.right / dx;
  const double sub = -1.0 / dx;
  for (int k = 1; k < m; ++k) {
    const double l = sub / diag[k - 1];
    diag[k] -= l * sup[k - 1];
    rhs[k] -= l * rhs[k - 1];
  }
  phi.nodes[m] = rhs[m - 1] / diag[m - 1];
  for (int k = m - 2; k >= 0; --k)
    phi.nodes[k + 1] = (rhs[k] - sup[k] * phi.nodes[k + 2]) / diag[k];
  return phi;
}

Potential poisson_solve(const SpatialField& rho, const SpatialField& doping,
                        const PoissonBC& bc, double scale, double zeta,
                        Compatibility mode) {
  return PoissonSolver(rho.mesh, bc, scale, zeta).solve(rho, doping, mode);
}

EffectiveField electric_field(const Potential& phi, double field_scale) {
  const int n = phi.periodic ? static_cast<int>(phi.nodes.size())
                             : static_cast<int>(phi.nodes.size()) - 1;
  EffectiveField e(n);
  for (int i = 0; i < n; ++i) {
    const double right = phi.nodes[phi.periodic ? (i + 1) % n : i + 1];
    e.values[i] = field_scale * (right - phi.nodes[i]) / phi.dx;
  }
  return e;
}

SpatialField moment_P(const PhaseField& f) {
  const PhaseMesh& m = f.mesh;
  SpatialField rho(m);
  for (int i = 0; i < m.nx; ++i) {
    double s0 = 0, s1 = 0;
    for (int j = 0; j < m.nv; ++j) {
      const double* u = f.cell(i, j);
      s0 += u[0];
      s1 += u[1];
    }
    rho.coeffs[2 * i] = m.dv * s0;
    rho.coeffs[2 * i + 1] = m.dv * s1;
  }
  return rho;
}

BoundaryTrace face_traces(const PhaseField& f) {
  const PhaseMesh& m = f.mesh;
  const int j0 = m.nv_negative;
  BoundaryTrace t(m);
  for (int i = 0; i < m.nx; ++i) {
    const double* up = f.cell(i, j0);
    t.positive.coeffs[2 * i] = up[0] - 0.5 * up[2];
    t.positive.coeffs[2 * i + 1] = up[1];
    const double* un = f.cell(i, j0 - 1);
    t.negative.coeffs[2 * i] = un[0] + 0.5 * un[2];
    t.negative.coeffs[2 * i + 1] = un[1];
  }
  return t;
}

BoundaryTrace mask_traces(const BoundaryTrace& t, const EffectiveField& e) {
  BoundaryTrace out(t.positive.mesh);
  for (int i = 0; i < static_cast<int>(e.size()); ++i) {
    for (int k = 2 * i; k < 2 * i + 2; ++k) {
      if (e[i] < 0) out.positive.coeffs[k] = t.positive.coeffs[k];
      if (e[i] > 0) out.negative.coeffs[k] = t.negative.coeffs[k];
    }
  }
  return out;
}

BoundaryTrace trace_T(const PhaseField& f, const EffectiveField& e) {
  return mask_traces(face_traces(f), e);
}

}  // namespace ksweep
