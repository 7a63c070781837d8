#include "ksweep/transport.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ksweep/field.hpp"
#include "ksweep/quadrature.hpp"

namespace ksweep {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Vec3 solve3(Mat3 a, Vec3 b) {
  for (int k = 0; k < 3; ++k) {
    int p = k;
    for (int r = k + 1; r < 3; ++r)
      if (std::abs(a[r][k]) > std::abs(a[p][k])) p = r;
    if (a[p][k] == 0.0) throw std::runtime_error("singular local transport system");
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (int r = k + 1; r < 3; ++r) {
      const double l = a[r][k] / a[k][k];
      for (int c = k; c < 3; ++c) a[r][c] -= l * a[k][c];
      b[r] -= l * b[k];
    }
  }
  Vec3 x{};
  for (int k = 2; k >= 0; --k) {
    double s = b[k];
    for (int c = k + 1; c < 3; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

// Column-constant pieces of the local system.
struct ColumnData {
  double s0 = 0, s1 = 0, s2 = 0;  // sum_q w sigma_t xi^k
  double x0 = 0, x1 = 0;          // dx * sum_q w (omega/eps) sigma xi^k
};

ColumnData column_data(const PhaseMesh& m, const SweepContext& ctx,
                       const SpatialField& sigma, int i) {
  const GaussRule& g = gauss2();
  ColumnData d;
  for (int q = 0; q < 2; ++q) {
    const double xi = g.nodes[q], w = g.weights[q];
    const double om = ctx.omega_gauss[2 * i + q];
    const double st = ctx.time_coeff * ctx.eps / ctx.dt + om / ctx.eps;
    d.s0 += w * st;
    d.s1 += w * st * xi;
    d.s2 += w * st * xi * xi;
    const double sc = om / ctx.eps * sigma.at(i, xi);
    d.x0 += w * sc;
    d.x1 += w * sc * xi;
  }
  d.x0 *= m.dx;
  d.x1 *= m.dx;
  return d;
}

// Inflow data entering a cell: x-face moments (mu0, mu1) and the v-face
// upwind trace G0 + G1 xi.
struct Inflow {
  double mu0 = 0, mu1 = 0;
  double g0 = 0, g1 = 0;
};

void local_system(const PhaseMesh& m, const SweepContext& ctx, const ColumnData& cd,
                  int i, int j, double ei, const Inflow& in, Mat3& a, Vec3& rhs) {
  const double h = m.dx, k = m.dv, hk = h * k;
  const double vc = m.vc(j);
  const double sv = vc > 0 ? 1.0 : -1.0;
  const double avc = std::abs(vc);
  const double s_out = 0.5 * sv;
  const double s_in = -s_out;

  a = Mat3{};
  a[1][0] = -k * vc;
  a[1][2] = -k * k / 12.0;
  a[2][0] = -ei * h;

  a[0][0] += hk * cd.s0;
  a[0][1] += hk * cd.s1;
  a[1][0] += hk * cd.s1;
  a[1][1] += hk * cd.s2;
  a[2][2] += hk * cd.s0 / 12.0;

  const double c0 = k * avc, c1 = k * sv * k / 12.0, c2 = k * avc / 12.0;
  a[0][0] += c0;
  a[0][1] += s_out * c0;
  a[0][2] += c1;
  a[1][0] += s_out * c0;
  a[1][1] += s_out * s_out * c0;
  a[1][2] += s_out * c1;
  a[2][0] += c1;
  a[2][1] += s_out * c1;
  a[2][2] += c2;

  const double ae = std::abs(ei);
  const double t_out = ei > 0 ? 0.5 : -0.5;
  if (ae > 0) {
    const double f = ae * h;
    a[0][0] += f;
    a[0][2] += f * t_out;
    a[1][1] += f / 12.0;
    a[2][0] += f * t_out;
    a[2][2] += f * t_out * t_out;
  }

  const double* src = ctx.explicit_source.cell(i, j);
  rhs[0] = hk * src[0] + cd.x0 * ctx.maxwell_m0[j];
  rhs[1] = hk * src[1] / 12.0 + cd.x1 * ctx.maxwell_m0[j];
  rhs[2] = hk * src[2] / 12.0 + cd.x0 * ctx.maxwell_m1[j];

  rhs[0] += in.mu0;
  rhs[1] += s_in * in.mu0;
  rhs[2] += in.mu1;

  if (ae > 0) {
    const double f = ae * h;
    rhs[0] += f * in.g0;
    rhs[1] += f * in.g1 / 12.0;
    rhs[2] += f * (-t_out) * in.g0;
  }
}

// x-face moments of a neighbor's trace A + B eta, seen by a cell with velocity vc.
void trace_moments(const PhaseMesh& m, int j, double a, double b, double& mu0,
                   double& mu1) {
  const double k = m.dv, vc = m.vc(j);
  const double sv = vc > 0 ? 1.0 : -1.0, avc = std::abs(vc);
  mu0 = k * (avc * a + sv * k / 12.0 * b);
  mu1 = k * (sv * k / 12.0 * a + avc / 12.0 * b);
}

}  // namespace

double EffectiveField::max_abs() const {
  double r = 0;
  for (double v : values) r = std::max(r, std::abs(v));
  return r;
}

double maxwellian(double v, double theta) {
  return std::exp(-v * v / (2.0 * theta)) / std::sqrt(2.0 * std::numbers::pi * theta);
}

std::array<double, 2> maxwellian_moments(double a, double b, double theta) {
  const double s = std::sqrt(2.0 * theta);
  const double m0 = 0.5 * (std::erf(b / s) - std::erf(a / s));
  const double first = theta * (maxwellian(a, theta) - maxwellian(b, theta));
  const double c = 0.5 * (a + b);
  return {m0, (first - c * m0) / (b - a)};
}

InflowMoments inflow_moments(const PhaseMesh& mesh,
                             const std::function<double(double)>& left,
                             const std::function<double(double)>& right) {
  const GaussRule& g = gauss4();
  InflowMoments out(mesh);
  for (int j = 0; j < mesh.nv; ++j) {
    const bool pos = mesh.positive_velocity(j);
    double m0 = 0, m1 = 0;
    for (int q = 0; q < g.size(); ++q) {
      const double eta = g.nodes[q];
      const double v = mesh.vc(j) + eta * mesh.dv;
      const double f = pos ? left(v) : right(v);
      m0 += g.weights[q] * std::abs(v) * f;
      m1 += g.weights[q] * std::abs(v) * f * eta;
    }
    out.m0[j] = mesh.dv * m0;
    out.m1[j] = mesh.dv * m1;
  }
  return out;
}

InflowMoments inflow_from_traces(const PhaseMesh& mesh, std::span<const double> traces) {
  if (traces.size() != static_cast<size_t>(2 * mesh.nv))
    throw std::invalid_argument("trace block size mismatch");
  InflowMoments out(mesh);
  for (int j = 0; j < mesh.nv; ++j)
    trace_moments(mesh, j, traces[2 * j], traces[2 * j + 1], out.m0[j], out.m1[j]);
  return out;
}

std::vector<double> outflow_traces(const PhaseField& f) {
  const PhaseMesh& m = f.mesh;
  std::vector<double> t(2 * m.nv);
  for (int j = 0; j < m.nv; ++j) {
    const bool pos = m.positive_velocity(j);
    const double* u = f.cell(pos ? m.nx - 1 : 0, j);
    t[2 * j] = u[0] + (pos ? 0.5 : -0.5) * u[1];
    t[2 * j + 1] = u[2];
  }
  return t;
}

double SweepContext::omega_max() const {
  double r = 0;
  for (double w : omega_gauss) r = std::max(r, w);
  for (double w : omega_nodes) r = std::max(r, w);
  return r;
}

SweepContext make_sweep_context(const PhaseMesh& mesh, double eps, double dt,
                                double time_coeff, double theta,
                                const SpatialFunction& omega) {
  if (!(eps > 0) || !(dt > 0) || !(theta > 0) || !(time_coeff > 0))
    throw std::invalid_argument("sweep context needs eps, dt, theta, c0 > 0");
  SweepContext ctx;
  ctx.eps = eps;
  ctx.dt = dt;
  ctx.time_coeff = time_coeff;
  ctx.theta = theta;
  const GaussRule& g2 = gauss2();
  auto checked = [](double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("omega must lie in [0, 1]");
    return w;
  };
  ctx.omega_gauss.resize(2 * mesh.nx);
  for (int i = 0; i < mesh.nx; ++i)
    for (int q = 0; q < 2; ++q)
      ctx.omega_gauss[2 * i + q] = checked(omega(mesh.xc(i) + g2.nodes[q] * mesh.dx));
  ctx.omega_nodes.resize(mesh.nx + 1);
  for (int i = 0; i <= mesh.nx; ++i)
    ctx.omega_nodes[i] = checked(omega(mesh.x_lo + i * mesh.dx));

  // Closed form keeps the discrete collision operator mass-conservative on
  // coarse velocity cells.
  ctx.maxwell_m0.assign(mesh.nv, 0.0);
  ctx.maxwell_m1.assign(mesh.nv, 0.0);
  for (int j = 0; j < mesh.nv; ++j) {
    const double a = mesh.v_lo + j * mesh.dv;
    const auto m = maxwellian_moments(a, a + mesh.dv, theta);
    ctx.maxwell_m0[j] = m[0];
    ctx.maxwell_m1[j] = m[1];
  }
  ctx.explicit_source = PhaseField(mesh);
  ctx.x_inflow = InflowMoments(mesh);
  return ctx;
}

double upwind_trace(double minus, double plus, double advect_normal) {
  const double s = advect_normal > 0 ? 1.0 : (advect_normal < 0 ? -1.0 : 0.0);
  return 0.5 * (minus + plus) - 0.5 * s * (plus - minus);
}

std::vector<int> sweep_ordering(const PhaseMesh& m, Subdomain sd, const EffectiveField& e) {
  const bool pos = sd == Subdomain::positive;
  const int jlo = pos ? m.nv_negative : 0;
  const int jhi = pos ? m.nv : m.nv_negative;
  std::vector<int> order;
  order.reserve(static_cast<size_t>(m.nx) * (jhi - jlo));
  for (int step = 0; step < m.nx; ++step) {
    const int i = pos ? step : m.nx - 1 - step;
    if (e[i] >= 0) {
      for (int j = jlo; j < jhi; ++j) order.push_back(m.cell(i, j));
    } else {
      for (int j = jhi - 1; j >= jlo; --j) order.push_back(m.cell(i, j));
    }
  }
  return order;
}

void sweep(Subdomain sd, const EffectiveField& e, const SweepContext& ctx,
           const SpatialField& sigma, const BoundaryTrace& r,
           const InflowMoments& x_inflow, PhaseField& out) {
  const PhaseMesh& m = out.mesh;
  const bool pos = sd == Subdomain::positive;
  const int jlo = pos ? m.nv_negative : 0;
  const int jhi = pos ? m.nv : m.nv_negative;
  const SpatialField& v0_trace = pos ? r.negative : r.positive;

  ColumnData cd;
  int current = -1;
  Mat3 a;
  Vec3 rhs;
  for (int c : sweep_ordering(m, sd, e)) {
    const int i = c / m.nv, j = c % m.nv;
    if (i != current) {
      cd = column_data(m, ctx, sigma, i);
      current = i;
    }
    const double ei = e[i];
    Inflow in;
    const int i_up = pos ? i - 1 : i + 1;
    if (i_up >= 0 && i_up < m.nx) {
      const double* u = out.cell(i_up, j);
      trace_moments(m, j, u[0] + (pos ? 0.5 : -0.5) * u[1], u[2], in.mu0, in.mu1);
    } else {
      in.mu0 = x_inflow.m0[j];
      in.mu1 = x_inflow.m1[j];
    }
    if (ei != 0) {
      const int j_up = ei > 0 ? j - 1 : j + 1;
      if (j_up >= jlo && j_up < jhi) {
        const double* u = out.cell(i, j_up);
        const double tb = ei > 0 ? 0.5 : -0.5;
        in.g0 = u[0] + tb * u[2];
        in.g1 = u[1];
      } else if (j_up >= 0 && j_up < m.nv) {
        in.g0 = v0_trace.mean(i);
        in.g1 = v0_trace.slope(i);
      }
    }
    local_system(m, ctx, cd, i, j, ei, in, a, rhs);
    const Vec3 u = solve3(a, rhs);
    double* dst = out.cell(c);
    dst[0] = u[0];
    dst[1] = u[1];
    dst[2] = u[2];
  }
}

PhaseField apply_N(const EffectiveField& e, const SweepContext& ctx,
                   const SpatialField& sigma, const BoundaryTrace& r,
                   const InflowMoments& x_inflow, SweepCounter& counter) {
  counter.tick();
  PhaseField out(sigma.mesh);
  sweep(Subdomain::positive, e, ctx, sigma, r, x_inflow, out);
  sweep(Subdomain::negative, e, ctx, sigma, r, x_inflow, out);
  return out;
}

PhaseField apply_N(const EffectiveField& e, const SweepContext& ctx,
                   const SpatialField& sigma, const BoundaryTrace& r,
                   SweepCounter& counter) {
  return apply_N(e, ctx, sigma, r, ctx.x_inflow, counter);
}

std::vector<double> global_residual_vector(const PhaseField& f, const EffectiveField& e,
                                           const SweepContext& ctx) {
  const PhaseMesh& m = f.mesh;
  const SpatialField sigma = moment_P(f);
  std::vector<double> res(m.unknowns(), 0.0);
  Mat3 a;
  Vec3 rhs;
  for (int i = 0; i < m.nx; ++i) {
    const ColumnData cd = column_data(m, ctx, sigma, i);
    const double ei = e[i];
    for (int j = 0; j < m.nv; ++j) {
      const bool pos = m.positive_velocity(j);
      Inflow in;
      int i_up = pos ? i - 1 : i + 1;
      if (m.x_periodic) i_up = (i_up + m.nx) % m.nx;
      if (i_up >= 0 && i_up < m.nx) {
        const double* u = f.cell(i_up, j);
        trace_moments(m, j, u[0] + (pos ? 0.5 : -0.5) * u[1], u[2], in.mu0, in.mu1);
      } else {
        in.mu0 = ctx.x_inflow.m0[j];
        in.mu1 = ctx.x_inflow.m1[j];
      }
      if (ei != 0) {
        const int j_up = ei > 0 ? j - 1 : j + 1;
        if (j_up >= 0 && j_up < m.nv) {
          const double* u = f.cell(i, j_up);
          const double tb = ei > 0 ? 0.5 : -0.5;
          in.g0 = u[0] + tb * u[2];
          in.g1 = u[1];
        }
      }
      local_system(m, ctx, cd, i, j, ei, in, a, rhs);
      const double* u = f.cell(i, j);
      for (int r = 0; r < 3; ++r) {
        double s = -rhs[r];
        for (int c = 0; c < 3; ++c) s += a[r][c] * u[c];
        res[3 * m.cell(i, j) + r] = s;
      }
    }
  }
  return res;
}

double global_residual(const PhaseField& f, const EffectiveField& e,
                       const SweepContext& ctx) {
  double s = 0;
  for (double r : global_residual_vector(f, e, ctx)) s += r * r;
  return std::sqrt(s);
}

}  // namespace ksweep
