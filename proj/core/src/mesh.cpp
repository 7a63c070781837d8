#include "ksweep/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ksweep/quadrature.hpp"

namespace ksweep {

PhaseMesh build_mesh(double x_lo, double x_hi, double v_lo, double v_hi, int nx,
                     int nv, bool x_periodic) {
  if (nx < 1 || nv < 1) throw std::invalid_argument("build_mesh: cell counts must be positive");
  if (!(x_hi > x_lo) || !(v_hi > v_lo))
    throw std::invalid_argument("build_mesh: extents must be positive");
  PhaseMesh m;
  m.x_lo = x_lo;
  m.x_hi = x_hi;
  m.v_lo = v_lo;
  m.v_hi = v_hi;
  m.nx = nx;
  m.nv = nv;
  m.dx = (x_hi - x_lo) / nx;
  m.dv = (v_hi - v_lo) / nv;
  m.x_periodic = x_periodic;
  if (!(v_lo < 0.0 && v_hi > 0.0))
    throw std::invalid_argument("build_mesh: velocity range must contain v = 0 in its interior");
  const double jz = -v_lo / m.dv;
  const int j0 = static_cast<int>(std::lround(jz));
  if (std::abs(jz - j0) > 1e-9 || j0 < 1 || j0 > nv - 1)
    throw std::invalid_argument("build_mesh: v = 0 lies strictly inside a velocity cell (nv = " +
                                std::to_string(nv) + ")");
  m.nv_negative = j0;
  return m;
}

PhaseField project(const PhaseFunction& fn, const PhaseMesh& mesh, int gauss_points) {
  const GaussRule rule = gauss_legendre(gauss_points);
  PhaseField out(mesh);
  for (int i = 0; i < mesh.nx; ++i) {
    for (int j = 0; j < mesh.nv; ++j) {
      double m0 = 0.0, m1 = 0.0, m2 = 0.0;
      for (int a = 0; a < rule.size(); ++a) {
        const double xi = rule.nodes[a];
        const double x = mesh.xc(i) + mesh.dx * xi;
        for (int b = 0; b < rule.size(); ++b) {
          const double eta = rule.nodes[b];
          const double v = mesh.vc(j) + mesh.dv * eta;
          const double val = fn(x, v);
          if (!std::isfinite(val))
            throw std::domain_error("project: non-finite function value");
          const double w = rule.weights[a] * rule.weights[b] * val;
          m0 += w;
          m1 += w * xi;
          m2 += w * eta;
        }
      }
      double* c = out.cell(i, j);
      c[0] = m0;
      c[1] = 12.0 * m1;
      c[2] = 12.0 * m2;
    }
  }
  return out;
}

SpatialField project_spatial(const SpatialFunction& fn, const PhaseMesh& mesh,
                             int gauss_points) {
  const GaussRule rule = gauss_legendre(gauss_points);
  SpatialField out(mesh);
  for (int i = 0; i < mesh.nx; ++i) {
    double m0 = 0.0, m1 = 0.0;
    for (int a = 0; a < rule.size(); ++a) {
      const double xi = rule.nodes[a];
      const double val = fn(mesh.xc(i) + mesh.dx * xi);
      if (!std::isfinite(val))
        throw std::domain_error("project_spatial: non-finite function value");
      m0 += rule.weights[a] * val;
      m1 += rule.weights[a] * val * xi;
    }
    out.coeffs[2 * i] = m0;
    out.coeffs[2 * i + 1] = 12.0 * m1;
  }
  return out;
}

namespace {

int locate(double p, double lo, double h, int n, const char* what) {
  const double tol = 1e-12 * std::max(1.0, std::abs(h * n));
  if (p < lo - tol || p > lo + h * n + tol) throw std::out_of_range(std::string("evaluate: ") + what + " outside domain");
  int k = static_cast<int>(std::floor((p - lo) / h));
  if (k < 0) k = 0;
  if (k > n - 1) k = n - 1;
  return k;
}

double cell_value(const PhaseField& f, int i, int j, double xi, double eta) {
  const double* c = f.cell(i, j);
  return c[0] + c[1] * xi + c[2] * eta;
}

}  // namespace

double evaluate(const PhaseField& field, double x, double v) {
  const PhaseMesh& m = field.mesh;
  const int i = locate(x, m.x_lo, m.dx, m.nx, "x");
  const int j = locate(v, m.v_lo, m.dv, m.nv, "v");
  return cell_value(field, i, j, (x - m.xc(i)) / m.dx, (v - m.vc(j)) / m.dv);
}

double evaluate(const SpatialField& field, double x) {
  const PhaseMesh& m = field.mesh;
  const int i = locate(x, m.x_lo, m.dx, m.nx, "x");
  return field.at(i, (x - m.xc(i)) / m.dx);
}

double evaluate_limit(const PhaseField& field, Edge edge, double point, Side side) {
  const PhaseMesh& m = field.mesh;
  if (edge.direction == EdgeDirection::x) {
    if (edge.index < 0 || edge.index > m.nx) throw std::out_of_range("evaluate_limit: edge index");
    const int i = side == Side::minus ? edge.index - 1 : edge.index;
    if (i < 0 || i >= m.nx) throw std::out_of_range("evaluate_limit: no cell on that side");
    const int j = locate(point, m.v_lo, m.dv, m.nv, "v");
    const double xi = side == Side::minus ? 0.5 : -0.5;
    return cell_value(field, i, j, xi, (point - m.vc(j)) / m.dv);
  }
  if (edge.index < 0 || edge.index > m.nv) throw std::out_of_range("evaluate_limit: edge index");
  const int j = side == Side::minus ? edge.index - 1 : edge.index;
  if (j < 0 || j >= m.nv) throw std::out_of_range("evaluate_limit: no cell on that side");
  const int i = locate(point, m.x_lo, m.dx, m.nx, "x");
  const double eta = side == Side::minus ? 0.5 : -0.5;
  return cell_value(field, i, j, (point - m.xc(i)) / m.dx, eta);
}

double jump(const PhaseField& field, Edge edge, double point) {
  return evaluate_limit(field, edge, point, Side::plus) -
         evaluate_limit(field, edge, point, Side::minus);
}

double average(const PhaseField& field, Edge edge, double point) {
  return 0.5 * (evaluate_limit(field, edge, point, Side::plus) +
                evaluate_limit(field, edge, point, Side::minus));
}

double l2_norm_squared(const PhaseField& field) {
  double s = 0.0;
  for (int c = 0; c < field.mesh.cells(); ++c) {
    const double* u = field.cell(c);
    s += u[0] * u[0] + (u[1] * u[1] + u[2] * u[2]) / 12.0;
  }
  return s * field.mesh.dx * field.mesh.dv;
}

double l2_norm_squared(const SpatialField& field) {
  double s = 0.0;
  for (int i = 0; i < field.mesh.nx; ++i)
    s += field.mean(i) * field.mean(i) + field.slope(i) * field.slope(i) / 12.0;
  return s * field.mesh.dx;
}

std::vector<SampledPoint> sample_oversampled(const PhaseField& field, int factor) {
  const PhaseMesh& m = field.mesh;
  std::vector<SampledPoint> pts;
  pts.reserve(static_cast<size_t>(m.cells()) * factor * factor);
  for (int i = 0; i < m.nx; ++i) {
    for (int a = 0; a < factor; ++a) {
      const double xi = (a + 0.5) / factor - 0.5;
      for (int j = 0; j < m.nv; ++j) {
        for (int b = 0; b < factor; ++b) {
          const double eta = (b + 0.5) / factor - 0.5;
          pts.push_back({m.xc(i) + xi * m.dx, m.vc(j) + eta * m.dv,
                         cell_value(field, i, j, xi, eta)});
        }
      }
    }
  }
  return pts;
}

}  // namespace ksweep
