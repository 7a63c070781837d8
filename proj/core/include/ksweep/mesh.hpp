#pragma once

#include <functional>
#include <vector>

namespace ksweep {

/// Uniform Cartesian phase-space grid X x V with cells K = K^x x K^v.
///
/// Cells are numbered column-major: cell (i, j) -> i * nv + j, where i indexes
/// position and j velocity, so each spatial column is contiguous in memory.
/// The line v = 0 is always a cell interface; `nv_negative` counts the
/// velocity cells below it.
struct PhaseMesh {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double v_lo = -1.0;
  double v_hi = 1.0;
  int nx = 1;
  int nv = 2;
  double dx = 1.0;
  double dv = 1.0;
  bool x_periodic = false;
  int nv_negative = 1;

  int cells() const { return nx * nv; }
  int unknowns() const { return 3 * nx * nv; }
  int spatial_unknowns() const { return 2 * nx; }
  int cell(int i, int j) const { return i * nv + j; }
  double xc(int i) const { return x_lo + (i + 0.5) * dx; }
  double vc(int j) const { return v_lo + (j + 0.5) * dv; }
  double x_length() const { return x_hi - x_lo; }
  bool positive_velocity(int j) const { return j >= nv_negative; }

  bool operator==(const PhaseMesh&) const = default;
};

/// Builds a mesh; throws std::invalid_argument on non-positive extents or
/// counts, or when v = 0 does not fall on a velocity-cell interface.
PhaseMesh build_mesh(double x_lo, double x_hi, double v_lo, double v_hi, int nx,
                     int nv, bool x_periodic = false);

/// DG P1 field on the phase-space grid. Per cell the coefficients (c0, c1, c2)
/// multiply the scaled monomials {1, (x - x_c)/dx, (v - v_c)/dv}.
struct PhaseField {
  PhaseMesh mesh;
  std::vector<double> coeffs;

  PhaseField() = default;
  explicit PhaseField(const PhaseMesh& m) : mesh(m), coeffs(m.unknowns(), 0.0) {}

  double* cell(int c) { return coeffs.data() + 3 * c; }
  const double* cell(int c) const { return coeffs.data() + 3 * c; }
  double* cell(int i, int j) { return cell(mesh.cell(i, j)); }
  const double* cell(int i, int j) const { return cell(mesh.cell(i, j)); }
};

/// DG P1 field over the spatial cells: per cell (c0, c1) for {1, (x - x_c)/dx}.
struct SpatialField {
  PhaseMesh mesh;
  std::vector<double> coeffs;

  SpatialField() = default;
  explicit SpatialField(const PhaseMesh& m)
      : mesh(m), coeffs(m.spatial_unknowns(), 0.0) {}

  double mean(int i) const { return coeffs[2 * i]; }
  double slope(int i) const { return coeffs[2 * i + 1]; }
  /// Value at reference coordinate xi in [-1/2, 1/2] of cell i.
  double at(int i, double xi) const {
    return coeffs[2 * i] + coeffs[2 * i + 1] * xi;
  }
};

using PhaseFunction = std::function<double(double x, double v)>;
using SpatialFunction = std::function<double(double x)>;

/// Cell-wise L2 projection onto {1, xi, eta} with an n-point tensor Gauss rule.
/// Throws std::domain_error if fn returns a non-finite value.
PhaseField project(const PhaseFunction& fn, const PhaseMesh& mesh,
                   int gauss_points = 4);

/// Cell-wise L2 projection onto {1, xi} over the spatial cells.
SpatialField project_spatial(const SpatialFunction& fn, const PhaseMesh& mesh,
                             int gauss_points = 4);

/// Point value of the owning cell's polynomial. Points on an interior
/// interface are assigned to the upper (right / faster) cell.
/// Throws std::out_of_range outside the domain.
double evaluate(const PhaseField& field, double x, double v);

double evaluate(const SpatialField& field, double x);

/// Interface orientation; the positive normal n_e points toward +x or +v.
enum class EdgeDirection { x, v };

enum class Side { minus, plus };

/// One cell interface: `index` is the node index along the normal direction
/// (0..nx for x-edges, 0..nv for v-edges).
struct Edge {
  EdgeDirection direction;
  int index;
};

/// One-sided limit g^-(z) (Side::minus, the cell below/left of the edge) or
/// g^+(z) at `point` (v for x-edges, x for v-edges). Boundary edges only have
/// the interior side; asking for the exterior side throws std::out_of_range.
double evaluate_limit(const PhaseField& field, Edge edge, double point, Side side);

/// [g] = g^+ - g^- on an interior edge.
double jump(const PhaseField& field, Edge edge, double point);

/// <g> = (g^+ + g^-)/2 on an interior edge.
double average(const PhaseField& field, Edge edge, double point);

/// Exact squared L2 norm from coefficients (the basis is orthogonal with
/// mass diag(1, 1/12, 1/12) * dx * dv).
double l2_norm_squared(const PhaseField& field);

double l2_norm_squared(const SpatialField& field);

/// Flattened 4x-oversampled point grid used for plotting exports:
/// for every cell, 4 x 4 sub-cell midpoints in (x, v) with their values.
struct SampledPoint {
  double x;
  double v;
  double value;
};
std::vector<SampledPoint> sample_oversampled(const PhaseField& field, int factor = 4);

}  // namespace ksweep
