#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksweep/mesh.hpp"
#include "ksweep/transport.hpp"

namespace ksweep {

/// Fixed-point unknown: density, v = 0 traces and, for x-periodic problems,
/// the outflow traces fed back as x-inflow.
///
/// Flat layout: rho (2 nx) | trace.positive (2 nx) | trace.negative (2 nx) |
/// periodic (2 nv, only when periodic).
struct SolverState {
  SpatialField rho;
  BoundaryTrace trace;
  std::vector<double> periodic;

  SolverState() = default;
  SolverState(const PhaseMesh& m, bool with_periodic)
      : rho(m), trace(m), periodic(with_periodic ? 2 * m.nv : 0, 0.0) {}

  const PhaseMesh& mesh() const { return rho.mesh; }
  bool has_periodic() const { return !periodic.empty(); }
  std::size_t size() const { return 6 * rho.mesh.nx + periodic.size(); }

  std::vector<double> flatten() const {
    std::vector<double> y;
    y.reserve(size());
    y.insert(y.end(), rho.coeffs.begin(), rho.coeffs.end());
    y.insert(y.end(), trace.positive.coeffs.begin(), trace.positive.coeffs.end());
    y.insert(y.end(), trace.negative.coeffs.begin(), trace.negative.coeffs.end());
    y.insert(y.end(), periodic.begin(), periodic.end());
    return y;
  }

  static SolverState unflatten(const PhaseMesh& m, std::span<const double> y,
                               bool with_periodic) {
    SolverState s(m, with_periodic);
    if (y.size() != s.size()) throw std::invalid_argument("state vector size mismatch");
    const std::size_t n = 2 * m.nx;
    std::copy(y.begin(), y.begin() + n, s.rho.coeffs.begin());
    std::copy(y.begin() + n, y.begin() + 2 * n, s.trace.positive.coeffs.begin());
    std::copy(y.begin() + 2 * n, y.begin() + 3 * n, s.trace.negative.coeffs.begin());
    std::copy(y.begin() + 3 * n, y.end(), s.periodic.begin());
    return s;
  }
};

}  // namespace ksweep
