#pragma once

#include <vector>

namespace ksweep {

/// Gauss-Legendre rule on the reference interval [-1/2, 1/2]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule (n >= 1), nodes computed by Newton iteration
/// on the Legendre polynomial.
GaussRule gauss_legendre(int n);

/// Cached 2-point rule (exact for cubics): volume integrals of P1 x P1 products.
const GaussRule& gauss2();

/// Cached 4-point rule: non-polynomial data (Maxwellians, sources, doping).
const GaussRule& gauss4();

}  // namespace ksweep
