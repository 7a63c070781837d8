#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ksweep/mesh.hpp"
#include "ksweep/quadrature.hpp"
#include "oracle.hpp"

namespace ksweep {
namespace {

TEST(Quadrature, WeightsSumToOneAndIntegratePolynomials) {
  for (int n = 1; n <= 8; ++n) {
    const GaussRule g = gauss_legendre(n);
    double w = 0;
    for (double x : g.weights) w += x;
    EXPECT_NEAR(w, 1.0, 1e-14) << n;
    // Exact through degree 2n - 1: int_{-1/2}^{1/2} x^d = (1/2)^d / (d + 1) for even d.
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0;
      for (int q = 0; q < n; ++q) s += g.weights[q] * std::pow(g.nodes[q], d);
      const double exact = d % 2 ? 0.0 : std::pow(0.5, d) / (d + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " d=" << d;
    }
  }
  EXPECT_EQ(gauss2().size(), 2);
  EXPECT_EQ(gauss4().size(), 4);
}

TEST(Mesh, DiodeMeshDimensions) {
  const PhaseMesh m = build_mesh(0.0, 0.6, -2.0, 2.0, 200, 200);
  EXPECT_EQ(m.cells(), 40000);
  EXPECT_EQ(m.unknowns(), 120000);
  EXPECT_NEAR(m.dx, 0.003, 1e-15);
  EXPECT_NEAR(m.dv, 0.02, 1e-15);
  EXPECT_EQ(m.nv_negative, 100);
  EXPECT_EQ(m.spatial_unknowns(), 400);
}

TEST(Mesh, SmallestLegalMesh) {
  const PhaseMesh m = build_mesh(0.0, 1.0, -1.0, 1.0, 1, 2);
  EXPECT_EQ(m.cells(), 2);
  EXPECT_EQ(m.unknowns(), 6);
  EXPECT_FALSE(m.positive_velocity(0));
  EXPECT_TRUE(m.positive_velocity(1));
}

TEST(Mesh, ManufacturedLevelSix) {
  const double pi = std::numbers::pi;
  const PhaseMesh m = build_mesh(-pi, pi, -pi, pi, 64, 64, true);
  EXPECT_NEAR(m.dx, 2 * pi / 64, 1e-15);
  EXPECT_NEAR(m.dv, 2 * pi / 64, 1e-15);
  EXPECT_TRUE(m.x_periodic);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(build_mesh(0, 1, -1, 1, 0, 2), std::invalid_argument);
  EXPECT_THROW(build_mesh(1, 0, -1, 1, 2, 2), std::invalid_argument);
  EXPECT_THROW(build_mesh(0, 1, -1, 1, 2, 3), std::invalid_argument);
  EXPECT_THROW(build_mesh(0, 1, 0, 1, 2, 2), std::invalid_argument);
}

TEST(Mesh, CellNumberingIsColumnMajor) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 3, 4);
  EXPECT_EQ(m.cell(0, 0), 0);
  EXPECT_EQ(m.cell(0, 3), 3);
  EXPECT_EQ(m.cell(1, 0), 4);
  EXPECT_EQ(m.cell(2, 3), 11);
}

TEST(Projection, ZeroAndInSpaceFunctions) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 3, 4);
  for (double c : project([](double, double) { return 0.0; }, m).coeffs) EXPECT_EQ(c, 0.0);
  const PhaseField f = project([](double x, double) { return 3.0 + x; }, m);
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.nv; ++j) {
      EXPECT_NEAR(f.cell(i, j)[0], 3.0 + m.xc(i), 1e-14);
      EXPECT_NEAR(f.cell(i, j)[1], m.dx, 1e-14);
      EXPECT_NEAR(f.cell(i, j)[2], 0.0, 1e-14);
    }
}

TEST(Projection, MaxwellianMomentsMatchDenseQuadrature) {
  const PhaseMesh m = build_mesh(0, 1, -2, 2, 1, 8);
  const auto fn = [](double, double v) { return std::exp(-4 * v * v); };
  const PhaseField f = project(fn, m, 8);
  for (int j = 0; j < m.nv; ++j) {
    const double a = m.v_lo + j * m.dv, vc = m.vc(j);
    const double c0 = oracle::integrate([](double v) { return std::exp(-4 * v * v); }, a,
                                        a + m.dv) / m.dv;
    const double c2 = 12.0 *
                      oracle::integrate(
                          [&](double v) { return std::exp(-4 * v * v) * (v - vc) / m.dv; }, a,
                          a + m.dv) / m.dv;
    EXPECT_NEAR(f.cell(0, j)[0], c0, 1e-12);
    EXPECT_NEAR(f.cell(0, j)[1], 0.0, 1e-12);
    EXPECT_NEAR(f.cell(0, j)[2], c2, 1e-12);
  }
}

TEST(Projection, Idempotent) {
  const PhaseMesh m = build_mesh(-1, 2, -1.5, 1.5, 5, 6);
  const PhaseField f = project([](double x, double v) { return std::sin(3 * x) * std::cos(v); }, m);
  const PhaseField g = project([&](double x, double v) { return evaluate(f, x, v); }, m);
  double diff = 0, norm = 0;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    diff = std::max(diff, std::abs(f.coeffs[k] - g.coeffs[k]));
    norm = std::max(norm, std::abs(f.coeffs[k]));
  }
  EXPECT_LE(diff, 1e-13 * norm);
}

TEST(Projection, RejectsNonFinite) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 2, 2);
  EXPECT_THROW(project([](double, double) { return std::nan(""); }, m), std::domain_error);
}

TEST(Evaluate, ConstantFieldAndLimits) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 4, 4);
  const PhaseField f = project([](double, double) { return 2.5; }, m);
  EXPECT_NEAR(evaluate(f, 0.3, -0.7), 2.5, 1e-15);
  const Edge ex{EdgeDirection::x, 2}, ev{EdgeDirection::v, 2};
  EXPECT_NEAR(evaluate_limit(f, ex, 0.1, Side::minus), 2.5, 1e-15);
  EXPECT_NEAR(evaluate_limit(f, ex, 0.1, Side::plus), 2.5, 1e-15);
  EXPECT_NEAR(evaluate_limit(f, ev, 0.6, Side::minus), 2.5, 1e-15);
  EXPECT_THROW(evaluate(f, 1.5, 0.0), std::out_of_range);
  EXPECT_THROW(evaluate_limit(f, Edge{EdgeDirection::x, 0}, 0.1, Side::minus), std::out_of_range);
}

TEST(Evaluate, GlobalLinearHasNoJump) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 4, 4);
  const PhaseField f = project([](double x, double) { return 1.0 + 3.0 * x; }, m);
  const Edge e{EdgeDirection::x, 1};
  EXPECT_NEAR(jump(f, e, 0.4), 0.0, 1e-14);
  EXPECT_NEAR(average(f, e, 0.4), 1.75, 1e-14);
}

TEST(Evaluate, DiscontinuousJumpAndAverage) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 2, 2);
  PhaseField f(m);
  for (int j = 0; j < 2; ++j) {
    f.cell(0, j)[0] = 1.0;
    f.cell(1, j)[0] = 2.0;
  }
  const Edge e{EdgeDirection::x, 1};
  EXPECT_DOUBLE_EQ(jump(f, e, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(average(f, e, 0.2), 1.5);
}

TEST(Norms, CoefficientNormMatchesQuadrature) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 3, 4);
  const PhaseField f = testing::random_field(m, 7);
  double dense = 0;
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.nv; ++j) {
      const double* u = f.cell(i, j);
      dense += m.dx * m.dv *
               oracle::integrate(
                   [&](double xi) {
                     return oracle::integrate(
                         [&](double eta) {
                           const double g = u[0] + u[1] * xi + u[2] * eta;
                           return g * g;
                         },
                         -0.5, 0.5);
                   },
                   -0.5, 0.5);
    }
  EXPECT_NEAR(l2_norm_squared(f), dense, 1e-12 * dense);
}

TEST(Sampling, OversampledGridCoversEveryCell) {
  const PhaseMesh m = build_mesh(0, 1, -1, 1, 3, 2);
  const PhaseField f = project([](double x, double v) { return x + 2 * v; }, m);
  const auto pts = sample_oversampled(f);
  ASSERT_EQ(pts.size(), static_cast<std::size_t>(m.cells() * 16));
  for (const auto& p : pts) EXPECT_NEAR(p.value, p.x + 2 * p.v, 1e-14);
}

}  // namespace
}  // namespace ksweep
