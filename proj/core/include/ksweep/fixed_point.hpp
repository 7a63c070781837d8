#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace ksweep {

using FixedPointMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DriveConfig {
  double tol = 1e-8;
  int max_evaluations = std::numeric_limits<int>::max();
  int window = 15;             // Anderson only
  double relax = 1.0;          // Anderson only
  double max_r_ratio = 1e12;   // Anderson column-drop threshold
  double blowup_factor = 1e10; // relative residual growth treated as divergence
};

struct DriveResult {
  Eigen::VectorXd y;           // last map output G(y_k)
  int evaluations = 0;
  std::vector<double> residuals;  // ||G(y_k) - y_k|| / ||y_k|| per evaluation
  bool converged = false;
  bool diverged = false;
  bool budget_exhausted = false;
  int max_window_used = 0;
};

/// Relative fixed-point residual ||g - y|| / ||y|| (absolute when y = 0).
double relative_residual(const Eigen::VectorXd& g, const Eigen::VectorXd& y);

/// y <- G(y) until the relative residual drops below tol. A BudgetExhausted
/// thrown by G ends the iteration with budget_exhausted set.
DriveResult picard_drive(const FixedPointMap& g, const Eigen::VectorXd& y0,
                         const DriveConfig& cfg);

/// Windowed Anderson acceleration in the difference form; the least-squares
/// problem is solved by Householder QR with the oldest columns dropped while
/// the triangular factor is ill-conditioned.
DriveResult anderson_drive(const FixedPointMap& g, const Eigen::VectorXd& y0,
                           const DriveConfig& cfg);

}  // namespace ksweep
