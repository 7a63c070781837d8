#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ksweep {

/// y = A x
using LinearOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;           // operator applications
  double residual_norm = 0.0;   // final ||b - A x|| (Givens estimate)
  bool converged = false;
  std::vector<double> history;  // residual norm after each iteration, starting at ||r0||
};

/// Unrestarted GMRES from x0 with precomputed initial residual r0 = b - A x0.
/// Stops when ||r|| <= abs_tol or after max_iter operator applications.
GmresResult gmres(const LinearOperator& a, const Eigen::VectorXd& x0,
                  const Eigen::VectorXd& r0, double abs_tol, int max_iter);

/// Convenience form computing r0 (one extra operator application).
GmresResult gmres_solve(const LinearOperator& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& x0, double rel_tol, int max_iter);

}  // namespace ksweep
