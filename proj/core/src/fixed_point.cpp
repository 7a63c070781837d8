#include "ksweep/fixed_point.hpp"

#include <cmath>
#include <deque>

#include "ksweep/transport.hpp"

namespace ksweep {

namespace {

// Records one residual; returns true when the iteration must stop.
bool record(DriveResult& res, const DriveConfig& cfg, double r) {
  res.residuals.push_back(r);
  if (!std::isfinite(r) || r > cfg.blowup_factor * res.residuals.front()) {
    res.diverged = true;
    return true;
  }
  if (r <= cfg.tol) {
    res.converged = true;
    return true;
  }
  return false;
}

}  // namespace

double relative_residual(const Eigen::VectorXd& g, const Eigen::VectorXd& y) {
  const double r = (g - y).norm();
  const double n = y.norm();
  return n > 0 ? r / n : r;
}

DriveResult picard_drive(const FixedPointMap& g, const Eigen::VectorXd& y0,
                         const DriveConfig& cfg) {
  DriveResult res;
  res.y = y0;
  Eigen::VectorXd y = y0;
  try {
    while (res.evaluations < cfg.max_evaluations) {
      Eigen::VectorXd gy = g(y);
      ++res.evaluations;
      const double r = relative_residual(gy, y);
      res.y = gy;
      if (record(res, cfg, r)) return res;
      y = std::move(gy);
    }
  } catch (const BudgetExhausted&) {
  }
  res.budget_exhausted = true;
  return res;
}

DriveResult anderson_drive(const FixedPointMap& g, const Eigen::VectorXd& y0,
                           const DriveConfig& cfg) {
  DriveResult res;
  res.y = y0;
  const int m = std::max(cfg.window, 1);
  const double beta = cfg.relax;
  std::deque<Eigen::VectorXd> dF, dG;
  Eigen::VectorXd y = y0, g_prev, f_prev;
  try {
    while (res.evaluations < cfg.max_evaluations) {
      Eigen::VectorXd gy = g(y);
      ++res.evaluations;
      Eigen::VectorXd f = gy - y;
      const double r = relative_residual(gy, y);
      res.y = gy;
      if (record(res, cfg, r)) return res;

      if (res.evaluations == 1) {
        g_prev = gy;
        f_prev = f;
        y = y + beta * f;
        continue;
      }
      dF.push_back(f - f_prev);
      dG.push_back(gy - g_prev);
      if (static_cast<int>(dF.size()) > m) {
        dF.pop_front();
        dG.pop_front();
      }
      g_prev = gy;
      f_prev = f;

      Eigen::VectorXd gamma;
      while (true) {
        const int cols = static_cast<int>(dF.size());
        Eigen::MatrixXd a(f.size(), cols);
        for (int c = 0; c < cols; ++c) a.col(c) = dF[c];
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs().head(cols);
        const double dmax = diag.maxCoeff(), dmin = diag.minCoeff();
        const bool ill = !(dmin > 0) || dmax / dmin > cfg.max_r_ratio;
        if (ill && cols > 1) {
          dF.pop_front();
          dG.pop_front();
          continue;
        }
        if (!(dmin > 0)) {
          gamma = Eigen::VectorXd::Zero(cols);
        } else {
          gamma = qr.solve(f);
        }
        break;
      }
      res.max_window_used = std::max(res.max_window_used, static_cast<int>(dF.size()));
      Eigen::VectorXd g_acc = gy, f_acc = f;
      for (int c = 0; c < gamma.size(); ++c) {
        g_acc -= gamma[c] * dG[c];
        f_acc -= gamma[c] * dF[c];
      }
      y = g_acc - (1.0 - beta) * f_acc;
    }
  } catch (const BudgetExhausted&) {
  }
  res.budget_exhausted = true;
  return res;
}

}  // namespace ksweep
