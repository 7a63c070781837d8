#include "ksweep/krylov.hpp"

#include <cmath>

namespace ksweep {

GmresResult gmres(const LinearOperator& a, const Eigen::VectorXd& x0,
                  const Eigen::VectorXd& r0, double abs_tol, int max_iter) {
  GmresResult res;
  res.x = x0;
  const double beta = r0.norm();
  res.residual_norm = beta;
  res.history.push_back(beta);
  if (!(beta > abs_tol) || max_iter <= 0) {
    res.converged = beta <= abs_tol;
    return res;
  }

  const Eigen::Index n = r0.size();
  std::vector<Eigen::VectorXd> v;
  v.push_back(r0 / beta);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
  std::vector<double> cs(max_iter), sn(max_iter);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(max_iter + 1);
  g[0] = beta;
  Eigen::VectorXd w(n);

  int k = 0;
  for (; k < max_iter; ++k) {
    a(v[k], w);
    ++res.iterations;
    for (int i = 0; i <= k; ++i) {
      h(i, k) = w.dot(v[i]);
      w -= h(i, k) * v[i];
    }
    h(k + 1, k) = w.norm();
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
      h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
      h(i, k) = t;
    }
    const double denom = std::hypot(h(k, k), h(k + 1, k));
    const double hk1 = h(k + 1, k);
    cs[k] = denom == 0 ? 1.0 : h(k, k) / denom;
    sn[k] = denom == 0 ? 0.0 : hk1 / denom;
    h(k, k) = denom;
    h(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    res.residual_norm = std::abs(g[k + 1]);
    res.history.push_back(res.residual_norm);
    if (res.residual_norm <= abs_tol || hk1 == 0.0) {
      ++k;
      break;
    }
    v.push_back(w / hk1);
  }

  const Eigen::VectorXd y = h.topLeftCorner(k, k)
                                .triangularView<Eigen::Upper>()
                                .solve(g.head(k));
  for (int i = 0; i < k; ++i) res.x += y[i] * v[i];
  res.converged = res.residual_norm <= abs_tol;
  return res;
}

GmresResult gmres_solve(const LinearOperator& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& x0, double rel_tol, int max_iter) {
  Eigen::VectorXd ax(b.size());
  a(x0, ax);
  GmresResult r = gmres(a, x0, b - ax, rel_tol * b.norm(), max_iter);
  ++r.iterations;
  return r;
}

}  // namespace ksweep
