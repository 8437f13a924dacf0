#include "qgraph/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace qgraph::cheb {

namespace {

struct Tables {
  RVector nodes;
  RVector weights;
  RMatrix diff;
  RMatrix cumsum;
};

Tables build() {
  const int n = kPoints;
  const int deg = n - 1;
  Tables t;
  t.nodes.resize(n);
  t.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    t.nodes(j) = -std::cos(std::numbers::pi * j / deg);
    t.weights(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == deg) ? 0.5 : 1.0);
  }
  t.diff = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      t.diff(i, j) = (t.weights(j) / t.weights(i)) / (t.nodes(i) - t.nodes(j));
      diag -= t.diff(i, j);
    }
    t.diff(i, i) = diag;
  }
  // T_k at the nodes, k = 0..deg+1
  RMatrix tk(n, n + 1);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k <= n; ++k) tk(j, k) = std::cos(k * std::acos(std::clamp(t.nodes(j), -1.0, 1.0)));
  const RMatrix to_coef = tk.leftCols(n).partialPivLu().inverse();
  // antiderivative coefficients b from a
  RMatrix integ = RMatrix::Zero(n + 1, n);
  for (int k = 1; k <= n; ++k) {
    if (k - 1 < n) integ(k, k - 1) += (k - 1 == 0 ? 2.0 : 1.0) / (2.0 * k);
    if (k + 1 < n) integ(k, k + 1) -= 1.0 / (2.0 * k);
  }
  // fix b_0 so that F(-1) = 0
  for (int k = 1; k <= n; ++k) integ.row(0) -= ((k % 2 == 0) ? 1.0 : -1.0) * integ.row(k);
  t.cumsum = tk * integ * to_coef;
  return t;
}

const Tables& tables() {
  static const Tables t = build();
  return t;
}

}  // namespace

const RVector& nodes() { return tables().nodes; }
const RVector& bary_weights() { return tables().weights; }
const RMatrix& diff_matrix() { return tables().diff; }
const RMatrix& cumsum_matrix() { return tables().cumsum; }

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  RMatrix jac = RMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
  GaussRule rule;
  rule.x = es.eigenvalues();
  rule.w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return cache.emplace(n, std::move(rule)).first->second;
}

Complex interpolate(const CVector& values, double s) {
  const RVector& x = nodes();
  const RVector& w = bary_weights();
  Complex num = 0.0;
  double den = 0.0;
  for (int j = 0; j < kPoints; ++j) {
    const double d = s - x(j);
    if (d == 0.0) return values(j);
    const double c = w(j) / d;
    num += c * values(j);
    den += c;
  }
  return num / den;
}

}  // namespace qgraph::cheb
