#include "qgraph/fd_discretization.hpp"

#include <algorithm>
#include <cmath>

namespace qgraph {

namespace {

// LDL^T of a symmetric tridiagonal matrix with constant off-diagonal.
template <typename S>
struct Tridiag {
  std::vector<S> piv;
  double off;

  Tridiag(const std::vector<S>& diag, double off_) : piv(diag.size()), off(off_) {
    const double tiny = 1e-300;
    for (size_t i = 0; i < diag.size(); ++i) {
      S p = diag[i];
      if (i > 0) p -= off * off / piv[i - 1];
      if (p == S(0)) p = S(tiny);
      piv[i] = p;
    }
  }

  Index negatives() const {
    Index n = 0;
    for (const auto& p : piv)
      if (std::real(p) < 0.0) ++n;
    return n;
  }

  std::vector<S> solve(std::vector<S> b) const {
    const size_t n = piv.size();
    for (size_t i = 1; i < n; ++i) b[i] -= (off / piv[i - 1]) * b[i - 1];
    b[n - 1] /= piv[n - 1];
    for (size_t i = n - 1; i-- > 0;) b[i] = (b[i] - off * b[i + 1]) / piv[i];
    return b;
  }
};

}  // namespace

FdDiscretization::FdDiscretization(const MetricGraph& graph, const BoundaryPair& pair, double points_per_unit)
    : graph_(graph) {
  if (pair.dim() != graph.boundary_dim()) throw Error(ErrorKind::DimensionMismatch, "fd: pair dimension");
  for (const Edge& e : graph.edges()) {
    const int n = std::max(8, static_cast<int>(std::ceil(e.length * points_per_unit)));
    const double h = e.length / n;
    EdgeMesh mesh;
    mesh.h = h;
    mesh.pot.resize(n - 1);
    const Potential& v = e.potential;
    for (int i = 1; i < n; ++i) mesh.pot(i - 1) = 0.5 * (v((i - 0.25) * h) + v((i + 0.25) * h));
    mesh.pot_a = v(0.25 * h);
    mesh.pot_b = v(e.length - 0.25 * h);
    meshes_.push_back(mesh);
    grids_.push_back(RVector::LinSpaced(n + 1, 0.0, e.length));
  }
  // admissible endpoint values: ran(Y*)
  Eigen::JacobiSVD<CMatrix> svd(pair.y().adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  Index r = 0;
  const double smax = sv.size() ? sv(0) : 0.0;
  while (r < sv.size() && sv(r) > 1e-10 * std::max(smax, 1e-300) && smax > 0.0) ++r;
  basis_ = svd.matrixU().leftCols(r);
  if (r > 0) {
    const RVector inv = sv.head(r).cwiseInverse();
    CMatrix l = -basis_.adjoint() * pair.x().adjoint() * svd.matrixV().leftCols(r) * inv.asDiagonal();
    lform_ = (l + l.adjoint()) / 2.0;
  } else {
    lform_ = CMatrix::Zero(0, 0);
  }
}

Index FdDiscretization::count_below(double lambda) const {
  const Index r = basis_.cols();
  CMatrix schur = lform_;
  Index neg = 0;
  for (size_t e = 0; e < meshes_.size(); ++e) {
    const EdgeMesh& m = meshes_[e];
    const double h = m.h;
    std::vector<double> diag(static_cast<size_t>(m.pot.size()));
    for (Index i = 0; i < m.pot.size(); ++i) diag[static_cast<size_t>(i)] = 2.0 / h + h * (m.pot(i) - lambda);
    Tridiag<double> tri(diag, -1.0 / h);
    neg += tri.negatives();
    if (r == 0) continue;
    const Index ia = MetricGraph::a_index(static_cast<Index>(e));
    const Index ib = MetricGraph::b_index(static_cast<Index>(e));
    const CVector ba = basis_.row(ia).adjoint();
    const CVector bb = basis_.row(ib).adjoint();
    schur += (1.0 / h + 0.5 * h * (m.pot_a - lambda)) * ba * ba.adjoint();
    schur += (1.0 / h + 0.5 * h * (m.pot_b - lambda)) * bb * bb.adjoint();
    const size_t n = diag.size();
    std::vector<double> e1(n, 0.0), en(n, 0.0);
    e1[0] = 1.0;
    en[n - 1] = 1.0;
    const auto x1 = tri.solve(e1);
    const auto xn = tri.solve(en);
    // C = -(1/h)(e_1 ba* + e_n bb*)
    const double s = 1.0 / (h * h);
    schur -= s * (x1[0] * ba * ba.adjoint() + x1[n - 1] * bb * ba.adjoint() + xn[0] * ba * bb.adjoint() +
                  xn[n - 1] * bb * bb.adjoint());
  }
  if (r > 0) {
    const RVector ev = herm_eig(CMatrix((schur + schur.adjoint()) / 2.0)).values;
    for (Index i = 0; i < ev.size(); ++i)
      if (ev(i) < 0.0) ++neg;
  }
  return neg;
}

double FdDiscretization::eigenvalue(Index k, double rel_tol) const {
  double lo = graph_.min_potential() - 1.0;
  while (count_below(lo) > k) lo -= 2.0 * std::max(1.0, std::abs(lo));
  double hi = lo + 1.0;
  while (count_below(hi) <= k) hi += 2.0 * std::max(1.0, std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > rel_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<CVector> FdDiscretization::solve(Complex zeta, const std::function<Complex(Index, double)>& f) const {
  const Index r = basis_.cols();
  CMatrix schur = lform_;
  CVector rhs_z = CVector::Zero(r);
  std::vector<Tridiag<Complex>> tris;
  std::vector<std::vector<Complex>> rhs_int;
  std::vector<std::vector<Complex>> x1s, xns;
  for (size_t e = 0; e < meshes_.size(); ++e) {
    const EdgeMesh& m = meshes_[e];
    const double h = m.h;
    const size_t n = static_cast<size_t>(m.pot.size());
    const Index ei = static_cast<Index>(e);
    std::vector<Complex> diag(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      const double x = (static_cast<double>(i) + 1.0) * h;
      diag[i] = 2.0 / h + h * (m.pot(static_cast<Index>(i)) - zeta);
      b[i] = 0.5 * h * (f(ei, x - 0.25 * h) + f(ei, x + 0.25 * h));
    }
    tris.emplace_back(diag, -1.0 / h);
    const auto& tri = tris.back();
    rhs_int.push_back(tri.solve(b));
    if (r > 0) {
      std::vector<Complex> e1(n, 0.0), en(n, 0.0);
      e1[0] = 1.0;
      en[n - 1] = 1.0;
      x1s.push_back(tri.solve(e1));
      xns.push_back(tri.solve(en));
      const auto& x1 = x1s.back();
      const auto& xn = xns.back();
      const CVector ba = basis_.row(MetricGraph::a_index(ei)).adjoint();
      const CVector bb = basis_.row(MetricGraph::b_index(ei)).adjoint();
      schur += (1.0 / h + 0.5 * h * (m.pot_a - zeta)) * ba * ba.adjoint();
      schur += (1.0 / h + 0.5 * h * (m.pot_b - zeta)) * bb * bb.adjoint();
      const double s = 1.0 / (h * h);
      schur -= s * (x1[0] * ba * ba.adjoint() + x1[n - 1] * bb * ba.adjoint() + xn[0] * ba * bb.adjoint() +
                    xn[n - 1] * bb * bb.adjoint());
      const double len = graph_.edge(ei).length;
      rhs_z += 0.5 * h * (f(ei, 0.25 * h) * ba + f(ei, len - 0.25 * h) * bb);
      // eliminate interior: rhs_z -= C* T^{-1} b, with C = -(1/h)(e_1 ba* + e_n bb*)
      const auto& tb = rhs_int.back();
      rhs_z += (1.0 / h) * (tb[0] * ba + tb[n - 1] * bb);
    }
  }
  CVector z = r > 0 ? CVector(qgraph::solve(schur, rhs_z)) : CVector();
  std::vector<CVector> out;
  for (size_t e = 0; e < meshes_.size(); ++e) {
    const size_t n = static_cast<size_t>(meshes_[e].pot.size());
    const double h = meshes_[e].h;
    const Index ei = static_cast<Index>(e);
    CVector u(static_cast<Index>(n) + 2);
    Complex ua = 0.0, ub = 0.0;
    if (r > 0) {
      ua = (basis_.row(MetricGraph::a_index(ei)) * z)(0);
      ub = (basis_.row(MetricGraph::b_index(ei)) * z)(0);
    }
    // u_int = T^{-1}(b - C z) = T^{-1} b + (1/h)(ua x1 + ub xn)
    for (size_t i = 0; i < n; ++i) {
      Complex v = rhs_int[e][i];
      if (r > 0) v += (1.0 / h) * (ua * x1s[e][i] + ub * xns[e][i]);
      u(static_cast<Index>(i) + 1) = v;
    }
    u(0) = ua;
    u(static_cast<Index>(n) + 1) = ub;
    out.push_back(u);
  }
  return out;
}

FdSpectrum fd_spectrum(const MetricGraph& graph, const BoundaryPair& pair, double lo, double hi,
                       double points_per_unit) {
  const FdDiscretization coarse(graph, pair, points_per_unit);
  const FdDiscretization fine(graph, pair, 2.0 * points_per_unit);
  const double margin = 0.05 * (hi - lo) + 1.0;
  const Index k0 = std::min(coarse.count_below(lo - margin), fine.count_below(lo - margin));
  const Index k1 = std::max(coarse.count_below(hi + margin), fine.count_below(hi + margin));
  FdSpectrum out;
  for (Index k = k0; k < k1; ++k) {
    const double a = coarse.eigenvalue(k), b = fine.eigenvalue(k);
    const double rich = (4.0 * b - a) / 3.0;
    const double edge_tol = 1e-6 * std::max(1.0, std::abs(rich));
    if (rich >= lo - edge_tol && rich <= hi + edge_tol) {
      out.values.push_back(rich);
      ++out.inclusive_count;
      if (rich > lo + edge_tol && rich < hi - edge_tol) ++out.strict_count;
    }
  }
  return out;
}

}  // namespace qgraph
