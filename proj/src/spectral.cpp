#include "qgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qgraph/fd_discretization.hpp"

namespace qgraph {

namespace {

struct SecularParts {
  CMatrix k;      // Cauchy data 2m x m
  CMatrix q;      // orthonormal basis of ran k
  CMatrix r;      // k = q r
  CMatrix nrows;  // orthonormal rows of [X, Y]
  CMatrix n;      // nrows * q
};

SecularParts secular_parts(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol) {
  if (pair.dim() != graph.boundary_dim()) throw Error(ErrorKind::DimensionMismatch, "pair does not match graph");
  SecularParts p;
  p.k = cauchy_data(graph, zeta, ode_tol);
  p.q = orth_columns(p.k);
  p.r = p.q.adjoint() * p.k;
  p.nrows = normalized_rows(pair);
  p.n = p.nrows * p.q;
  return p;
}

// Per edge: fundamental matrices at every panel node, panels in order.
using BasisTable = std::vector<std::vector<Mat2>>;

BasisTable basis_table(const MetricGraph& graph, Complex zeta, const PanelPlan& plan, double ode_tol) {
  BasisTable table;
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const auto& br = plan[static_cast<size_t>(e)];
    std::vector<double> xs;
    for (size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      for (int j = 0; j < cheb::kPoints; ++j) {
        double x = 0.5 * (a + b) + 0.5 * (b - a) * cheb::nodes()(j);
        if (j == 0) x = a;
        if (j == cheb::kPoints - 1) x = b;
        xs.push_back(x);
      }
    }
    table.push_back(fundamental_at(graph.edge(e).potential, zeta, xs, ode_tol));
  }
  return table;
}

GraphFunction combination_from_table(const BasisTable& table, const PanelPlan& plan, const CVector& coef) {
  std::vector<EdgeFunction> edges;
  for (size_t e = 0; e < plan.size(); ++e) {
    EdgeFunction ef;
    ef.length = plan[e].back();
    const Complex al = coef(2 * static_cast<Index>(e)), be = coef(2 * static_cast<Index>(e) + 1);
    size_t idx = 0;
    for (size_t i = 0; i + 1 < plan[e].size(); ++i) {
      Panel p;
      p.a = plan[e][i];
      p.b = plan[e][i + 1];
      p.value.resize(cheb::kPoints);
      p.deriv.resize(cheb::kPoints);
      for (int j = 0; j < cheb::kPoints; ++j, ++idx) {
        const Mat2& f = table[e][idx];
        p.value(j) = al * f(0, 0) + be * f(0, 1);
        p.deriv(j) = al * f(1, 0) + be * f(1, 1);
      }
      ef.panels.push_back(std::move(p));
    }
    edges.push_back(std::move(ef));
  }
  return GraphFunction(std::move(edges));
}

double wavenumber(Complex zeta) { return std::sqrt(std::abs(zeta)); }

double golden_min(const std::function<double(double)>& fn, double a, double b, double* fmin) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 300; ++it) {
    if (b - a <= 2e-16 * std::max(1.0, std::abs(a) + std::abs(b))) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
  }
  const double x = fc <= fd ? c : d;
  if (fmin) *fmin = std::min(fc, fd);
  return x;
}

EigenResult build_eigen(const MetricGraph& graph, const BoundaryPair& pair, double lambda,
                        const SpectralOptions& opts) {
  const SecularParts sp = secular_parts(graph, pair, lambda, opts.ode_tol);
  Eigen::JacobiSVD<CMatrix> svd(sp.n, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const Index m = sv.size();
  const double smin = sv(m - 1);
  if (smin > opts.tol)
    throw Error(ErrorKind::NotAnEigenvalue, "secular matrix is not singular at lambda = " + std::to_string(lambda));
  const double cut = std::max(opts.multiplicity_tol, 10.0 * smin);
  Index mult = 0;
  while (mult < m && sv(m - 1 - mult) <= cut) ++mult;
  const CMatrix vnull = svd.matrixV().rightCols(mult);
  CMatrix coef = solve(sp.r, vnull);

  const PanelPlan plan = make_plan(graph, wavenumber(lambda));
  const BasisTable table = basis_table(graph, lambda, plan, opts.ode_tol);
  std::vector<GraphFunction> fs;
  for (Index j = 0; j < mult; ++j) fs.push_back(combination_from_table(table, plan, coef.col(j)));
  CMatrix gram(mult, mult);
  for (Index i = 0; i < mult; ++i)
    for (Index j = 0; j < mult; ++j) gram(i, j) = inner(fs[static_cast<size_t>(j)], fs[static_cast<size_t>(i)]);
  gram = (gram + gram.adjoint()) / 2.0;
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "eigenfunction Gram matrix not positive");
  // C' = C L^{-*}
  const CMatrix linv_adj = llt.matrixL().adjoint().solve(CMatrix::Identity(mult, mult));
  coef = coef * linv_adj;
  // phase: largest coefficient of each column real positive
  for (Index j = 0; j < mult; ++j) {
    Index imax = 0;
    coef.col(j).cwiseAbs().maxCoeff(&imax);
    const Complex c = coef(imax, j);
    if (std::abs(c) > 0.0) coef.col(j) *= std::conj(c) / std::abs(c);
  }

  EigenResult res;
  res.lambda = lambda;
  res.multiplicity = static_cast<int>(mult);
  res.coefficients = coef;
  res.residual = smin;
  for (Index j = 0; j < mult; ++j) {
    res.eigenfunctions.push_back(combination_from_table(table, plan, coef.col(j)));
    res.traces.push_back(TraceVector::from_stacked(sp.k * coef.col(j)));
  }
  return res;
}

// Same plane as cauchy_data, but edges with |s(L)| >= 1 use the Dirichlet-to-Neumann block [I; M].
// Far below the potential the (c, s) columns are nearly parallel and lose the decaying solution.
CMatrix cauchy_plane(const MetricGraph& graph, double lambda, double ode_tol) {
  const Index m = graph.boundary_dim();
  CMatrix k = CMatrix::Zero(2 * m, m);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const EdgeBasis b = edge_basis(graph.edge(e), lambda, ode_tol);
    const Index ia = MetricGraph::a_index(e), ib = MetricGraph::b_index(e);
    const Index cc = 2 * e, cs = 2 * e + 1;
    if (std::abs(b.s_val) >= 1.0) {
      const Complex inv = 1.0 / b.s_val;
      k(ia, cc) = 1.0;
      k(ib, cs) = 1.0;
      k(m + ia, cc) = -b.c_val * inv;
      k(m + ia, cs) = inv;
      k(m + ib, cc) = inv;
      k(m + ib, cs) = -b.s_der * inv;
    } else {
      k(ia, cc) = 1.0;
      k(ib, cc) = b.c_val;
      k(ib, cs) = b.s_val;
      k(m + ia, cs) = 1.0;
      k(m + ib, cc) = -b.c_der;
      k(m + ib, cs) = -b.s_der;
    }
  }
  return k;
}

// Unitary image (A - iB)(A + iB)^{-1} of the Lagrangian plane spanned by the columns of [A; B].
CMatrix cayley(const CMatrix& a, const CMatrix& b) {
  const Complex i(0.0, 1.0);
  const CMatrix num = a - i * b, den = a + i * b;
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

double wrap(double x) { return x - 2.0 * std::numbers::pi * std::round(x / (2.0 * std::numbers::pi)); }

// Eigenphases of U_K(lambda)^* U_F increase with lambda and cross 0 exactly at eigenvalues.
// count = (unwrapped arg det - sum of phases in [0, 2 pi)) / 2 pi then counts crossings.
struct PhasePoint {
  double lambda;
  double det_arg;  // wrapped
  double psi_sum;
  double theta = 0.0;  // unwrapped det_arg
  long count = 0;
};

class PhaseCounter {
 public:
  PhaseCounter(const MetricGraph& graph, const BoundaryPair& pair, double ode_tol)
      : graph_(graph), ode_tol_(ode_tol), m_(pair.dim()) {
    if (pair.dim() != graph.boundary_dim()) throw Error(ErrorKind::DimensionMismatch, "pair does not match graph");
    uf_ = cayley(-pair.y().adjoint(), pair.x().adjoint());
  }

  PhasePoint at(double lambda) const {
    const CMatrix k = orth_columns(cauchy_plane(graph_, lambda, ode_tol_));
    const CMatrix v = cayley(k.topRows(m_), k.bottomRows(m_)).adjoint() * uf_;
    Eigen::ComplexEigenSolver<CMatrix> es(v, false);
    PhasePoint p{lambda, 0.0, 0.0};
    for (Index j = 0; j < m_; ++j) {
      double a = std::arg(es.eigenvalues()(j));
      p.det_arg += a;
      if (a < 0.0) a += 2.0 * std::numbers::pi;
      p.psi_sum += a;
    }
    p.det_arg = wrap(p.det_arg);
    return p;
  }

  // Continue the unwrapped argument from a neighbour.
  static void link(const PhasePoint& from, PhasePoint& to) {
    to.theta = from.theta + wrap(to.det_arg - from.det_arg);
    to.count = std::lround((to.theta - to.psi_sum) / (2.0 * std::numbers::pi));
  }

 private:
  const MetricGraph& graph_;
  double ode_tol_;
  Index m_;
  CMatrix uf_;
};

struct ScanResult {
  std::vector<double> roots;
  std::vector<long> counts;
};

// Refine [a, b] until the unwrapped argument moves by less than pi/2 per step.
void refine_cell(const PhaseCounter& pc, const PhasePoint& a, PhasePoint b, int depth, std::vector<PhasePoint>& out) {
  const double d = wrap(b.det_arg - a.det_arg);
  if (std::abs(d) > 0.5 * std::numbers::pi && depth < 40) {
    PhasePoint mid = pc.at(0.5 * (a.lambda + b.lambda));
    PhaseCounter::link(a, mid);
    refine_cell(pc, a, mid, depth + 1, out);
    const PhasePoint left = out.back();
    refine_cell(pc, left, b, depth + 1, out);
    return;
  }
  PhaseCounter::link(a, b);
  out.push_back(b);
}

// Bisect a cell with positive count into clusters narrower than width.
void isolate(const PhaseCounter& pc, const PhasePoint& a, const PhasePoint& b, double width, int depth,
             std::vector<std::pair<PhasePoint, PhasePoint>>& out) {
  if (b.count == a.count) return;
  if (b.lambda - a.lambda <= width || depth > 80) {
    out.emplace_back(a, b);
    return;
  }
  PhasePoint mid = pc.at(0.5 * (a.lambda + b.lambda));
  PhaseCounter::link(a, mid);
  // guard against an argument jump inside a cell that looked smooth at the ends
  if (mid.count < a.count || mid.count > b.count) {
    std::vector<PhasePoint> fine{a};
    refine_cell(pc, a, mid, 0, fine);
    mid = fine.back();
  }
  isolate(pc, a, mid, width, depth + 1, out);
  isolate(pc, mid, b, width, depth + 1, out);
}

ScanResult scan(const MetricGraph& graph, const BoundaryPair& pair, double lo, double hi, double density,
                const SpectralOptions& opts) {
  const double v0 = graph.min_potential();
  auto to_s = [v0](double l) { return l >= v0 ? std::sqrt(l - v0) : -std::sqrt(v0 - l); };
  auto from_s = [v0](double s) { return s >= 0.0 ? v0 + s * s : v0 - s * s; };
  auto sigma = [&](double l) { return secular_sigma(graph, pair, l, opts.ode_tol)(0); };
  const PhaseCounter pc(graph, pair, opts.ode_tol);
  const double edge = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  const double s_lo = to_s(lo - edge), s_hi = to_s(hi + edge);
  const double ds_target = std::numbers::pi / (density * graph.total_length());
  const int n = std::max(32, static_cast<int>(std::ceil((s_hi - s_lo) / ds_target)));
  const double ds = (s_hi - s_lo) / n;

  std::vector<PhasePoint> pts;
  PhasePoint first = pc.at(lo - edge);
  first.theta = first.psi_sum;
  first.count = 0;
  pts.push_back(first);
  for (int i = 1; i <= n; ++i) {
    const double l = i == n ? hi + edge : from_s(s_lo + i * ds);
    const PhasePoint prev = pts.back();
    refine_cell(pc, prev, pc.at(l), 0, pts);
  }

  ScanResult out;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].count < pts[i - 1].count)
      throw Error(ErrorKind::NoConvergence, "eigenphase count decreased near lambda = " +
                                                std::to_string(pts[i].lambda));
    std::vector<std::pair<PhasePoint, PhasePoint>> clusters;
    const double width = 1e-9 * std::max(1.0, std::abs(pts[i].lambda));
    isolate(pc, pts[i - 1], pts[i], width, 0, clusters);
    for (const auto& [a, b] : clusters) {
      const double pad = b.lambda - a.lambda;
      double fmin = 0.0;
      const double root = golden_min(sigma, a.lambda - pad, b.lambda + pad, &fmin);
      if (root < lo - edge || root > hi + edge) continue;
      if (!out.roots.empty() && std::abs(root - out.roots.back()) <= 1e-9 * std::max(1.0, std::abs(root))) {
        out.counts.back() += b.count - a.count;
        continue;
      }
      out.roots.push_back(root);
      out.counts.push_back(b.count - a.count);
    }
  }
  return out;
}

}  // namespace

CMatrix cauchy_data(const MetricGraph& graph, Complex zeta, double ode_tol) {
  const Index m = graph.boundary_dim();
  CMatrix k = CMatrix::Zero(2 * m, m);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const EdgeBasis b = edge_basis(graph.edge(e), zeta, ode_tol);
    const Index ia = MetricGraph::a_index(e), ib = MetricGraph::b_index(e);
    const Index cc = 2 * e, cs = 2 * e + 1;
    k(ia, cc) = 1.0;
    k(ib, cc) = b.c_val;
    k(ib, cs) = b.s_val;
    k(m + ia, cs) = 1.0;
    k(m + ib, cc) = -b.c_der;
    k(m + ib, cs) = -b.s_der;
  }
  return k;
}

SecularMatrix secular(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol) {
  if (pair.dim() != graph.boundary_dim()) throw Error(ErrorKind::DimensionMismatch, "pair does not match graph");
  const Index m = pair.dim();
  const CMatrix k = cauchy_data(graph, zeta, ode_tol);
  return {zeta, pair.x() * k.topRows(m) + pair.y() * k.bottomRows(m)};
}

CMatrix normalized_secular(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol) {
  return secular_parts(graph, pair, zeta, ode_tol).n;
}

RVector secular_sigma(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol) {
  RVector sv = singular_values(normalized_secular(graph, pair, zeta, ode_tol));
  std::sort(sv.data(), sv.data() + sv.size());
  return sv;
}

double refine_eigenvalue(const MetricGraph& graph, const BoundaryPair& pair, double guess, double radius,
                         const SpectralOptions& opts) {
  auto sigma = [&](double l) { return secular_sigma(graph, pair, l, opts.ode_tol)(0); };
  return golden_min(sigma, guess - radius, guess + radius, nullptr);
}

std::vector<EigenResult> eigenvalues(const MetricGraph& graph, const BoundaryPair& pair, double lo, double hi,
                                     const SpectralOptions& opts) {
  if (!(lo < hi)) throw Error(ErrorKind::DimensionMismatch, "eigenvalues: window must satisfy lo < hi");
  double density = opts.scan_density;
  for (int attempt = 0; attempt < 3; ++attempt, density *= 4.0) {
    const ScanResult sr = scan(graph, pair, lo, hi, density, opts);
    std::vector<EigenResult> out;
    Index total = 0;
    for (double root : sr.roots) {
      out.push_back(build_eigen(graph, pair, root, opts));
      total += out.back().multiplicity;
    }
    if (!opts.certify) return out;
    const FdSpectrum fd = fd_spectrum(graph, pair, lo, hi, opts.fd_points_per_unit);
    if (total >= fd.strict_count && total <= fd.inclusive_count) return out;
  }
  throw Error(ErrorKind::WindowTooWide, "eigenvalue count disagrees with the finite-difference oracle");
}

EigenResult eigenfunctions(const MetricGraph& graph, const BoundaryPair& pair, double lambda,
                           const SpectralOptions& opts) {
  return build_eigen(graph, pair, lambda, opts);
}

GraphFunction basis_combination(const MetricGraph& graph, Complex zeta, const CVector& coef, const PanelPlan& plan,
                                double ode_tol) {
  return combination_from_table(basis_table(graph, zeta, plan, ode_tol), plan, coef);
}

GraphFunction resolvent_apply(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta,
                              const GraphFunction& f, const SpectralOptions& opts) {
  if (f.edge_count() != graph.edge_count()) throw Error(ErrorKind::DimensionMismatch, "resolvent: f edge count");
  const Index m = graph.boundary_dim();
  const SecularParts sp = secular_parts(graph, pair, zeta, opts.ode_tol);
  const RVector sv = singular_values(sp.n);
  if (sv(sv.size() - 1) < opts.spectrum_floor)
    throw Error(ErrorKind::ZetaInSpectrum, "zeta lies in (or too close to) the spectrum");

  const PanelPlan plan = merge_plans(f.plan(), make_plan(graph, wavenumber(zeta)));
  const GraphFunction fr = f.plan() == plan ? f : f.resampled(plan);
  const BasisTable table = basis_table(graph, zeta, plan, opts.ode_tol);
  const CMatrix cum = cheb::cumsum_matrix().cast<Complex>();

  std::vector<EdgeFunction> edges;
  CVector tup = CVector::Zero(2 * m);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    EdgeFunction ef;
    ef.length = graph.edge(e).length;
    Complex is0 = 0.0, ic0 = 0.0;
    size_t idx = 0;
    for (const Panel& fp : fr.edge(e).panels) {
      CVector c(cheb::kPoints), s(cheb::kPoints), cd(cheb::kPoints), sd(cheb::kPoints);
      for (int j = 0; j < cheb::kPoints; ++j, ++idx) {
        const Mat2& t = table[static_cast<size_t>(e)][idx];
        c(j) = t(0, 0);
        s(j) = t(0, 1);
        cd(j) = t(1, 0);
        sd(j) = t(1, 1);
      }
      const double half = 0.5 * (fp.b - fp.a);
      const CVector is = (is0 + (half * (cum * s.cwiseProduct(fp.value))).array()).matrix();
      const CVector ic = (ic0 + (half * (cum * c.cwiseProduct(fp.value))).array()).matrix();
      is0 = is(cheb::kPoints - 1);
      ic0 = ic(cheb::kPoints - 1);
      Panel p;
      p.a = fp.a;
      p.b = fp.b;
      p.value = c.cwiseProduct(is) - s.cwiseProduct(ic);
      p.deriv = cd.cwiseProduct(is) - sd.cwiseProduct(ic);
      ef.panels.push_back(std::move(p));
    }
    tup(MetricGraph::b_index(e)) = ef.panels.back().value(cheb::kPoints - 1);
    tup(m + MetricGraph::b_index(e)) = -ef.panels.back().deriv(cheb::kPoints - 1);
    edges.push_back(std::move(ef));
  }
  const CMatrix mhat = sp.nrows * sp.k;
  const CVector coef = solve(mhat, CVector(-sp.nrows * tup));
  GraphFunction hom = combination_from_table(table, plan, coef);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    auto& dst = edges[static_cast<size_t>(e)].panels;
    for (size_t p = 0; p < dst.size(); ++p) {
      dst[p].value += hom.edge(e).panels[p].value;
      dst[p].deriv += hom.edge(e).panels[p].deriv;
    }
  }
  return GraphFunction(std::move(edges));
}

TraceVector trace_resolvent(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta,
                            const GraphFunction& f, const SpectralOptions& opts) {
  return resolvent_apply(graph, pair, zeta, f, opts).traces();
}

CMatrix weyl_m(const MetricGraph& graph, Complex zeta, double ode_tol) {
  const Index m = graph.boundary_dim();
  CMatrix mm = CMatrix::Zero(m, m);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const EdgeBasis b = edge_basis(graph.edge(e), zeta, ode_tol);
    const double scale = std::abs(b.c_val) * graph.edge(e).length + std::abs(b.s_val);
    if (std::abs(b.s_val) < 1e-12 * scale)
      throw Error(ErrorKind::DirichletSpectrumHit, "zeta is a Dirichlet eigenvalue of edge " + graph.edge(e).id);
    const Index ia = MetricGraph::a_index(e), ib = MetricGraph::b_index(e);
    mm(ia, ia) = -b.c_val / b.s_val;
    mm(ia, ib) = 1.0 / b.s_val;
    mm(ib, ia) = 1.0 / b.s_val;
    mm(ib, ib) = -b.s_der / b.s_val;
  }
  return mm;
}

GraphFunction gamma_field(const MetricGraph& graph, Complex zeta, const CVector& h, const PanelPlan& plan,
                          double ode_tol) {
  CVector coef(graph.boundary_dim());
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const EdgeBasis b = edge_basis(graph.edge(e), zeta, ode_tol);
    const Complex ha = h(MetricGraph::a_index(e)), hb = h(MetricGraph::b_index(e));
    coef(2 * e) = ha;
    coef(2 * e + 1) = (hb - ha * b.c_val) / b.s_val;
  }
  return basis_combination(graph, zeta, coef, plan, ode_tol);
}

double krein_naimark_check(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, const GraphFunction& f,
                           const SpectralOptions& opts) {
  const Index m = graph.boundary_dim();
  const RVector ys = singular_values(pair.y());
  const double scale = std::sqrt(herm_eig(gram_s(pair)).values.maxCoeff());
  if (ys(ys.size() - 1) < 1e-10 * scale) throw Error(ErrorKind::YSingular, "Y is not invertible");
  const CMatrix theta = -solve(pair.y(), pair.x());
  try {
    const GraphFunction rt = resolvent_apply(graph, pair, zeta, f, opts);
    const GraphFunction r0 = resolvent_apply(graph, dirichlet_pair(m), zeta, f, opts);
    const CMatrix mz = weyl_m(graph, zeta, opts.ode_tol);
    const PanelPlan plan = merge_plans(f.plan(), make_plan(graph, wavenumber(zeta)));
    CVector gstar(m);
    std::vector<GraphFunction> cols;
    for (Index i = 0; i < m; ++i) {
      const CVector ei = CVector::Unit(m, i);
      gstar(i) = inner(f, gamma_field(graph, std::conj(zeta), ei, plan, opts.ode_tol));
      cols.push_back(gamma_field(graph, zeta, ei, plan, opts.ode_tol));
    }
    const CVector coef = solve(CMatrix(theta - mz), gstar);
    const GraphFunction corr = combine(cols, coef);
    return l2_norm(rt - r0 - corr);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::ZetaInSpectrum || err.kind() == ErrorKind::DirichletSpectrumHit ||
        err.kind() == ErrorKind::SingularMatrix)
      throw Error(ErrorKind::SpectrumHit, err.what());
    throw;
  }
}

Complex krein_weak_residual(const MetricGraph& graph, const BoundaryPair& pair1, const BoundaryPair& pair2,
                            Complex zeta, const GraphFunction& f, const GraphFunction& g,
                            const SpectralOptions& opts) {
  try {
    const GraphFunction u1 = resolvent_apply(graph, pair1, zeta, f, opts);
    const GraphFunction u2 = resolvent_apply(graph, pair2, zeta, f, opts);
    const GraphFunction v2 = resolvent_apply(graph, pair2, std::conj(zeta), g, opts);
    const Complex lhs = inner(u2, g) - inner(u1, g);
    const CVector tu = u1.traces().stacked();
    const CVector tv = v2.traces().stacked();
    const Complex rhs = tv.dot(coupling_z(pair2, pair1) * tu);
    return lhs - rhs;
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::ZetaInSpectrum) throw Error(ErrorKind::SpectrumHit, err.what());
    throw;
  }
}

}  // namespace qgraph
