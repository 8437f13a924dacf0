#include "qgraph/graph_function.hpp"

#include <algorithm>
#include <cmath>

namespace qgraph {

namespace {

constexpr int kGaussPoints = 48;

const Panel& find_panel(const EdgeFunction& f, double x) {
  const auto& ps = f.panels;
  auto it = std::upper_bound(ps.begin(), ps.end(), x, [](double v, const Panel& p) { return v < p.a; });
  if (it == ps.begin()) return ps.front();
  return *(it - 1);
}

double to_ref(const Panel& p, double x) {
  return std::clamp((2.0 * x - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
}

std::vector<double> merged_breaks(std::vector<double> a, const std::vector<double>& b, double length) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  const double eps = 1e-13 * std::max(1.0, length);
  for (double x : a) {
    if (x < -eps || x > length + eps) continue;
    x = std::clamp(x, 0.0, length);
    if (out.empty() || x - out.back() > eps) out.push_back(x);
  }
  if (out.empty() || out.front() != 0.0) out.insert(out.begin(), 0.0);
  out.back() = length;
  return out;
}

}  // namespace

Complex EdgeFunction::value(double x) const {
  const Panel& p = find_panel(*this, x);
  return cheb::interpolate(p.value, to_ref(p, x));
}

Complex EdgeFunction::derivative(double x) const {
  const Panel& p = find_panel(*this, x);
  return cheb::interpolate(p.deriv, to_ref(p, x));
}

std::vector<double> EdgeFunction::breaks() const {
  std::vector<double> out;
  for (const auto& p : panels) out.push_back(p.a);
  if (!panels.empty()) out.push_back(panels.back().b);
  return out;
}

PanelPlan make_plan(const MetricGraph& graph, double wavenumber, const std::vector<std::vector<double>>& extra) {
  const double k = std::max({wavenumber, std::sqrt(graph.max_abs_potential() + 1.0), 1.0});
  const double hmax = std::min(0.5, 4.0 / k);
  PanelPlan plan;
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    std::vector<double> base = edge.potential.breakpoints();
    if (static_cast<size_t>(e) < extra.size())
      base.insert(base.end(), extra[static_cast<size_t>(e)].begin(), extra[static_cast<size_t>(e)].end());
    base.push_back(0.0);
    base.push_back(edge.length);
    const std::vector<double> coarse = merged_breaks(base, {}, edge.length);
    std::vector<double> fine{0.0};
    for (size_t i = 0; i + 1 < coarse.size(); ++i) {
      const double len = coarse[i + 1] - coarse[i];
      const int pieces = std::max(1, static_cast<int>(std::ceil(len / hmax)));
      for (int j = 1; j <= pieces; ++j) fine.push_back(j == pieces ? coarse[i + 1] : coarse[i] + len * j / pieces);
    }
    plan.push_back(std::move(fine));
  }
  return plan;
}

PanelPlan merge_plans(const PanelPlan& a, const PanelPlan& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "merge_plans: edge counts differ");
  PanelPlan out;
  for (size_t e = 0; e < a.size(); ++e) out.push_back(merged_breaks(a[e], b[e], a[e].back()));
  return out;
}

GraphFunction GraphFunction::sample(const PanelPlan& plan, const Fn& fn, const Fn& dfn) {
  std::vector<EdgeFunction> edges;
  for (size_t e = 0; e < plan.size(); ++e) {
    EdgeFunction ef;
    ef.length = plan[e].back();
    for (size_t i = 0; i + 1 < plan[e].size(); ++i) {
      Panel p;
      p.a = plan[e][i];
      p.b = plan[e][i + 1];
      p.value.resize(cheb::kPoints);
      p.deriv.resize(cheb::kPoints);
      for (int j = 0; j < cheb::kPoints; ++j) p.value(j) = fn(static_cast<Index>(e), p.node(j));
      if (dfn) {
        for (int j = 0; j < cheb::kPoints; ++j) p.deriv(j) = dfn(static_cast<Index>(e), p.node(j));
      } else {
        p.deriv = (2.0 / (p.b - p.a)) * (cheb::diff_matrix().cast<Complex>() * p.value);
      }
      ef.panels.push_back(std::move(p));
    }
    edges.push_back(std::move(ef));
  }
  return GraphFunction(std::move(edges));
}

GraphFunction GraphFunction::zero(const MetricGraph& graph) {
  return sample(make_plan(graph, 1.0), [](Index, double) { return Complex(0.0); },
                [](Index, double) { return Complex(0.0); });
}

PanelPlan GraphFunction::plan() const {
  PanelPlan out;
  for (const auto& e : edges_) out.push_back(e.breaks());
  return out;
}

TraceVector GraphFunction::traces() const {
  const Index n = edge_count();
  TraceVector tv{CVector(2 * n), CVector(2 * n)};
  for (Index e = 0; e < n; ++e) {
    const auto& ef = edge(e);
    const Panel& first = ef.panels.front();
    const Panel& last = ef.panels.back();
    tv.gamma0(2 * e) = first.value(0);
    tv.gamma0(2 * e + 1) = last.value(cheb::kPoints - 1);
    tv.gamma1(2 * e) = first.deriv(0);
    tv.gamma1(2 * e + 1) = -last.deriv(cheb::kPoints - 1);
  }
  return tv;
}

GraphFunction GraphFunction::resampled(const PanelPlan& plan) const {
  return sample(
      plan, [this](Index e, double x) { return value(e, x); },
      [this](Index e, double x) { return derivative(e, x); });
}

GraphFunction combine(const std::vector<GraphFunction>& fs, const CVector& coeffs) {
  if (fs.empty()) throw Error(ErrorKind::DimensionMismatch, "combine: empty list");
  if (static_cast<Index>(fs.size()) != coeffs.size())
    throw Error(ErrorKind::DimensionMismatch, "combine: coefficient count");
  PanelPlan plan = fs.front().plan();
  for (size_t i = 1; i < fs.size(); ++i) plan = merge_plans(plan, fs[i].plan());
  std::vector<GraphFunction> rs;
  for (const auto& f : fs) rs.push_back(f.plan() == plan ? f : f.resampled(plan));
  GraphFunction out = rs.front();
  for (Index e = 0; e < out.edge_count(); ++e) {
    for (size_t p = 0; p < out.edge(e).panels.size(); ++p) {
      Panel& dst = out.edge(e).panels[p];
      dst.value *= coeffs(0);
      dst.deriv *= coeffs(0);
      for (size_t i = 1; i < rs.size(); ++i) {
        const Panel& src = rs[i].edge(e).panels[p];
        dst.value += coeffs(static_cast<Index>(i)) * src.value;
        dst.deriv += coeffs(static_cast<Index>(i)) * src.deriv;
      }
    }
  }
  return out;
}

GraphFunction operator+(const GraphFunction& f, const GraphFunction& g) {
  return combine({f, g}, CVector::Ones(2));
}

GraphFunction operator-(const GraphFunction& f, const GraphFunction& g) {
  CVector c(2);
  c << 1.0, -1.0;
  return combine({f, g}, c);
}

GraphFunction operator*(Complex c, const GraphFunction& f) {
  CVector v(1);
  v << c;
  return combine({f}, v);
}

Complex inner_weighted(const GraphFunction& f, const GraphFunction& g, const std::vector<Potential>& w) {
  if (f.edge_count() != g.edge_count()) throw Error(ErrorKind::DimensionMismatch, "inner: edge counts differ");
  const auto& rule = cheb::gauss_legendre(kGaussPoints);
  Complex total = 0.0;
  for (Index e = 0; e < f.edge_count(); ++e) {
    const auto& fe = f.edge(e);
    const auto& ge = g.edge(e);
    std::vector<double> br = merged_breaks(fe.breaks(), ge.breaks(), fe.length);
    if (!w.empty()) br = merged_breaks(br, w[static_cast<size_t>(e)].breakpoints(), fe.length);
    for (size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      const double half = 0.5 * (b - a);
      for (Index q = 0; q < rule.x.size(); ++q) {
        const double x = 0.5 * (a + b) + half * rule.x(q);
        double weight = rule.w(q) * half;
        if (!w.empty()) weight *= w[static_cast<size_t>(e)](x);
        total += weight * fe.value(x) * std::conj(ge.value(x));
      }
    }
  }
  return total;
}

Complex inner(const GraphFunction& f, const GraphFunction& g) { return inner_weighted(f, g, {}); }

double l2_norm(const GraphFunction& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

double ode_residual(const MetricGraph& graph, const GraphFunction& u, Complex zeta, const GraphFunction* f) {
  double worst = 0.0;
  const CMatrix d = cheb::diff_matrix().cast<Complex>();
  for (Index e = 0; e < u.edge_count(); ++e) {
    const Potential& v = graph.edge(e).potential;
    for (const Panel& p : u.edge(e).panels) {
      const CVector upp = (2.0 / (p.b - p.a)) * (d * p.deriv);
      for (int j = 0; j < cheb::kPoints; ++j) {
        // sample V just inside the panel so jumps at panel ends are attributed correctly
        const double x = p.node(j);
        const double xin = std::clamp(x, p.a + 1e-12 * (p.b - p.a), p.b - 1e-12 * (p.b - p.a));
        Complex r = -upp(j) + (v(xin) - zeta) * p.value(j);
        if (f) r -= f->value(e, xin);
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

}  // namespace qgraph
