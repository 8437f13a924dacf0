#pragma once

#include <functional>
#include <vector>

#include "qgraph/chebyshev.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

// Chebyshev panel on [a, b] holding values and first derivatives at the nodes.
struct Panel {
  double a = 0.0;
  double b = 0.0;
  CVector value;
  CVector deriv;

  double node(int j) const { return 0.5 * (a + b) + 0.5 * (b - a) * cheb::nodes()(j); }
};

struct EdgeFunction {
  double length = 0.0;
  std::vector<Panel> panels;

  Complex value(double x) const;
  Complex derivative(double x) const;
  std::vector<double> breaks() const;
};

// Panel layout per edge: ascending break lists starting at 0 and ending at the edge length.
using PanelPlan = std::vector<std::vector<double>>;

// wavenumber: largest expected sqrt|zeta - V|; extra: additional per-edge break points.
PanelPlan make_plan(const MetricGraph& graph, double wavenumber,
                    const std::vector<std::vector<double>>& extra = {});
PanelPlan merge_plans(const PanelPlan& a, const PanelPlan& b);

class GraphFunction {
 public:
  using Fn = std::function<Complex(Index edge, double x)>;

  GraphFunction() = default;
  explicit GraphFunction(std::vector<EdgeFunction> edges) : edges_(std::move(edges)) {}

  // Derivatives from the Chebyshev differentiation matrix unless dfn is given.
  static GraphFunction sample(const PanelPlan& plan, const Fn& fn, const Fn& dfn = nullptr);
  static GraphFunction zero(const MetricGraph& graph);

  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  const EdgeFunction& edge(Index e) const { return edges_[static_cast<size_t>(e)]; }
  EdgeFunction& edge(Index e) { return edges_[static_cast<size_t>(e)]; }

  Complex value(Index e, double x) const { return edge(e).value(x); }
  Complex derivative(Index e, double x) const { return edge(e).derivative(x); }
  PanelPlan plan() const;

  TraceVector traces() const;
  GraphFunction resampled(const PanelPlan& plan) const;

 private:
  std::vector<EdgeFunction> edges_;
};

GraphFunction operator+(const GraphFunction& f, const GraphFunction& g);
GraphFunction operator-(const GraphFunction& f, const GraphFunction& g);
GraphFunction operator*(Complex c, const GraphFunction& f);
GraphFunction combine(const std::vector<GraphFunction>& fs, const CVector& coeffs);

// Integral of f * conj(g) over the graph.
Complex inner(const GraphFunction& f, const GraphFunction& g);
// Integral of w f conj(g) with a per-edge real weight.
Complex inner_weighted(const GraphFunction& f, const GraphFunction& g, const std::vector<Potential>& w);
double l2_norm(const GraphFunction& f);

// Max over panel nodes of |-u'' + V u - zeta u - f| (second derivative from the panel data).
double ode_residual(const MetricGraph& graph, const GraphFunction& u, Complex zeta, const GraphFunction* f);

}  // namespace qgraph
