#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/lagrangian.hpp"

namespace qgraph {

class Potential {
 public:
  enum class Kind { Constant, PiecewiseConstant, Sampled };
  using Fn = std::function<double(double)>;

  Potential() = default;
  static Potential constant(double v);
  // values.size() == breakpoints.size() + 1; breakpoints strictly ascending.
  static Potential piecewise_constant(std::vector<double> breakpoints, std::vector<double> values);
  // hints: points where fn may be non-smooth (used for quadrature panels).
  static Potential sampled(Fn fn, std::vector<double> hints = {});

  Kind kind() const { return kind_; }
  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  const Fn& function() const { return fn_; }
  bool is_zero() const { return kind_ == Kind::Constant && values_[0] == 0.0; }

  // Sup and inf over [0, length] (sampled potentials on a fine grid).
  std::pair<double, double> range(double length) const;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<double> breaks_;
  std::vector<double> values_{0.0};
  Fn fn_;
};

struct Edge {
  std::string id;
  double length = 1.0;
  Potential potential;
};

class MetricGraph {
 public:
  MetricGraph() = default;
  explicit MetricGraph(std::vector<Edge> edges);

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(Index e) const { return edges_[static_cast<size_t>(e)]; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  Index boundary_dim() const { return 2 * edge_count(); }
  static Index a_index(Index e) { return 2 * e; }
  static Index b_index(Index e) { return 2 * e + 1; }
  double total_length() const;
  double max_length() const;
  double min_potential() const;
  double max_abs_potential() const;

 private:
  std::vector<Edge> edges_;
};

// gamma0 = endpoint values, gamma1 = inward derivatives (u'(a_e), -u'(b_e)).
struct TraceVector {
  CVector gamma0;
  CVector gamma1;
  CVector stacked() const;
  static TraceVector from_stacked(const CVector& v);
};

struct StarMap {
  std::vector<Index> center;  // a-endpoints identified at the center
  std::vector<Index> leaves;  // b-endpoints
};

MetricGraph build_interval(double length, Potential potential = Potential::constant(0.0));

std::pair<MetricGraph, StarMap> build_star(const std::vector<double>& lengths,
                                           std::vector<Potential> potentials = {});

BoundaryPair dirichlet_pair(Index m);
BoundaryPair neumann_pair(Index m);
// X = Theta, Y = I: outward derivative equals Theta times the value.
BoundaryPair robin_pair(const CMatrix& theta);

// Continuity plus sum of inward derivatives = t u(center); outer acts on the leaf endpoints.
BoundaryPair delta_conditions(const MetricGraph& graph, const StarMap& star, double t,
                              const BoundaryPair& outer);
BoundaryPair delta_conditions(const MetricGraph& graph, const StarMap& star, double t,
                              const std::vector<BoundaryPair>& per_leaf);
PairDerivative delta_conditions_derivative(const MetricGraph& graph, const StarMap& star);

BoundaryPair robin_homotopy_pair(const MetricGraph& graph, double t);
PairDerivative robin_homotopy_derivative(const MetricGraph& graph, double t);

BoundaryPair floquet_pair(double theta);
PairDerivative floquet_derivative(double theta);

}  // namespace qgraph
