#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace qgraph {

Potential Potential::constant(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidPotential, "constant potential not finite");
  Potential p;
  p.kind_ = Kind::Constant;
  p.values_ = {v};
  return p;
}

Potential Potential::piecewise_constant(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw Error(ErrorKind::InvalidPotential, "piecewise potential needs one more value than breakpoints");
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || (i > 0 && breakpoints[i] <= breakpoints[i - 1]))
      throw Error(ErrorKind::InvalidPotential, "breakpoints must be finite and strictly ascending");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidPotential, "potential value not finite");
  Potential p;
  p.kind_ = breakpoints.empty() ? Kind::Constant : Kind::PiecewiseConstant;
  p.breaks_ = std::move(breakpoints);
  p.values_ = std::move(values);
  return p;
}

Potential Potential::sampled(Fn fn, std::vector<double> hints) {
  if (!fn) throw Error(ErrorKind::InvalidPotential, "sampled potential without callable");
  std::sort(hints.begin(), hints.end());
  Potential p;
  p.kind_ = Kind::Sampled;
  p.fn_ = std::move(fn);
  p.breaks_ = std::move(hints);
  p.values_.clear();
  return p;
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant: return values_[0];
    case Kind::PiecewiseConstant: {
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      return values_[static_cast<size_t>(it - breaks_.begin())];
    }
    case Kind::Sampled: return fn_(x);
  }
  return 0.0;
}

std::pair<double, double> Potential::range(double length) const {
  if (kind_ != Kind::Sampled) {
    double lo = values_[0], hi = values_[0];
    for (size_t i = 0; i < values_.size(); ++i) {
      // skip pieces lying outside [0, length]
      const double left = i == 0 ? -INFINITY : breaks_[i - 1];
      const double right = i == breaks_.size() ? INFINITY : breaks_[i];
      if (right <= 0.0 || left >= length) continue;
      lo = std::min(lo, values_[i]);
      hi = std::max(hi, values_[i]);
    }
    return {lo, hi};
  }
  const int n = 512;
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double v = fn_(length * i / n);
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidPotential, "sampled potential not finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

MetricGraph::MetricGraph(std::vector<Edge> edges) : edges_(std::move(edges)) {
  std::set<std::string> ids;
  for (const auto& e : edges_) {
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw Error(ErrorKind::NonpositiveLength, "edge '" + e.id + "' has non-positive length");
    if (!ids.insert(e.id).second) throw Error(ErrorKind::InvalidPotential, "duplicate edge id '" + e.id + "'");
    e.potential.range(e.length);
  }
}

double MetricGraph::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

double MetricGraph::max_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s = std::max(s, e.length);
  return s;
}

double MetricGraph::min_potential() const {
  double v = INFINITY;
  for (const auto& e : edges_) v = std::min(v, e.potential.range(e.length).first);
  return v;
}

double MetricGraph::max_abs_potential() const {
  double v = 0.0;
  for (const auto& e : edges_) {
    const auto r = e.potential.range(e.length);
    v = std::max({v, std::abs(r.first), std::abs(r.second)});
  }
  return v;
}

CVector TraceVector::stacked() const {
  CVector v(gamma0.size() + gamma1.size());
  v << gamma0, gamma1;
  return v;
}

TraceVector TraceVector::from_stacked(const CVector& v) {
  const Index m = v.size() / 2;
  return {v.head(m), v.tail(m)};
}

MetricGraph build_interval(double length, Potential potential) {
  if (!(length > 0.0)) throw Error(ErrorKind::NonpositiveLength, "interval length must be positive");
  return MetricGraph({Edge{"e0", length, std::move(potential)}});
}

std::pair<MetricGraph, StarMap> build_star(const std::vector<double>& lengths,
                                           std::vector<Potential> potentials) {
  if (lengths.size() < 2) throw Error(ErrorKind::TooFewEdges, "star needs at least two edges");
  if (potentials.empty()) potentials.assign(lengths.size(), Potential::constant(0.0));
  if (potentials.size() != lengths.size())
    throw Error(ErrorKind::DimensionMismatch, "one potential per edge required");
  std::vector<Edge> edges;
  StarMap star;
  for (size_t i = 0; i < lengths.size(); ++i) {
    edges.push_back(Edge{"e" + std::to_string(i), lengths[i], potentials[i]});
    star.center.push_back(MetricGraph::a_index(static_cast<Index>(i)));
    star.leaves.push_back(MetricGraph::b_index(static_cast<Index>(i)));
  }
  return {MetricGraph(std::move(edges)), star};
}

BoundaryPair dirichlet_pair(Index m) {
  return validate_pair(CMatrix::Identity(m, m), CMatrix::Zero(m, m));
}

BoundaryPair neumann_pair(Index m) {
  return validate_pair(CMatrix::Zero(m, m), CMatrix::Identity(m, m));
}

BoundaryPair robin_pair(const CMatrix& theta) {
  return validate_pair(theta, CMatrix::Identity(theta.rows(), theta.cols()));
}

namespace {

void check_star(const MetricGraph& graph, const StarMap& star) {
  const Index m = graph.boundary_dim();
  if (star.center.size() < 2 || star.center.size() + star.leaves.size() != static_cast<size_t>(m))
    throw Error(ErrorKind::DimensionMismatch, "star map does not cover the boundary");
  std::set<Index> seen;
  for (Index i : star.center) seen.insert(i);
  for (Index i : star.leaves) seen.insert(i);
  if (seen.size() != static_cast<size_t>(m) || *seen.begin() < 0 || *seen.rbegin() >= m)
    throw Error(ErrorKind::DimensionMismatch, "star map indices invalid");
}

}  // namespace

BoundaryPair delta_conditions(const MetricGraph& graph, const StarMap& star, double t,
                              const BoundaryPair& outer) {
  check_star(graph, star);
  const Index m = graph.boundary_dim();
  const Index n = static_cast<Index>(star.center.size());
  const Index k = static_cast<Index>(star.leaves.size());
  if (outer.dim() != k) throw Error(ErrorKind::InvalidOuterBlock, "outer pair must act on the leaf endpoints");
  CMatrix x = CMatrix::Zero(m, m), y = CMatrix::Zero(m, m);
  for (Index r = 0; r + 1 < n; ++r) {
    x(r, star.center[r]) = 1.0;
    x(r, star.center[r + 1]) = -1.0;
  }
  x(n - 1, star.center[0]) = -t;
  for (Index c : star.center) y(n - 1, c) = 1.0;
  for (Index r = 0; r < k; ++r)
    for (Index c = 0; c < k; ++c) {
      x(n + r, star.leaves[c]) = outer.x()(r, c);
      y(n + r, star.leaves[c]) = outer.y()(r, c);
    }
  return validate_pair(x, y);
}

BoundaryPair delta_conditions(const MetricGraph& graph, const StarMap& star, double t,
                              const std::vector<BoundaryPair>& per_leaf) {
  const Index k = static_cast<Index>(per_leaf.size());
  if (k != static_cast<Index>(star.leaves.size()))
    throw Error(ErrorKind::InvalidOuterBlock, "one outer block per leaf required");
  CMatrix x = CMatrix::Zero(k, k), y = CMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    if (per_leaf[static_cast<size_t>(i)].dim() != 1)
      throw Error(ErrorKind::InvalidOuterBlock, "leaf blocks must be 1x1 (one endpoint per leaf)");
    x(i, i) = per_leaf[static_cast<size_t>(i)].x()(0, 0);
    y(i, i) = per_leaf[static_cast<size_t>(i)].y()(0, 0);
  }
  return delta_conditions(graph, star, t, validate_pair(x, y));
}

PairDerivative delta_conditions_derivative(const MetricGraph& graph, const StarMap& star) {
  check_star(graph, star);
  const Index m = graph.boundary_dim();
  const Index n = static_cast<Index>(star.center.size());
  PairDerivative d{CMatrix::Zero(m, m), CMatrix::Zero(m, m)};
  d.dx(n - 1, star.center[0]) = -1.0;
  return d;
}

BoundaryPair robin_homotopy_pair(const MetricGraph& graph, double t) {
  const Index m = graph.boundary_dim();
  const double a = std::numbers::pi * t / 2.0;
  return validate_pair(std::cos(a) * CMatrix::Identity(m, m), -std::sin(a) * CMatrix::Identity(m, m));
}

PairDerivative robin_homotopy_derivative(const MetricGraph& graph, double t) {
  const Index m = graph.boundary_dim();
  const double a = std::numbers::pi * t / 2.0;
  const double h = std::numbers::pi / 2.0;
  return {-h * std::sin(a) * CMatrix::Identity(m, m), -h * std::cos(a) * CMatrix::Identity(m, m)};
}

BoundaryPair floquet_pair(double theta) {
  const Complex e = std::polar(1.0, theta);
  CMatrix x(2, 2), y(2, 2);
  x << -e, 1.0, 0.0, 0.0;
  y << 0.0, 0.0, e, 1.0;
  return validate_pair(x, y);
}

PairDerivative floquet_derivative(double theta) {
  const Complex de = Complex(0.0, 1.0) * std::polar(1.0, theta);
  CMatrix dx = CMatrix::Zero(2, 2), dy = CMatrix::Zero(2, 2);
  dx(0, 0) = -de;
  dy(1, 0) = de;
  return {dx, dy};
}

}  // namespace qgraph
