#include <doctest.h>

#include "oracles.hpp"
#include "qgraph/graph_function.hpp"

using namespace qgraph;

namespace {

template <typename F>
ErrorKind kind_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

bool compatible(const BoundaryPair& p) {
  return norm_inf(CMatrix(p.x() * p.y().adjoint() - p.y() * p.x().adjoint())) <= 1e-12;
}

}  // namespace

TEST_CASE("build_interval") {
  const MetricGraph g = build_interval(1.0);
  CHECK(g.edge_count() == 1);
  CHECK(g.boundary_dim() == 2);
  CHECK(MetricGraph::a_index(0) == 0);
  CHECK(MetricGraph::b_index(0) == 1);

  const MetricGraph g2 = build_interval(2.0, Potential::constant(5.0));
  CHECK(g2.edge(0).length == 2.0);
  CHECK(g2.edge(0).potential(0.7) == 5.0);
  CHECK(kind_of([] { build_interval(-1.0); }) == ErrorKind::NonpositiveLength);
  CHECK(kind_of([] { build_interval(0.0); }) == ErrorKind::NonpositiveLength);
}

TEST_CASE("build_star") {
  auto [g, star] = build_star({1, 1, 1});
  CHECK(g.edge_count() == 3);
  CHECK(star.center == std::vector<Index>{0, 2, 4});
  CHECK(star.leaves == std::vector<Index>{1, 3, 5});

  auto [path, pmap] = build_star({1, 2});
  CHECK(path.edge_count() == 2);
  CHECK(pmap.center.size() == 2);
  CHECK(kind_of([] { build_star({1}); }) == ErrorKind::TooFewEdges);
}

TEST_CASE("potentials") {
  const Potential pc = Potential::piecewise_constant({0.25, 0.5}, {1, 2, 3});
  CHECK(pc(0.1) == 1);
  CHECK(pc(0.3) == 2);
  CHECK(pc(0.9) == 3);
  CHECK(kind_of([] { Potential::piecewise_constant({0.5, 0.25}, {1, 2, 3}); }) == ErrorKind::InvalidPotential);
  CHECK(kind_of([] { Potential::piecewise_constant({0.5}, {1}); }) == ErrorKind::InvalidPotential);
  CHECK(kind_of([] { Potential::constant(std::nan("")); }) == ErrorKind::InvalidPotential);
  const Potential s = Potential::sampled([](double x) { return x * x; });
  CHECK(s(0.5) == 0.25);
  auto [lo, hi] = s.range(2.0);
  CHECK(hi == doctest::Approx(4.0));
  CHECK(lo == doctest::Approx(0.0));
}

TEST_CASE("delta_conditions") {
  auto [g, star] = build_star({1, 1, 1});
  const BoundaryPair k0 = delta_conditions(g, star, 0.0, dirichlet_pair(3));
  CHECK(compatible(k0));
  // Continuity, Kirchhoff sum and Dirichlet tips, checked on explicit trace vectors.
  CVector f = CVector::Zero(12);
  f(0) = f(2) = f(4) = 1.0;               // equal centre values, zero tips
  f(6) = 0.5, f(8) = -1.5, f(10) = 1.0;   // inward derivatives at the centre sum to 0
  CHECK(membership(k0, f));
  f(10) = 2.0;
  CHECK_FALSE(membership(k0, f));

  const BoundaryPair k1 = delta_conditions(g, star, 1.0, dirichlet_pair(3));
  CHECK(k1.x()(2, 0) == Complex(-1.0));
  for (Index c = 1; c < 6; ++c) CHECK(k1.x()(2, c) == Complex(0.0));
  f(10) = 2.0;  // now the derivative sum equals t * u(centre) = 1
  CHECK(membership(k1, f));

  for (double t : {-3.0, -0.4, 0.0, 0.7, 12.0}) CHECK(compatible(delta_conditions(g, star, t, neumann_pair(3))));
  CHECK(kind_of([&] { delta_conditions(g, star, 0.0, dirichlet_pair(2)); }) == ErrorKind::InvalidOuterBlock);
}

TEST_CASE("delta_conditions commute with edge relabelling") {
  auto [g, star] = build_star({1.0, 2.0, 3.0});
  auto [h, hstar] = build_star({3.0, 1.0, 2.0});  // new edge i is old edge perm[i]
  const std::vector<Index> perm{2, 0, 1};
  const CMatrix q = projection(delta_conditions(g, star, 0.0, neumann_pair(3)));
  const CMatrix qh = projection(delta_conditions(h, hstar, 0.0, neumann_pair(3)));
  RMatrix p = RMatrix::Zero(12, 12);
  for (Index blk = 0; blk < 2; ++blk)
    for (Index i = 0; i < 3; ++i) {
      p(blk * 6 + 2 * i, blk * 6 + 2 * perm[i]) = 1.0;
      p(blk * 6 + 2 * i + 1, blk * 6 + 2 * perm[i] + 1) = 1.0;
    }
  const CMatrix pc = p.cast<Complex>();
  CHECK(norm_inf(CMatrix(qh - pc * q * pc.transpose())) < 1e-12);
}

TEST_CASE("robin_homotopy_pair") {
  const MetricGraph g = build_interval(1.0);
  const BoundaryPair d = robin_homotopy_pair(g, 0.0), n = robin_homotopy_pair(g, 1.0);
  CHECK(same_plane(d, dirichlet_pair(2)));
  CHECK(same_plane(n, neumann_pair(2)));
  CHECK(norm_inf(CMatrix(n.y() + CMatrix::Identity(2, 2))) < 1e-15);
  const BoundaryPair h = robin_homotopy_pair(g, 0.5);
  CHECK(std::abs(h.x()(0, 0) - std::cos(oracle::pi / 4)) < 1e-15);
  CHECK(std::abs(h.y()(1, 1) + std::sin(oracle::pi / 4)) < 1e-15);
  CHECK(compatible(h));
}

TEST_CASE("floquet_pair") {
  const BoundaryPair p0 = floquet_pair(0.0);
  CMatrix x(2, 2), y(2, 2);
  x << -1, 1, 0, 0;
  y << 0, 0, 1, 1;
  CHECK(p0.x() == x);
  CHECK(p0.y() == y);
  // periodic data: u(0) = u(1), u'(0) = u'(1), so Gamma1 = (d, -d)
  CVector f(4);
  f << 0.3, 0.3, 1.7, -1.7;
  CHECK(membership(p0, f));
  const BoundaryPair ppi = floquet_pair(oracle::pi);
  f << 0.3, -0.3, 1.7, 1.7;
  CHECK(membership(ppi, f));
  for (double th = 0.0; th < 2 * oracle::pi; th += 0.37) CHECK(compatible(floquet_pair(th)));
}

TEST_CASE("trace ordering follows the inward convention") {
  auto [g, star] = build_star({1.0, 0.5, 2.0});
  auto fn = [](Index e, double x) { return Complex(std::sin(1.3 * x + e) + 0.2 * x * x * (e + 1)); };
  const GraphFunction u = GraphFunction::sample(make_plan(g, 4.0), fn);
  const TraceVector tv = u.traces();
  const double h = 1e-5;
  for (Index e = 0; e < g.edge_count(); ++e) {
    const double l = g.edge(e).length;
    const Complex da = (fn(e, h) - fn(e, -h)) / (2 * h);
    const Complex db = (fn(e, l + h) - fn(e, l - h)) / (2 * h);
    CHECK(std::abs(tv.gamma0(MetricGraph::a_index(e)) - fn(e, 0.0)) < 1e-12);
    CHECK(std::abs(tv.gamma0(MetricGraph::b_index(e)) - fn(e, l)) < 1e-12);
    CHECK(std::abs(tv.gamma1(MetricGraph::a_index(e)) - da) < 1e-8);
    CHECK(std::abs(tv.gamma1(MetricGraph::b_index(e)) + db) < 1e-8);
  }
}
