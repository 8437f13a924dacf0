#pragma once

// Seeded fuzz suites for the structural identities. Each suite reports its worst normalised error.

#include <string>
#include <vector>

#include "oracles.hpp"
#include "qgraph/spectral.hpp"

namespace props {

using namespace qgraph;

struct Outcome {
  std::string name;
  int instances = 0;
  double worst = 0.0;  // largest error / allowed error; passes when <= 1
};

inline void note(Outcome& o, double err, double allowed) { o.worst = std::max(o.worst, err / allowed); }

struct Instance {
  MetricGraph graph;
  BoundaryPair p1, p2;
  Complex zeta;
};

inline MetricGraph random_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ne(1, 3);
  std::uniform_real_distribution<double> len(0.5, 1.5), pot(-5.0, 5.0), cut(0.1, 0.9);
  std::vector<Edge> edges;
  const int n = ne(rng);
  for (int e = 0; e < n; ++e) {
    const double l = len(rng);
    edges.push_back({"e" + std::to_string(e), l, Potential::piecewise_constant({cut(rng) * l}, {pot(rng), pot(rng)})});
  }
  return MetricGraph(edges);
}

inline Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance in;
  in.graph = random_graph(rng);
  const Index m = in.graph.boundary_dim();
  auto [x1, y1] = oracle::random_lagrangian(rng, m);
  auto [x2, y2] = oracle::random_lagrangian(rng, m);
  in.p1 = validate_pair(x1, y1);
  in.p2 = validate_pair(x2, y2);
  std::uniform_real_distribution<double> re(-5.0, 40.0), im(0.5, 3.0);
  in.zeta = Complex(re(rng), im(rng));
  return in;
}

inline GraphFunction random_fn(const MetricGraph& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<std::array<Complex, 3>> c(static_cast<size_t>(g.edge_count()));
  for (auto& row : c)
    for (auto& x : row) x = Complex(n(rng), n(rng));
  return GraphFunction::sample(make_plan(g, 5.0), [c](Index e, double x) {
    const auto& r = c[static_cast<size_t>(e)];
    return r[0] + r[1] * x + r[2] * std::cos(4.0 * x);
  });
}

// Q* = Q, Q^2 = Q, QJQ = 0, (I - Q)[-Y*; X*] = 0, omega(Qf, Qg) = 0.
inline Outcome projection_suite(int seeds) {
  Outcome o{"projection idempotence, self-adjointness, isotropy"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    std::mt19937_64 rng(1000 + s);
    const Index m = 1 + s % 5;
    auto [x, y] = oracle::random_lagrangian(rng, m);
    const double scale = std::max(norm2(x), norm2(y));
    x /= scale;
    y /= scale;
    const BoundaryPair p = validate_pair(x, y);
    const CMatrix q = projection(p);
    const CMatrix j = symplectic_j(m);
    note(o, norm_inf(CMatrix(q - q.adjoint())), 1e-12);
    note(o, norm_inf(CMatrix(q * q - q)), 1e-12);
    note(o, norm_inf(CMatrix(q * j * q)), 1e-12);
    CMatrix span(2 * m, m);
    span << -y.adjoint(), x.adjoint();
    note(o, norm_inf(CMatrix((CMatrix::Identity(2 * m, 2 * m) - q) * span)), 1e-12);
    const CVector f = oracle::random_vector(rng, 2 * m), g = oracle::random_vector(rng, 2 * m);
    note(o, std::abs(omega(q * f, q * g)), 1e-12 * f.norm() * g.norm());
    note(o, std::abs(q.trace() - Complex(static_cast<double>(m))), 1e-12);
  }
  return o;
}

// Z21 = Q2 J Q1 and Z21* = -Z12.
inline Outcome coupling_suite(int seeds) {
  Outcome o{"Z = Q2 J Q1"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    std::mt19937_64 rng(2000 + s);
    const Index m = 1 + s % 4;
    auto [x1, y1] = oracle::random_lagrangian(rng, m);
    auto [x2, y2] = oracle::random_lagrangian(rng, m);
    const BoundaryPair p1 = validate_pair(x1, y1), p2 = validate_pair(x2, y2);
    const CMatrix z21 = coupling_z(p2, p1), z12 = coupling_z(p1, p2);
    note(o, norm_inf(CMatrix(z21 - projection(p2) * symplectic_j(m) * projection(p1))), 1e-12);
    note(o, norm_inf(CMatrix(z21.adjoint() + z12)), 1e-12);
  }
  return o;
}

inline Outcome scale_suite(int seeds) {
  Outcome o{"chart scale invariance"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    std::mt19937_64 rng(3000 + s);
    const Index m = 1 + s % 4;
    auto [x, y] = oracle::random_lagrangian(rng, m);
    std::normal_distribution<double> n;
    const Complex c(n(rng), n(rng));
    const BoundaryPair p = validate_pair(x, y);
    note(o, norm_inf(CMatrix(projection(p) - projection(validate_pair(c * x, c * y)))), 1e-12);
    const CMatrix g = oracle::random_matrix(rng, m, m);
    note(o, norm_inf(CMatrix(projection(p) - projection(validate_pair(g * x, g * y)))), 1e-10);
  }
  return o;
}

inline Outcome wronskian_suite(int seeds) {
  Outcome o{"Wronskian conservation"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    std::mt19937_64 rng(4000 + s);
    std::uniform_real_distribution<double> u(-10.0, 10.0), l(0.1, 2.0);
    const Complex z(u(rng) * 5.0, u(rng));
    const double a = u(rng), b = u(rng), len = l(rng);
    const TransferMatrix tc = propagate_constant(a, z, len);
    note(o, std::abs(tc.t.determinant() - 1.0), 1e-10 * std::max(1.0, tc.t.cwiseAbs2().sum()));
    const TransferMatrix ts = propagate_sampled([a, b](double x) { return a + b * std::sin(3 * x); }, z, len);
    note(o, ts.wronskian_drift, 1e-10 * std::max(1.0, ts.t.cwiseAbs2().sum()));
    const TransferMatrix tr = propagate_constant(a, u(rng) * 5.0, len);
    note(o, tr.t.imag().cwiseAbs().maxCoeff(), 1e-12);
  }
  return o;
}

// <R(z) f, g> = <f, R(conj z) g>.
inline Outcome symmetry_suite(int seeds) {
  Outcome o{"resolvent symmetry"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    const Instance in = random_instance(5000 + s);
    std::mt19937_64 rng(6000 + s);
    const GraphFunction f = random_fn(in.graph, rng), g = random_fn(in.graph, rng);
    const Complex lhs = inner(resolvent_apply(in.graph, in.p1, in.zeta, f), g);
    const Complex rhs = inner(f, resolvent_apply(in.graph, in.p1, std::conj(in.zeta), g));
    note(o, std::abs(lhs - rhs), 1e-9 * l2_norm(f) * l2_norm(g));
  }
  return o;
}

// f -> (R2 - R1) f on 50 random f has rank <= 2|E| and lands in the homogeneous solutions.
inline Outcome rank_suite(int seeds) {
  Outcome o{"rank <= 2|E| of resolvent differences"};
  for (int s = 0; s < seeds; ++s, ++o.instances) {
    const Instance in = random_instance(7000 + s);
    std::mt19937_64 rng(8000 + s);
    const Index ne = in.graph.edge_count();
    const int samples = 12;  // per edge
    CMatrix cols(ne * samples, 50);
    for (int k = 0; k < 50; ++k) {
      const GraphFunction f = random_fn(in.graph, rng);
      const GraphFunction d = resolvent_apply(in.graph, in.p2, in.zeta, f) - resolvent_apply(in.graph, in.p1, in.zeta, f);
      if (k == 0) note(o, ode_residual(in.graph, d, in.zeta, nullptr), 1e-7 * std::max(1.0, l2_norm(d)));
      for (Index e = 0; e < ne; ++e)
        for (int i = 0; i < samples; ++i)
          cols(e * samples + i, k) = d.value(e, in.graph.edge(e).length * (i + 0.5) / samples);
    }
    const RVector sv = singular_values(cols);
    if (sv.size() > 2 * ne) note(o, sv(2 * ne), 1e-10 * sv(0));
  }
  return o;
}

inline std::vector<Outcome> all(int seeds) {
  return {projection_suite(seeds), coupling_suite(seeds), scale_suite(seeds),
          wronskian_suite(seeds),  symmetry_suite(seeds), rank_suite(seeds)};
}

}  // namespace props
