#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qgraph/perturbation.hpp"

using namespace qgraph;
using oracle::pi;

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

FamilyPath constant_path(const MetricGraph& g, const BoundaryPair& p) {
  const Index m = p.dim();
  return FamilyPath(0.0, 1.0, [g](double) { return g; }, [p](double) { return p; })
      .with_pair_derivative([m](double) { return PairDerivative{CMatrix::Zero(m, m), CMatrix::Zero(m, m)}; })
      .with_fixed_potential();
}

// Eigenvalues of the family within lambda0 +- radius at parameter t.
std::vector<double> levels(const FamilyPath& path, double t, double lambda0, double radius) {
  std::vector<double> out;
  for (const auto& e : eigenvalues(path.graph(t), path.pair(t), lambda0 - radius, lambda0 + radius))
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.lambda);
  return out;
}

// Central differences of the analytic branches through a level of multiplicity m:
// ascending order at +h pairs with descending order at -h.
std::vector<double> fd_branch_slopes(const FamilyPath& path, double t0, double lambda0, size_t m, double h) {
  const auto up = levels(path, t0 + h, lambda0, 0.5);
  const auto dn = levels(path, t0 - h, lambda0, 0.5);
  REQUIRE(up.size() == m);
  REQUIRE(dn.size() == m);
  std::vector<double> s;
  for (size_t k = 0; k < m; ++k) s.push_back((up[k] - dn[m - 1 - k]) / (2 * h));
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<Potential> constants(std::initializer_list<double> v) {
  std::vector<Potential> out;
  for (double x : v) out.push_back(Potential::constant(x));
  return out;
}

}  // namespace

TEST_CASE("Robin homotopy slope") {
  const MetricGraph g = build_interval(1.0);
  const FamilyPath path = robin_homotopy_family(g);
  const SlopeMatrix sm = slope_matrix(path, 0.0, pi * pi);
  REQUIRE(sm.b.rows() == 1);
  CHECK(std::abs(sm.b(0, 0) + 2 * std::pow(pi, 3)) < 1e-9 * 2 * std::pow(pi, 3));
  const SlopeReport rep = hadamard_slopes(path, 0.0, pi * pi);
  CHECK(rep.multiplicity == 1);
  CHECK(rep.slopes(0) == doctest::Approx(-2 * std::pow(pi, 3)).epsilon(1e-10));

  // interior points against the explicit formula with an independent eigenfunction
  for (double t0 : {0.15, 0.4, 0.65, 0.9}) {
    const double lam = oracle::robin_interval_eigenvalues(t0, 5.0).front();
    const auto mode = oracle::robin_interval_mode(t0, lam);
    auto [g0, g1] = mode.traces();
    const double ref = -pi / 2 * (std::sin(pi * t0 / 2) * g0 + std::cos(pi * t0 / 2) * g1).squaredNorm();
    CHECK(hadamard_slopes(path, t0, lam).slopes(0) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("boundary vectors reproduce the traces") {
  const FamilyPath path = delta_star_family({1.0, 0.6, 1.4}, {}, neumann_pair(3), -2.0, 2.0);
  const double lam = eigenvalues(path.graph(0.5), path.pair(0.5), 1.0, 30.0).front().lambda;
  const SlopeReport rep = hadamard_slopes(path, 0.5, lam);
  const BoundaryPair p = path.pair(0.5);
  for (int j = 0; j < rep.multiplicity; ++j) {
    const CVector phi = rep.phi.col(j);
    CHECK((rep.traces[j].gamma0 + p.y().adjoint() * phi).norm() < 1e-8);
    CHECK((rep.traces[j].gamma1 - p.x().adjoint() * phi).norm() < 1e-8);
  }
}

TEST_CASE("pure potential path") {
  const MetricGraph g = build_interval(1.0);
  const FamilyPath c = potential_family(g, dirichlet_pair(2), constants({3.0}));
  CHECK(hadamard_slopes(c, 0.0, 4 * pi * pi).slopes(0) == doctest::Approx(3.0).epsilon(1e-10));
  // <x u, u> = 1/2 for every Dirichlet mode by symmetry
  const FamilyPath lin = potential_family(g, dirichlet_pair(2), {Potential::sampled([](double x) { return x; })});
  for (int k = 1; k <= 3; ++k) CHECK(hadamard_slopes(lin, 0.0, k * k * pi * pi).slopes(0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("delta star slopes are |u(v_c)|^2") {
  const FamilyPath path = delta_star_family({1.0, 1.0, 1.0}, {}, dirichlet_pair(3));
  for (double lam : {pi * pi / 4, pi * pi, 2.25 * pi * pi}) {
    const SlopeReport rep = hadamard_slopes(path, 0.0, lam);
    for (int j = 0; j < rep.multiplicity; ++j)
      CHECK(std::abs(rep.slopes(j) - std::norm(rep.adapted[j].value(0, 0.0))) < 1e-8);
  }
  CHECK(hadamard_slopes(path, 0.0, pi * pi / 4).slopes(0) > 0.1);

  // off the symmetric point the centre values differ edge to edge only through continuity
  const FamilyPath skew = delta_star_family({1.0, 0.7, 1.3}, {}, neumann_pair(3), -1.0, 1.0);
  const auto ev = eigenvalues(skew.graph(0.3), skew.pair(0.3), 0.5, 40.0);
  for (const auto& e : ev) {
    const SlopeReport rep = hadamard_slopes(skew, 0.3, e);
    for (int j = 0; j < rep.multiplicity; ++j) {
      CHECK(std::abs(rep.slopes(j) - std::norm(rep.adapted[j].value(1, 0.0))) < 1e-8);
      const auto fd = fd_branch_slopes(skew, 0.3, e.lambda, 1, 1e-4);
      CHECK(std::abs(rep.slopes(j) - fd[0]) < 1e-6);
    }
  }
}

TEST_CASE("Floquet slope equals 2 Im(u'(0) conj u(0))") {
  const MetricGraph g = build_interval(1.0, Potential::piecewise_constant({0.5}, {0.0, 4.0}));
  const FamilyPath path = floquet_theta_family(g, 0.0, 2 * pi);
  for (double th : {0.7, 2.0, 4.1}) {
    const auto ev = eigenvalues(path.graph(th), path.pair(th), -5.0, 60.0);
    for (const auto& e : ev) {
      const SlopeReport rep = hadamard_slopes(path, th, e);
      REQUIRE(rep.multiplicity == 1);
      const Complex u0 = rep.traces[0].gamma0(0), du0 = rep.traces[0].gamma1(0);
      CHECK(std::abs(rep.slopes(0) - 2 * (du0 * std::conj(u0)).imag()) < 1e-8 * std::max(1.0, e.lambda));
      const auto fd = fd_branch_slopes(path, th, e.lambda, 1, 1e-4);
      CHECK(std::abs(rep.slopes(0) - fd[0]) < 1e-6 * std::max(1.0, std::abs(fd[0])));
    }
  }
}

TEST_CASE("slope matrix is basis independent") {
  auto [g, star] = build_star({1.0, 1.0, 1.0});
  const BoundaryPair p = delta_conditions(g, star, 0.0, dirichlet_pair(3));
  const FamilyPath path = potential_family(g, p, constants({1.0, 2.0, 4.0}));
  const EigenResult e = eigenfunctions(g, p, pi * pi);
  REQUIRE(e.multiplicity == 2);
  const SlopeMatrix a = slope_matrix(path, 0.0, e);
  CHECK(norm_inf(CMatrix(a.b - a.b.adjoint())) < 1e-9);

  std::mt19937_64 rng(41);
  const CMatrix u = oracle::random_unitary(rng, 2);
  EigenResult r = e;
  r.coefficients = e.coefficients * u;
  for (Index k = 0; k < 2; ++k) {
    r.eigenfunctions[k] = combine(e.eigenfunctions, u.col(k));
    CVector st = CVector::Zero(e.traces[0].stacked().size());
    for (Index i = 0; i < 2; ++i) st += u(i, k) * e.traces[i].stacked();
    r.traces[k] = TraceVector::from_stacked(st);
  }
  const SlopeMatrix b = slope_matrix(path, 0.0, r);
  CHECK((herm_eig(a.b).values - herm_eig(b.b).values).norm() < 1e-10);
  CHECK(norm_inf(CMatrix(b.b - u.adjoint() * a.b * u)) < 1e-10);
}

TEST_CASE("Kato selection at the star double level") {
  auto [g, star] = build_star({1.0, 1.0, 1.0});
  const BoundaryPair p = delta_conditions(g, star, 0.0, dirichlet_pair(3));
  const FamilyPath path = potential_family(g, p, constants({1.0, 2.0, 4.0}), -1.0, 1.0);
  const SlopeReport rep = hadamard_slopes(path, 0.0, pi * pi);
  REQUIRE(rep.multiplicity == 2);
  CHECK(rep.slopes(1) - rep.slopes(0) > 0.1);
  for (double h : {1e-3, 1e-4}) {
    const auto fd = fd_branch_slopes(path, 0.0, pi * pi, 2, h);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(rep.slopes(j) - fd[static_cast<size_t>(j)]) <= std::max(1e-6, 10 * h * h));
  }
}

TEST_CASE("track_curves") {
  const MetricGraph g = build_interval(1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  const auto br = track_curves(robin_homotopy_family(g), -1.0, 12.0, grid);
  REQUIRE(!br.empty());
  const Branch& b0 = br.front();
  CHECK(b0.t.front() == 0.0);
  CHECK(b0.lambda.front() == doctest::Approx(pi * pi).epsilon(1e-10));
  CHECK(std::abs(b0.lambda.back()) < 1e-9);
  for (size_t k = 1; k < b0.lambda.size(); ++k) CHECK(b0.lambda[k] < b0.lambda[k - 1]);

  const auto flat = track_curves(constant_path(g, dirichlet_pair(2)), 0.0, 100.0, grid);
  REQUIRE(flat.size() == 3);
  for (const auto& b : flat)
    for (double l : b.lambda) CHECK(l == doctest::Approx(b.lambda.front()).epsilon(1e-12));
}

TEST_CASE("Rohleder path: decreasing branches and counting identity") {
  auto [g, star] = build_star({1.0, 1.0, 1.0});
  const CMatrix th0 = CMatrix::Zero(6, 6);
  CMatrix th1 = CMatrix::Identity(6, 6) * 3.0;
  th1(0, 2) = th1(2, 0) = 1.0;
  const FamilyPath path = robin_matrix_family(g, th0, th1);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  for (const auto& b : track_curves(path, -30.0, 40.0, grid))
    for (double s : b.slope) CHECK(s < 0.0);

  const double lambda0 = 5.0;
  const FlowReport fr = spectral_flow(path, lambda0, FlowOptions{.half_window = 40.0});
  auto count_below = [&](double t) {
    int n = 0;
    for (const auto& e : eigenvalues(path.graph(t), path.pair(t), -60.0, lambda0))
      n += e.multiplicity;
    return n;
  };
  const int n0 = count_below(0.0), n1 = count_below(1.0);
  int crossings = 0;
  for (const auto& c : fr.crossings) {
    CHECK(c.n_plus == 0);
    crossings += c.n_minus;
  }
  CHECK(n1 - n0 > 0);
  CHECK(crossings == n1 - n0);
  CHECK(fr.spectral_flow == -(n1 - n0));
  CHECK(fr.maslov_index == fr.spectral_flow);
}

TEST_CASE("crossing forms") {
  const MetricGraph g = build_interval(1.0);
  const FamilyPath robin = robin_homotopy_family(g);
  for (double t0 : {0.0, 0.5}) {
    const double lam = t0 == 0.0 ? pi * pi : oracle::robin_interval_eigenvalues(t0, 5.0).front();
    const CrossingRecord c = crossing_form(robin, t0, lam);
    CHECK(c.n_minus == 1);
    CHECK(c.n_plus + c.n_zero == 0);
    const SlopeReport rep = hadamard_slopes(robin, t0, lam);
    CHECK(c.values(0) == rep.slopes(0));  // same computation
  }
  const CrossingRecord flat = crossing_form(constant_path(g, dirichlet_pair(2)), 0.5, pi * pi);
  CHECK(flat.n_zero == 1);

  const FamilyPath delta = delta_star_family({1.0, 1.0, 1.0}, {}, dirichlet_pair(3));
  const CrossingRecord d = crossing_form(delta, 0.0, pi * pi);  // eigenfunctions vanish at the centre
  CHECK(d.n_zero == 2);
  const CrossingRecord s = crossing_form(delta, 0.0, pi * pi / 4);
  CHECK(s.n_plus == 1);
  CHECK(s.n_plus + s.n_minus + s.n_zero == 1);
}

TEST_CASE("spectral flow") {
  const MetricGraph g = build_interval(1.0);
  const FlowReport fr = spectral_flow(robin_homotopy_family(g), 5.0);
  CHECK(fr.spectral_flow == -1);
  CHECK(fr.maslov_index == -1);
  CHECK(fr.agree);

  const FlowReport flat = spectral_flow(constant_path(g, dirichlet_pair(2)), 5.0);
  CHECK(flat.spectral_flow == 0);
  CHECK(flat.maslov_index == 0);
  CHECK(kind_of([&] { spectral_flow(constant_path(g, dirichlet_pair(2)), pi * pi); }) == ErrorKind::DegenerateCrossing);
}

TEST_CASE("Riccati residual") {
  const MetricGraph g = build_interval(1.0);
  const GraphFunction one = GraphFunction::sample(make_plan(g, 1.0), [](Index, double) { return Complex(1.0); });
  CHECK(std::abs(riccati_residual(constant_path(g, neumann_pair(2)), 0.5, Complex(-1.0), one, one, 1e-3)) < 1e-10);

  const FamilyPath robin = robin_homotopy_family(g);
  const double r1 = std::abs(riccati_residual(robin, 0.5, Complex(-1.0), one, one, 1e-3));
  const double r2 = std::abs(riccati_residual(robin, 0.5, Complex(-1.0), one, one, 5e-4));
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));

  const FamilyPath pot = potential_family(g, dirichlet_pair(2), {Potential::sampled([](double x) { return std::cos(x); })});
  const GraphFunction f = GraphFunction::sample(make_plan(g, 2.0), [](Index, double x) { return Complex(x, 1 - x); });
  for (double h : {1e-2, 1e-3}) CHECK(std::abs(riccati_residual(pot, 0.2, Complex(2.0, 1.0), f, one, h)) < 5.0 * h * h);
  CHECK(kind_of([&] { riccati_residual(robin, 0.0, Complex(pi * pi), one, one, 1e-4); }) == ErrorKind::SpectrumHit);
}

TEST_CASE("scaling slopes") {
  struct Case {
    Potential v;
    Potential::Fn dv;
  };
  const std::vector<Case> cases{{Potential::constant(0.0), [](double) { return 0.0; }},
                                {Potential::sampled([](double x) { return x; }), [](double) { return 1.0; }},
                                {Potential::constant(3.5), [](double) { return 0.0; }}};
  for (const auto& c : cases) {
    const auto rows = scaling_slopes(c.v, c.dv, 3);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(std::abs(r.mu_dot - r.rellich) < 1e-8 * std::max(1.0, std::abs(r.rellich)));
      // mu_j(L) for the same potential on (0, L), central differences in L
      auto mu = [&](double len) {
        return eigenvalues(build_interval(len, c.v), dirichlet_pair(2), r.lambda - 5.0, r.lambda + 5.0).front().lambda;
      };
      const double d = 1e-3;
      const double fd = (-mu(1 + 2 * d) + 8 * mu(1 + d) - 8 * mu(1 - d) + mu(1 - 2 * d)) / (12 * d);
      CHECK(std::abs(r.mu_dot - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  const auto z = scaling_slopes(Potential::constant(0.0), [](double) { return 0.0; }, 1);
  CHECK(z[0].lambda_dot == doctest::Approx(0.0));
  CHECK(z[0].mu_dot == doctest::Approx(-2 * pi * pi).epsilon(1e-10));
  const auto k = scaling_slopes(Potential::constant(3.5), [](double) { return 0.0; }, 1);
  CHECK(k[0].lambda_dot == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(k[0].mu_dot == doctest::Approx(-2 * pi * pi).epsilon(1e-10));
}
