#include "qgraph/kronig_penney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgraph {

void PeriodicDeltaModel::validate() const {
  if (p < 1) throw Error(ErrorKind::ConfigError, "period p must be >= 1");
  if (static_cast<int>(alpha.size()) != p) throw Error(ErrorKind::DimensionMismatch, "alpha must have p entries");
  for (double a : alpha)
    if (!std::isfinite(a)) throw Error(ErrorKind::ConfigError, "alpha must be finite");
}

MetricGraph kp_chain(const PeriodicDeltaModel& model) {
  model.validate();
  std::vector<Edge> edges;
  edges.push_back({"c0", 0.5, Potential::constant(0.0)});
  for (int k = 1; k < model.p; ++k) edges.push_back({"c" + std::to_string(k), 1.0, Potential::constant(0.0)});
  edges.push_back({"c" + std::to_string(model.p), 0.5, Potential::constant(0.0)});
  return MetricGraph(edges);
}

RMatrix kp_permutation(int p) {
  const Index m = 2 * (p + 1);
  RMatrix perm = RMatrix::Zero(m, m);
  perm(0, 0) = 1.0;          // u(-1/2+) = a_0
  perm(1, m - 1) = 1.0;      // u(p-1/2 -) = b_p
  for (Index i = 2; i < m; ++i) perm(i, i - 1) = 1.0;  // b_0, a_1, b_1, ..., a_p
  return perm;
}

namespace {

std::pair<CMatrix, CMatrix> site_blocks(const PeriodicDeltaModel& model, double theta) {
  const Index m = 2 * (model.p + 1);
  const Complex e = std::polar(1.0, theta);
  CMatrix x = CMatrix::Zero(m, m), y = CMatrix::Zero(m, m);
  x(0, 0) = -e;
  x(0, 1) = 1.0;
  y(1, 0) = e;
  y(1, 1) = 1.0;
  for (int k = 0; k < model.p; ++k) {
    const Index r = 2 + 2 * k;
    x(r, r) = 1.0;
    x(r, r + 1) = -1.0;
    x(r + 1, r) = -model.alpha[static_cast<size_t>(k)];
    y(r + 1, r) = 1.0;
    y(r + 1, r + 1) = 1.0;
  }
  return {x, y};
}

double lower_bound(const PeriodicDeltaModel& model) {
  double s = 0.0;
  for (double a : model.alpha) s += std::abs(a);
  const double lo = -4.0 * s * s - 4.0;
  if (discriminant(model, lo) <= 2.0)
    throw Error(ErrorKind::NoConvergence, "could not bracket the bottom of the spectrum");
  return lo;
}

std::vector<double> expanded(const std::vector<EigenResult>& ev) {
  std::vector<double> out;
  for (const EigenResult& e : ev)
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.lambda);
  return out;
}

}  // namespace

BoundaryPair floquet_site_pair(const PeriodicDeltaModel& model, double theta) {
  model.validate();
  const auto [x, y] = site_blocks(model, theta);
  return validate_pair(x, y);
}

BoundaryPair floquet_boundary_pair(const PeriodicDeltaModel& model, double theta) {
  model.validate();
  const auto [x, y] = site_blocks(model, theta);
  const CMatrix perm = kp_permutation(model.p).cast<Complex>();
  return validate_pair(x * perm, y * perm);
}

std::vector<EigenResult> floquet_eigenvalues(const PeriodicDeltaModel& model, double theta, double lo, double hi,
                                             const SpectralOptions& opts) {
  return eigenvalues(kp_chain(model), floquet_boundary_pair(model, theta), lo, hi, opts);
}

double discriminant(const PeriodicDeltaModel& model, double lambda) {
  model.validate();
  const Complex z = lambda;
  TransferMatrix m = propagate_constant(0.0, z, 0.5);
  for (int k = 0; k < model.p; ++k) {
    m = compose(delta_jump(model.alpha[static_cast<size_t>(k)]), m);
    m = compose(propagate_constant(0.0, z, k + 1 < model.p ? 1.0 : 0.5), m);
  }
  return m.t.trace().real();
}

BandStructure band_structure(const PeriodicDeltaModel& model, double hi, const BandOptions& opts) {
  const double lo = lower_bound(model);
  if (!(hi > lo)) throw Error(ErrorKind::ConfigError, "band window upper bound below the spectrum");
  const double pi = std::numbers::pi;
  const std::vector<double> e0 = expanded(floquet_eigenvalues(model, 0.0, lo, hi, opts.spectral));
  const std::vector<double> epi = expanded(floquet_eigenvalues(model, pi, lo, hi, opts.spectral));
  BandStructure bs;
  const size_t n = std::min(e0.size(), epi.size());
  for (size_t i = 0; i < n; ++i) {
    Band b;
    b.index = static_cast<int>(i) + 1;
    if (i % 2 == 0) {
      b.lo = e0[i], b.hi = epi[i], b.theta_lo = 0.0, b.theta_hi = pi;
    } else {
      b.lo = epi[i], b.hi = e0[i], b.theta_lo = pi, b.theta_hi = 0.0;
    }
    bs.bands.push_back(b);
  }
  auto slack = [&](double x) { return opts.interlace_tol * std::max(1.0, std::abs(x)); };
  for (size_t i = 0; i < bs.bands.size(); ++i) {
    const Band& b = bs.bands[i];
    if (b.lo > b.hi + slack(b.hi))
      throw Error(ErrorKind::InterlacingViolation, "band " + std::to_string(b.index) + " has reversed edges");
    if (i + 1 < bs.bands.size() && b.hi > bs.bands[i + 1].lo + slack(b.hi))
      throw Error(ErrorKind::InterlacingViolation, "bands " + std::to_string(b.index) + " and " +
                                                       std::to_string(b.index + 1) + " overlap");
    for (double edge : {b.lo, b.hi}) {
      const double defect = std::abs(std::abs(discriminant(model, edge)) - 2.0);
      bs.max_edge_defect = std::max(bs.max_edge_defect, defect);
      if (defect > opts.edge_tol)
        throw Error(ErrorKind::InterlacingViolation,
                    "band edge " + std::to_string(edge) + " fails |D| = 2 (defect " + std::to_string(defect) + ")");
    }
    if (b.hi - b.lo > slack(b.hi) && std::abs(discriminant(model, 0.5 * (b.lo + b.hi))) > 2.0 + opts.edge_tol)
      throw Error(ErrorKind::InterlacingViolation, "band interior has |D| > 2");
  }
  for (size_t i = 0; i + 1 < bs.bands.size(); ++i) {
    Gap g;
    g.lo = bs.bands[i].hi;
    g.hi = bs.bands[i + 1].lo;
    g.width = std::max(0.0, g.hi - g.lo);
    g.closed = g.width < opts.closed_tol * std::max(1.0, std::abs(g.lo));
    bs.gaps.push_back(g);
  }
  return bs;
}

FamilyPath alpha0_family(const PeriodicDeltaModel& model, double theta, double t_lo, double t_hi) {
  model.validate();
  const MetricGraph chain = kp_chain(model);
  const Index m = chain.boundary_dim();
  CMatrix dxp = CMatrix::Zero(m, m);
  dxp(3, 2) = -1.0;
  const CMatrix dx = dxp * kp_permutation(model.p).cast<Complex>();
  FamilyPath path(t_lo, t_hi, [chain](double) { return chain; },
                  [model, theta](double t) {
                    PeriodicDeltaModel shifted = model;
                    shifted.alpha[0] += t;
                    return floquet_boundary_pair(shifted, theta);
                  });
  path.with_pair_derivative([dx, m](double) { return PairDerivative{dx, CMatrix::Zero(m, m)}; })
      .with_fixed_potential();
  return path;
}

FamilyPath kp_theta_family(const PeriodicDeltaModel& model, double t_lo, double t_hi) {
  model.validate();
  const MetricGraph chain = kp_chain(model);
  const Index m = chain.boundary_dim();
  const CMatrix perm = kp_permutation(model.p).cast<Complex>();
  FamilyPath path(t_lo, t_hi, [chain](double) { return chain; },
                  [model](double t) { return floquet_boundary_pair(model, t); });
  path.with_pair_derivative([perm, m](double t) {
        const Complex de = Complex(0.0, 1.0) * std::polar(1.0, t);
        CMatrix dx = CMatrix::Zero(m, m), dy = CMatrix::Zero(m, m);
        dx(0, 0) = -de;
        dy(1, 0) = de;
        return PairDerivative{dx * perm, dy * perm};
      })
      .with_fixed_potential();
  return path;
}

GapExperiment gap_opening_experiment(const PeriodicDeltaModel& model, int gap, double t_probe,
                                     const BandOptions& opts, double slope_tol) {
  model.validate();
  if (gap < 1) throw Error(ErrorKind::ConfigError, "gap index is 1-based");
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (double a : model.alpha) s += std::abs(a);
  double hi = std::pow((gap + 2) * pi / model.p, 2) + 4.0 * s + 1.0;
  BandStructure bs = band_structure(model, hi, opts);
  for (int tries = 0; static_cast<int>(bs.bands.size()) < gap + 1 && tries < 6; ++tries) {
    hi *= 2.0;
    bs = band_structure(model, hi, opts);
  }
  if (static_cast<int>(bs.bands.size()) < gap + 1) throw Error(ErrorKind::NoConvergence, "gap not in window");
  const Gap& g = bs.gaps[static_cast<size_t>(gap - 1)];
  if (!g.closed)
    throw Error(ErrorKind::NotDegenerate, "gap " + std::to_string(gap) + " is already open (width " +
                                              std::to_string(g.width) + ")");
  GapExperiment ex;
  ex.gap = gap;
  ex.theta = gap % 2 == 1 ? pi : 0.0;
  ex.level = 0.5 * (g.lo + g.hi);
  const FamilyPath path = alpha0_family(model, ex.theta);
  const EigenResult eig = eigenfunctions(path.graph(0.0), path.pair(0.0), ex.level, opts.spectral);
  if (eig.multiplicity != 2)
    throw Error(ErrorKind::NotDegenerate, "closed gap level has multiplicity " + std::to_string(eig.multiplicity));
  ex.level = eig.lambda;
  const SlopeReport rep = hadamard_slopes(path, 0.0, eig);
  ex.slopes = rep.slopes;
  ex.site_values.resize(2);
  for (int j = 0; j < 2; ++j) ex.site_values(j) = rep.adapted[static_cast<size_t>(j)].value(0, 0.5);
  const double ds = std::abs(ex.slopes(1) - ex.slopes(0));
  ex.opened = ds > slope_tol;
  ex.t_probe = t_probe;
  ex.predicted = 0.5 * ds * t_probe;
  PeriodicDeltaModel shifted = model;
  shifted.alpha[0] += t_probe;
  const BandStructure bs2 = band_structure(shifted, hi, opts);
  if (static_cast<int>(bs2.gaps.size()) < gap) throw Error(ErrorKind::NoConvergence, "perturbed gap left window");
  ex.width = bs2.gaps[static_cast<size_t>(gap - 1)].width;
  return ex;
}

double theta_slope(const PeriodicDeltaModel& model, double theta0, int j, const SpectralOptions& opts) {
  model.validate();
  if (j < 1) throw Error(ErrorKind::ConfigError, "branch index is 1-based");
  if (std::abs(std::sin(theta0)) < 1e-8)
    throw Error(ErrorKind::AtBandEdge, "theta0 is a periodic or antiperiodic point");
  const double lo = lower_bound(model);
  double s = 0.0;
  for (double a : model.alpha) s += std::abs(a);
  double hi = std::pow((j + 1) * std::numbers::pi / model.p, 2) + 4.0 * s + 1.0;
  const PeriodicDeltaModel& m = model;
  std::vector<EigenResult> ev = floquet_eigenvalues(m, theta0, lo, hi, opts);
  for (int tries = 0; static_cast<int>(expanded(ev).size()) < j && tries < 6; ++tries) {
    hi *= 2.0;
    ev = floquet_eigenvalues(m, theta0, lo, hi, opts);
  }
  int seen = 0;
  for (const EigenResult& e : ev) {
    if (seen + e.multiplicity < j) {
      seen += e.multiplicity;
      continue;
    }
    if (e.multiplicity != 1) throw Error(ErrorKind::AtBandEdge, "degenerate Floquet eigenvalue at theta0");
    const double slope = hadamard_slopes(kp_theta_family(model), theta0, e).slopes(0);
    if (std::abs(slope) < 1e-10 * std::max(1.0, std::abs(e.lambda)))
      throw Error(ErrorKind::AtBandEdge, "vanishing dispersion slope");
    return slope;
  }
  throw Error(ErrorKind::NoConvergence, "branch not found");
}

}  // namespace qgraph
