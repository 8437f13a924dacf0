#include "qgraph/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace qgraph {

FamilyPath::FamilyPath(double t_lo, double t_hi, GraphMap graph, PairMap pair)
    : t_lo_(t_lo), t_hi_(t_hi), graph_(std::move(graph)), pair_(std::move(pair)) {
  if (!(t_lo < t_hi)) throw Error(ErrorKind::DimensionMismatch, "family domain must satisfy t_lo < t_hi");
}

FamilyPath& FamilyPath::with_pair_derivative(PairDerivMap d) {
  dpair_ = std::move(d);
  return *this;
}

FamilyPath& FamilyPath::with_potential_derivative(PotDerivMap d) {
  dpot_ = std::move(d);
  return *this;
}

FamilyPath& FamilyPath::with_fixed_potential() {
  dpot_ = [](double) { return std::vector<Potential>{}; };
  return *this;
}

FamilyPath& FamilyPath::with_fd_step(double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::DimensionMismatch, "fd step must be positive");
  fd_step_ = h;
  return *this;
}

PairDerivative FamilyPath::pair_derivative(double t) const {
  if (dpair_) return dpair_(t);
  const BoundaryPair p = pair_(t + fd_step_), m = pair_(t - fd_step_);
  return {(p.x() - m.x()) / (2.0 * fd_step_), (p.y() - m.y()) / (2.0 * fd_step_)};
}

std::vector<Potential> FamilyPath::potential_derivative(double t) const {
  if (dpot_) return dpot_(t);
  const MetricGraph gp = graph_(t + fd_step_), gm = graph_(t - fd_step_);
  std::vector<Potential> out;
  bool any = false;
  for (Index e = 0; e < gp.edge_count(); ++e) {
    const Potential& a = gp.edge(e).potential;
    const Potential& b = gm.edge(e).potential;
    if (a.kind() == Potential::Kind::Constant && b.kind() == Potential::Kind::Constant) {
      const double d = (a(0.0) - b(0.0)) / (2.0 * fd_step_);
      out.push_back(Potential::constant(d));
      any = any || d != 0.0;
      continue;
    }
    out.push_back(add_scaled(a, b, -1.0));
    const Potential diff = out.back();
    const double h = fd_step_;
    std::vector<double> hints = diff.breakpoints();
    out.back() = Potential::sampled([diff, h](double x) { return diff(x) / (2.0 * h); }, hints);
    any = true;
  }
  if (!any) out.clear();
  return out;
}

Potential add_scaled(const Potential& a, const Potential& b, double s) {
  std::vector<double> br = a.breakpoints();
  br.insert(br.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  if (a.kind() != Potential::Kind::Sampled && b.kind() != Potential::Kind::Sampled) {
    std::vector<double> vals;
    for (size_t i = 0; i <= br.size(); ++i) {
      double x;
      if (br.empty())
        x = 0.0;
      else if (i == 0)
        x = br[0] - 1.0;
      else if (i == br.size())
        x = br.back() + 1.0;
      else
        x = 0.5 * (br[i - 1] + br[i]);
      vals.push_back(a(x) + s * b(x));
    }
    return Potential::piecewise_constant(br, vals);
  }
  return Potential::sampled([a, b, s](double x) { return a(x) + s * b(x); }, br);
}

FamilyPath robin_homotopy_family(const MetricGraph& graph) {
  FamilyPath path(0.0, 1.0, [graph](double) { return graph; },
                  [graph](double t) { return robin_homotopy_pair(graph, t); });
  path.with_pair_derivative([graph](double t) { return robin_homotopy_derivative(graph, t); }).with_fixed_potential();
  return path;
}

FamilyPath delta_star_family(const std::vector<double>& lengths, const std::vector<Potential>& potentials,
                             const BoundaryPair& outer, double t_lo, double t_hi) {
  const auto [graph, star] = build_star(lengths, potentials);
  FamilyPath path(t_lo, t_hi, [graph](double) { return graph; },
                  [graph, star, outer](double t) { return delta_conditions(graph, star, t, outer); });
  path.with_pair_derivative([graph, star](double) { return delta_conditions_derivative(graph, star); })
      .with_fixed_potential();
  return path;
}

FamilyPath robin_matrix_family(const MetricGraph& graph, const CMatrix& theta0, const CMatrix& theta1) {
  const Index m = graph.boundary_dim();
  if (theta0.rows() != m || theta1.rows() != m) throw Error(ErrorKind::DimensionMismatch, "Theta size");
  const CMatrix dt = theta1 - theta0;
  FamilyPath path(0.0, 1.0, [graph](double) { return graph; },
                  [theta0, dt](double t) { return robin_pair(CMatrix(theta0 + t * dt)); });
  path.with_pair_derivative([dt, m](double) { return PairDerivative{dt, CMatrix::Zero(m, m)}; })
      .with_fixed_potential();
  return path;
}

FamilyPath potential_family(const MetricGraph& graph, const BoundaryPair& pair, const std::vector<Potential>& w,
                            double t_lo, double t_hi) {
  if (static_cast<Index>(w.size()) != graph.edge_count())
    throw Error(ErrorKind::DimensionMismatch, "one potential direction per edge");
  FamilyPath path(
      t_lo, t_hi,
      [graph, w](double t) {
        std::vector<Edge> edges = graph.edges();
        for (size_t e = 0; e < edges.size(); ++e) edges[e].potential = add_scaled(edges[e].potential, w[e], t);
        return MetricGraph(edges);
      },
      [pair](double) { return pair; });
  const Index m = pair.dim();
  path.with_pair_derivative([m](double) { return PairDerivative{CMatrix::Zero(m, m), CMatrix::Zero(m, m)}; })
      .with_potential_derivative([w](double) { return w; });
  return path;
}

FamilyPath floquet_theta_family(const MetricGraph& interval, double t_lo, double t_hi) {
  if (interval.edge_count() != 1) throw Error(ErrorKind::DimensionMismatch, "Floquet family needs one edge");
  FamilyPath path(t_lo, t_hi, [interval](double) { return interval; }, [](double t) { return floquet_pair(t); });
  path.with_pair_derivative([](double t) { return floquet_derivative(t); }).with_fixed_potential();
  return path;
}

FamilyPath scaling_family(const Potential& v, const Potential::Fn& dv, double t_lo, double t_hi) {
  const bool constant = v.kind() == Potential::Kind::Constant;
  const double c = constant ? v(0.0) : 0.0;
  auto graph_at = [v, constant, c](double t) {
    if (constant) return build_interval(1.0, Potential::constant(t * t * c));
    return build_interval(1.0, Potential::sampled([v, t](double x) { return t * t * v(t * x); }));
  };
  FamilyPath path(t_lo, t_hi, graph_at, [](double) { return dirichlet_pair(2); });
  path.with_pair_derivative([](double) { return PairDerivative{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)}; })
      .with_potential_derivative([v, dv, constant, c](double t) {
        if (constant) return std::vector<Potential>{Potential::constant(2.0 * t * c)};
        return std::vector<Potential>{
            Potential::sampled([v, dv, t](double x) { return 2.0 * t * v(t * x) + t * t * x * dv(t * x); })};
      });
  return path;
}

SlopeMatrix slope_matrix(const FamilyPath& path, double t0, const EigenResult& eig) {
  const BoundaryPair pr = path.pair(t0);
  const PairDerivative d = path.pair_derivative(t0);
  const std::vector<Potential> vd = path.potential_derivative(t0);
  const Index mult = eig.multiplicity;
  const Index m = pr.dim();
  CMatrix tr(2 * m, mult);
  for (Index k = 0; k < mult; ++k) tr.col(k) = eig.traces[static_cast<size_t>(k)].stacked();
  SlopeMatrix out;
  out.phi = weight_w(pr) * tr;
  out.b = out.phi.adjoint() * boundary_slope_form(pr, d.dx, d.dy) * out.phi;
  if (!vd.empty()) {
    for (Index j = 0; j < mult; ++j)
      for (Index k = 0; k < mult; ++k)
        out.b(j, k) += inner_weighted(eig.eigenfunctions[static_cast<size_t>(k)],
                                      eig.eigenfunctions[static_cast<size_t>(j)], vd);
  }
  out.b = (out.b + out.b.adjoint()) / 2.0;
  out.basis = eig;
  return out;
}

SlopeMatrix slope_matrix(const FamilyPath& path, double t0, double lambda, const SpectralOptions& opts) {
  return slope_matrix(path, t0, eigenfunctions(path.graph(t0), path.pair(t0), lambda, opts));
}

SlopeReport hadamard_slopes(const FamilyPath& path, double t0, const EigenResult& eig) {
  const SlopeMatrix sm = slope_matrix(path, t0, eig);
  const auto he = herm_eig(sm.b);
  SlopeReport rep;
  rep.t0 = t0;
  rep.lambda = eig.lambda;
  rep.multiplicity = eig.multiplicity;
  rep.slopes = he.values;
  CMatrix u = he.vectors;
  CMatrix phi = sm.phi * u;
  for (Index j = 0; j < phi.cols(); ++j) {
    const double nrm = phi.col(j).norm();
    for (Index i = 0; i < phi.rows(); ++i) {
      if (std::abs(phi(i, j)) > 1e-8 * nrm) {
        const Complex ph = std::conj(phi(i, j)) / std::abs(phi(i, j));
        phi.col(j) *= ph;
        u.col(j) *= ph;
        break;
      }
    }
  }
  rep.phi = phi;
  rep.coefficients = eig.coefficients * u;
  for (Index j = 0; j < u.cols(); ++j) {
    rep.adapted.push_back(combine(eig.eigenfunctions, u.col(j)));
    CVector t = CVector::Zero(eig.traces.front().stacked().size());
    for (Index k = 0; k < u.rows(); ++k) t += u(k, j) * eig.traces[static_cast<size_t>(k)].stacked();
    rep.traces.push_back(TraceVector::from_stacked(t));
  }
  return rep;
}

SlopeReport hadamard_slopes(const FamilyPath& path, double t0, double lambda, const SpectralOptions& opts) {
  return hadamard_slopes(path, t0, eigenfunctions(path.graph(t0), path.pair(t0), lambda, opts));
}

CrossingRecord crossing_form(const FamilyPath& path, double t0, double lambda0, const SpectralOptions& opts,
                             double degeneracy) {
  const SlopeReport rep = hadamard_slopes(path, t0, lambda0, opts);
  CrossingRecord rec;
  rec.t0 = t0;
  rec.lambda0 = lambda0;
  rec.values = rep.slopes;
  const double thr = degeneracy * std::max(1.0, std::abs(lambda0));
  for (Index i = 0; i < rec.values.size(); ++i) {
    if (std::abs(rec.values(i)) < thr)
      ++rec.n_zero;
    else if (rec.values(i) > 0.0)
      ++rec.n_plus;
    else
      ++rec.n_minus;
  }
  return rec;
}

namespace {

struct Level {
  double lambda;
  double slope;
};

struct Sample {
  double t;
  std::vector<Level> levels;
};

Sample sample_levels(const FamilyPath& path, double t, double lo, double hi, const SpectralOptions& opts) {
  Sample s{t, {}};
  const MetricGraph g = path.graph(t);
  const BoundaryPair p = path.pair(t);
  for (const EigenResult& e : eigenvalues(g, p, lo, hi, opts)) {
    const SlopeReport rep = hadamard_slopes(path, t, e);
    for (Index j = 0; j < rep.slopes.size(); ++j) s.levels.push_back({e.lambda, rep.slopes(j)});
  }
  return s;
}

double gap_of(const std::vector<Level>& lv, size_t j) {
  double g = std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, std::abs(lv[j].lambda));
  for (size_t k = 0; k < lv.size(); ++k) {
    const double d = std::abs(lv[k].lambda - lv[j].lambda);
    if (k != j && d > 1e-8 * scale) g = std::min(g, d);
  }
  return g;
}

// Index in b for every level of a (-1: left the window); empty optional when ambiguous.
std::optional<std::vector<int>> match(const Sample& a, const Sample& b, double lo, double hi) {
  const double dt = b.t - a.t;
  struct Cand {
    double cost;
    size_t i, j;
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < a.levels.size(); ++i) {
    const double p = a.levels[i].lambda + a.levels[i].slope * dt;
    const double ga = gap_of(a.levels, i);
    for (size_t j = 0; j < b.levels.size(); ++j) {
      const double err = std::abs(p - b.levels[j].lambda);
      const double scale = std::max(1.0, std::abs(b.levels[j].lambda));
      const double gate = std::max(0.5 * std::min(ga, gap_of(b.levels, j)), 1e-9 * scale);
      if (err >= gate) continue;
      cands.push_back({err + std::abs(a.levels[i].slope - b.levels[j].slope) * std::abs(dt), i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.cost < y.cost || (x.cost == y.cost && (x.i < y.i || (x.i == y.i && x.j < y.j)));
  });
  std::vector<int> ma(a.levels.size(), -1), mb(b.levels.size(), -1);
  for (const Cand& c : cands) {
    if (ma[c.i] >= 0 || mb[c.j] >= 0) continue;
    ma[c.i] = static_cast<int>(c.j);
    mb[c.j] = static_cast<int>(c.i);
  }
  auto near_edge = [&](double x, double slope) {
    const double margin = 2.0 * std::abs(slope * dt) + 1e-6 * std::max(1.0, std::abs(x));
    return x < lo + margin || x > hi - margin;
  };
  for (size_t i = 0; i < ma.size(); ++i)
    if (ma[i] < 0 && !near_edge(a.levels[i].lambda + a.levels[i].slope * dt, a.levels[i].slope)) return std::nullopt;
  for (size_t j = 0; j < mb.size(); ++j)
    if (mb[j] < 0 && !near_edge(b.levels[j].lambda - b.levels[j].slope * dt, b.levels[j].slope)) return std::nullopt;
  return ma;
}

void refine(const FamilyPath& path, const Sample& a, const Sample& b, double lo, double hi, const TrackOptions& opts,
            int depth, std::vector<Sample>& samples, std::vector<std::vector<int>>& links) {
  if (auto m = match(a, b, lo, hi)) {
    links.push_back(*m);
    samples.push_back(b);
    return;
  }
  if (depth >= opts.max_depth)
    throw Error(ErrorKind::BranchAmbiguity, "branch matching ambiguous at t = " + std::to_string(a.t));
  const Sample mid = sample_levels(path, 0.5 * (a.t + b.t), lo, hi, opts.spectral);
  refine(path, a, mid, lo, hi, opts, depth + 1, samples, links);
  refine(path, mid, b, lo, hi, opts, depth + 1, samples, links);
}

struct Tracked {
  std::vector<Sample> samples;
  std::vector<std::vector<int>> links;
  std::vector<Branch> branches;
};

Tracked track(const FamilyPath& path, double lo, double hi, const std::vector<double>& t_grid,
              const TrackOptions& opts) {
  if (t_grid.size() < 2) throw Error(ErrorKind::DimensionMismatch, "t grid needs two points");
  Tracked tr;
  tr.samples.push_back(sample_levels(path, t_grid[0], lo, hi, opts.spectral));
  for (size_t k = 1; k < t_grid.size(); ++k) {
    const Sample next = sample_levels(path, t_grid[k], lo, hi, opts.spectral);
    const Sample prev = tr.samples.back();
    refine(path, prev, next, lo, hi, opts, 0, tr.samples, tr.links);
  }
  // assemble branches
  std::vector<int> ids;
  int next_id = 0;
  auto push = [&](int id, const Sample& s, const Level& l) {
    if (id >= static_cast<int>(tr.branches.size())) tr.branches.resize(static_cast<size_t>(id) + 1);
    Branch& br = tr.branches[static_cast<size_t>(id)];
    br.id = id;
    br.t.push_back(s.t);
    br.lambda.push_back(l.lambda);
    br.slope.push_back(l.slope);
  };
  for (const Level& l : tr.samples[0].levels) {
    ids.push_back(next_id);
    push(next_id++, tr.samples[0], l);
  }
  for (size_t k = 0; k < tr.links.size(); ++k) {
    const Sample& b = tr.samples[k + 1];
    std::vector<int> nids(b.levels.size(), -1);
    for (size_t i = 0; i < tr.links[k].size(); ++i)
      if (tr.links[k][i] >= 0) nids[static_cast<size_t>(tr.links[k][i])] = ids[i];
    for (size_t j = 0; j < nids.size(); ++j) {
      if (nids[j] < 0) nids[j] = next_id++;
      push(nids[j], b, b.levels[j]);
    }
    ids = nids;
  }
  return tr;
}

}  // namespace

std::vector<Branch> track_curves(const FamilyPath& path, double lo, double hi, const std::vector<double>& t_grid,
                                 const TrackOptions& opts) {
  return track(path, lo, hi, t_grid, opts).branches;
}

FlowReport spectral_flow(const FamilyPath& path, double lambda0, const FlowOptions& opts) {
  FlowReport rep;
  rep.lambda0 = lambda0;
  const double w = opts.half_window > 0.0 ? opts.half_window : std::max(5.0, 0.5 * std::abs(lambda0));
  std::vector<double> grid;
  for (int i = 0; i < opts.t_points; ++i)
    grid.push_back(path.t_lo() + (path.t_hi() - path.t_lo()) * i / (opts.t_points - 1));
  const Tracked tr = track(path, lambda0 - w, lambda0 + w, grid, opts.track);
  rep.branches = tr.branches;
  int flow = 0;
  for (size_t k = 0; k < tr.links.size(); ++k) {
    const Sample& a = tr.samples[k];
    const Sample& b = tr.samples[k + 1];
    for (size_t i = 0; i < tr.links[k].size(); ++i) {
      const int j = tr.links[k][i];
      if (j < 0) continue;
      const int below_a = a.levels[i].lambda < lambda0 ? 1 : 0;
      const int below_b = b.levels[static_cast<size_t>(j)].lambda < lambda0 ? 1 : 0;
      flow += below_a - below_b;
    }
  }
  rep.spectral_flow = flow;

  // Maslov index from crossing forms
  const SpectralOptions& sopts = opts.track.spectral;
  auto sigma = [&](double t) { return secular_sigma(path.graph(t), path.pair(t), lambda0, sopts.ode_tol)(0); };
  const int n = std::max(3, opts.scan_points);
  const double t0 = path.t_lo(), t1 = path.t_hi();
  std::vector<double> ts, sg;
  for (int i = 0; i < n; ++i) {
    ts.push_back(t0 + (t1 - t0) * i / (n - 1));
    sg.push_back(sigma(ts.back()));
  }
  const double end_tol = 1e-10 * (t1 - t0);
  std::vector<double> hits;
  if (sg.front() <= opts.crossing_tol) hits.push_back(t0);
  if (sg.back() <= opts.crossing_tol) hits.push_back(t1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(sg[i] <= sg[i - 1] && sg[i] <= sg[i + 1])) continue;
    double a = ts[i - 1], b = ts[i + 1];
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sigma(c), fd = sigma(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      if (fc <= fd) {
        b = d; d = c; fd = fc; c = b - gr * (b - a); fc = sigma(c);
      } else {
        a = c; c = d; fc = fd; d = a + gr * (b - a); fd = sigma(d);
      }
    }
    const double tstar = fc <= fd ? c : d;
    if (std::min(fc, fd) > opts.crossing_tol) continue;
    double snapped = tstar;
    if (tstar - t0 < end_tol) snapped = t0;
    if (t1 - tstar < end_tol) snapped = t1;
    bool dup = false;
    for (double h : hits) dup = dup || std::abs(h - snapped) < 1e-9 * (t1 - t0);
    if (!dup) hits.push_back(snapped);
  }
  std::sort(hits.begin(), hits.end());
  int mas = 0;
  for (double th : hits) {
    CrossingRecord rec = crossing_form(path, th, lambda0, sopts, opts.degeneracy);
    rep.crossings.push_back(rec);
    if (rec.n_zero > 0)
      throw Error(ErrorKind::DegenerateCrossing, "degenerate crossing at t = " + std::to_string(th));
    if (th == t0)
      mas -= rec.n_minus;
    else if (th == t1)
      mas += rec.n_plus;
    else
      mas += rec.n_plus - rec.n_minus;
  }
  rep.maslov_index = mas;
  rep.agree = rep.maslov_index == rep.spectral_flow;
  return rep;
}

Complex riccati_residual(const FamilyPath& path, double t0, Complex zeta, const GraphFunction& f,
                         const GraphFunction& g, double h, const SpectralOptions& opts) {
  try {
    const GraphFunction up = resolvent_apply(path.graph(t0 + h), path.pair(t0 + h), zeta, f, opts);
    const GraphFunction um = resolvent_apply(path.graph(t0 - h), path.pair(t0 - h), zeta, f, opts);
    const Complex fd = (inner(up, g) - inner(um, g)) / (2.0 * h);

    const MetricGraph graph = path.graph(t0);
    const BoundaryPair pr = path.pair(t0);
    const GraphFunction u = resolvent_apply(graph, pr, zeta, f, opts);
    const GraphFunction v = resolvent_apply(graph, pr, std::conj(zeta), g, opts);
    Complex formula = 0.0;
    const std::vector<Potential> vd = path.potential_derivative(t0);
    if (!vd.empty()) formula -= inner_weighted(u, v, vd);
    const PairDerivative d = path.pair_derivative(t0);
    const CMatrix w = weight_w(pr);
    const CMatrix mid = d.dx * pr.y().adjoint() - d.dy * pr.x().adjoint();
    formula += v.traces().stacked().dot(w.adjoint() * mid * w * u.traces().stacked());
    return fd - formula;
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::ZetaInSpectrum) throw Error(ErrorKind::SpectrumHit, err.what());
    throw;
  }
}

std::vector<ScalingRow> scaling_slopes(const Potential& v, const Potential::Fn& dv, int j_max,
                                       const SpectralOptions& opts) {
  const FamilyPath path = scaling_family(v, dv);
  const MetricGraph g = path.graph(1.0);
  const BoundaryPair p = path.pair(1.0);
  const double vmax = g.max_abs_potential();
  const double hi = std::pow((j_max + 0.5) * std::numbers::pi, 2) + vmax;
  const std::vector<EigenResult> ev = eigenvalues(g, p, g.min_potential() - 1.0, hi, opts);
  if (static_cast<int>(ev.size()) < j_max) throw Error(ErrorKind::NoConvergence, "too few Dirichlet eigenvalues");
  std::vector<ScalingRow> rows;
  for (int j = 0; j < j_max; ++j) {
    const EigenResult& e = ev[static_cast<size_t>(j)];
    const SlopeReport rep = hadamard_slopes(path, 1.0, e);
    ScalingRow row;
    row.j = j + 1;
    row.lambda = e.lambda;
    row.lambda_dot = rep.slopes(0);
    row.mu_dot = row.lambda_dot - 2.0 * e.lambda;
    const Complex du1 = -e.traces[0].gamma1(1);
    row.rellich = -std::norm(du1);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qgraph
