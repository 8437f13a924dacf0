#include "qgraph/run.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace qgraph {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

// json value plus its location, for field-level diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const { config_error("at " + where() + ": " + msg); }
  std::string where() const { return path_.empty() ? "/" : path_; }

  bool has(const std::string& k) const { return j_->is_object() && j_->contains(k); }
  Node at(const std::string& k) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(k)) fail("missing field '" + k + "'");
    return Node(j_->at(k), path_ + "/" + k);
  }
  Node at(size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    if (i >= j_->size()) fail("index " + std::to_string(i) + " out of range");
    return Node((*j_)[i], path_ + "/" + std::to_string(i));
  }
  size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  bool is_number() const { return j_->is_number(); }
  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }

  double num() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double num(const std::string& k, double def) const { return has(k) ? at(k).num() : def; }
  double positive(const std::string& k, double def) const {
    const double v = num(k, def);
    if (!(v > 0.0)) at(k).fail("must be positive");
    return v;
  }
  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }
  long long integer(const std::string& k, long long def) const { return has(k) ? at(k).integer() : def; }
  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const Node n = at(k);
    if (!n.j_->is_boolean()) n.fail("expected true or false");
    return n.j_->get<bool>();
  }
  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Complex complex() const {
    if (j_->is_number()) return num();
    if (j_->is_array() && j_->size() == 2) return {at(0).num(), at(1).num()};
    fail("expected a number or an [re, im] pair");
  }
  std::vector<double> nums() const {
    std::vector<double> out;
    for (size_t i = 0; i < size(); ++i) out.push_back(at(i).num());
    return out;
  }
  std::pair<double, double> window(const std::string& k) const {
    const Node w = at(k);
    if (w.size() != 2) w.fail("expected [lo, hi]");
    const double lo = w.at(0).num(), hi = w.at(1).num();
    if (!(lo < hi)) w.fail("window must satisfy lo < hi");
    return {lo, hi};
  }
  void allow(const std::vector<std::string>& keys) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [k, v] : j_->items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail("unknown field '" + k + "'");
  }

 private:
  const json* j_;
  std::string path_;
};

struct PotentialSpec {
  Potential v;
  Potential::Fn dv;
};

PotentialSpec parse_potential(const Node& n) {
  if (n.is_number()) {
    const double c = n.num();
    return {Potential::constant(c), [](double) { return 0.0; }};
  }
  const std::string kind = n.at("kind").str();
  if (kind == "constant") {
    n.allow({"kind", "value"});
    const double c = n.at("value").num();
    return {Potential::constant(c), [](double) { return 0.0; }};
  }
  if (kind == "piecewise") {
    n.allow({"kind", "breaks", "values"});
    const std::vector<double> br = n.at("breaks").nums(), vals = n.at("values").nums();
    if (vals.size() != br.size() + 1) n.fail("piecewise potential needs one more value than breaks");
    for (size_t i = 1; i < br.size(); ++i)
      if (!(br[i - 1] < br[i])) n.at("breaks").fail("breaks must be strictly ascending");
    return {Potential::piecewise_constant(br, vals), [](double) { return 0.0; }};
  }
  if (kind == "polynomial") {
    n.allow({"kind", "coefficients"});
    const std::vector<double> c = n.at("coefficients").nums();
    if (c.empty()) n.at("coefficients").fail("needs at least one coefficient");
    if (c.size() == 1) return {Potential::constant(c[0]), [](double) { return 0.0; }};
    auto value = [c](double x) {
      double s = 0.0;
      for (size_t i = c.size(); i-- > 0;) s = s * x + c[i];
      return s;
    };
    auto deriv = [c](double x) {
      double s = 0.0;
      for (size_t i = c.size(); i-- > 1;) s = s * x + static_cast<double>(i) * c[i];
      return s;
    };
    return {Potential::sampled(value), deriv};
  }
  n.at("kind").fail("unknown potential kind '" + kind + "' (constant, piecewise, polynomial)");
}

struct ParsedGraph {
  MetricGraph graph;
  std::optional<StarMap> star;
};

std::vector<Potential> parse_potentials(const Node& n, size_t count) {
  std::vector<Potential> out;
  if (n.size() != count) n.fail("expected " + std::to_string(count) + " potentials");
  for (size_t i = 0; i < count; ++i) out.push_back(parse_potential(n.at(i)).v);
  return out;
}

ParsedGraph parse_graph(const Node& n) {
  if (n.has("builder")) {
    const std::string b = n.at("builder").str();
    if (b == "interval") {
      n.allow({"builder", "length", "potential"});
      const double len = n.positive("length", 1.0);
      const Potential v = n.has("potential") ? parse_potential(n.at("potential")).v : Potential::constant(0.0);
      return {build_interval(len, v), std::nullopt};
    }
    if (b == "star") {
      n.allow({"builder", "lengths", "potentials"});
      const std::vector<double> lengths = n.at("lengths").nums();
      std::vector<Potential> pots;
      if (n.has("potentials")) pots = parse_potentials(n.at("potentials"), lengths.size());
      auto [g, star] = build_star(lengths, pots);
      return {g, star};
    }
    n.at("builder").fail("unknown graph builder '" + b + "' (interval, star)");
  }
  n.allow({"edges"});
  const Node es = n.at("edges");
  std::vector<Edge> edges;
  for (size_t i = 0; i < es.size(); ++i) {
    const Node e = es.at(i);
    e.allow({"id", "length", "potential"});
    Edge edge;
    edge.id = e.has("id") ? e.at("id").str() : "e" + std::to_string(i);
    edge.length = e.at("length").num();
    if (e.has("potential")) edge.potential = parse_potential(e.at("potential")).v;
    edges.push_back(edge);
  }
  return {MetricGraph(edges), std::nullopt};
}

CMatrix parse_matrix(const Node& n, Index rows, Index cols) {
  if (static_cast<Index>(n.size()) != rows) n.fail("expected " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Node r = n.at(static_cast<size_t>(i));
    if (static_cast<Index>(r.size()) != cols) r.fail("expected " + std::to_string(cols) + " entries");
    for (Index j = 0; j < cols; ++j) m(i, j) = r.at(static_cast<size_t>(j)).complex();
  }
  return m;
}

BoundaryPair parse_conditions(const Node& n, const ParsedGraph& pg, Index dim = -1) {
  const Index m = dim >= 0 ? dim : pg.graph.boundary_dim();
  if (n.has("builder")) {
    const std::string b = n.at("builder").str();
    if (b == "dirichlet") return dirichlet_pair(m);
    if (b == "neumann") return neumann_pair(m);
    if (b == "robin") {
      n.allow({"builder", "theta"});
      return robin_pair(parse_matrix(n.at("theta"), m, m));
    }
    if (b == "robin_homotopy") {
      n.allow({"builder", "t"});
      return robin_homotopy_pair(pg.graph, n.at("t").num());
    }
    if (b == "floquet") {
      n.allow({"builder", "theta"});
      if (m != 2) n.fail("floquet conditions need a single edge");
      return floquet_pair(n.at("theta").num());
    }
    if (b == "delta") {
      n.allow({"builder", "strength", "outer"});
      if (!pg.star) n.fail("delta conditions need a star graph");
      const Index leaves = static_cast<Index>(pg.star->leaves.size());
      const BoundaryPair outer =
          n.has("outer") ? parse_conditions(n.at("outer"), pg, leaves) : dirichlet_pair(leaves);
      return delta_conditions(pg.graph, *pg.star, n.num("strength", 0.0), outer);
    }
    n.at("builder").fail("unknown condition builder '" + b + "'");
  }
  n.allow({"x", "y"});
  return validate_pair(parse_matrix(n.at("x"), m, m), parse_matrix(n.at("y"), m, m));
}

PeriodicDeltaModel parse_kp(const Node& n) {
  n.allow({"p", "alpha"});
  PeriodicDeltaModel model;
  const long long p = n.integer("p", 1);
  if (p < 1) n.at("p").fail("period must be >= 1");
  model.p = static_cast<int>(p);
  model.alpha = n.has("alpha") ? n.at("alpha").nums() : std::vector<double>(static_cast<size_t>(p), 0.0);
  if (static_cast<long long>(model.alpha.size()) != p) n.at("alpha").fail("expected p entries");
  return model;
}

std::pair<double, double> t_range(const Node& n, double lo, double hi) {
  if (!n.has("t_range")) return {lo, hi};
  return n.window("t_range");
}

FamilyPath parse_family(const Node& n) {
  const std::string kind = n.at("kind").str();
  if (kind == "robin_homotopy") {
    n.allow({"kind", "graph"});
    return robin_homotopy_family(parse_graph(n.at("graph")).graph);
  }
  if (kind == "delta_star") {
    n.allow({"kind", "lengths", "potentials", "outer", "t_range"});
    const std::vector<double> lengths = n.at("lengths").nums();
    std::vector<Potential> pots;
    if (n.has("potentials")) pots = parse_potentials(n.at("potentials"), lengths.size());
    const Index leaves = static_cast<Index>(lengths.size());
    ParsedGraph dummy{build_star(lengths, pots).first, std::nullopt};
    const BoundaryPair outer = n.has("outer") ? parse_conditions(n.at("outer"), dummy, leaves) : dirichlet_pair(leaves);
    const auto [lo, hi] = t_range(n, 0.0, 1.0);
    return delta_star_family(lengths, pots, outer, lo, hi);
  }
  if (kind == "robin_matrix") {
    n.allow({"kind", "graph", "theta0", "theta1"});
    const MetricGraph g = parse_graph(n.at("graph")).graph;
    const Index m = g.boundary_dim();
    return robin_matrix_family(g, parse_matrix(n.at("theta0"), m, m), parse_matrix(n.at("theta1"), m, m));
  }
  if (kind == "potential") {
    n.allow({"kind", "graph", "conditions", "direction", "t_range"});
    const ParsedGraph pg = parse_graph(n.at("graph"));
    const BoundaryPair pair = parse_conditions(n.at("conditions"), pg);
    const std::vector<Potential> w = parse_potentials(n.at("direction"), static_cast<size_t>(pg.graph.edge_count()));
    const auto [lo, hi] = t_range(n, 0.0, 1.0);
    return potential_family(pg.graph, pair, w, lo, hi);
  }
  if (kind == "floquet_theta") {
    n.allow({"kind", "graph", "t_range"});
    const MetricGraph g = parse_graph(n.at("graph")).graph;
    if (g.edge_count() != 1) n.at("graph").fail("floquet family needs a single edge");
    const auto [lo, hi] = t_range(n, 0.0, 2.0 * std::numbers::pi);
    return floquet_theta_family(g, lo, hi);
  }
  if (kind == "kp_alpha0") {
    n.allow({"kind", "kronig_penney", "theta", "t_range"});
    const auto [lo, hi] = t_range(n, -1.0, 1.0);
    return alpha0_family(parse_kp(n.at("kronig_penney")), n.num("theta", 0.0), lo, hi);
  }
  if (kind == "kp_theta") {
    n.allow({"kind", "kronig_penney", "t_range"});
    const auto [lo, hi] = t_range(n, 0.0, 2.0 * std::numbers::pi);
    return kp_theta_family(parse_kp(n.at("kronig_penney")), lo, hi);
  }
  n.at("kind").fail("unknown family kind '" + kind + "'");
}

SpectralOptions spectral_options(const RunConfig& cfg, const Node& opt) {
  SpectralOptions s;
  if (cfg.tol) s.tol = *cfg.tol;
  s.tol = opt.positive("tol", s.tol);
  s.ode_tol = opt.positive("ode_tol", s.ode_tol);
  s.scan_density = opt.positive("scan_density", s.scan_density);
  s.certify = opt.boolean("certify", s.certify);
  return s;
}

void allow_options(const Node& opt, std::vector<std::string> keys) {
  for (const char* k : {"tol", "ode_tol", "scan_density", "certify"}) keys.emplace_back(k);
  opt.allow(keys);
}

GraphFunction random_function(const MetricGraph& graph, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<Complex, 6>> coef(static_cast<size_t>(graph.edge_count()));
  for (auto& c : coef)
    for (auto& z : c) z = Complex(u(rng), u(rng));
  return GraphFunction::sample(make_plan(graph, 8.0), [coef, graph](Index e, double x) {
    const auto& c = coef[static_cast<size_t>(e)];
    const double s = std::numbers::pi * x / graph.edge(e).length;
    Complex v = 0.0;
    for (int k = 0; k < 3; ++k) v += c[2 * k] * std::cos(k * s) + c[2 * k + 1] * std::sin((k + 1) * s);
    return v;
  });
}

CMatrix random_hermitian(Index m, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return scale * (a + a.adjoint()) / 2.0;
}

Table task_spectrum(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"graph", "conditions"});
  allow_options(opt, {"window"});
  const ParsedGraph pg = parse_graph(prob.at("graph"));
  const BoundaryPair pair = parse_conditions(prob.at("conditions"), pg);
  const auto [lo, hi] = opt.window("window");
  const auto ev = eigenvalues(pg.graph, pair, lo, hi, spectral_options(cfg, opt));
  Table t;
  t.columns = {"k", "lambda", "multiplicity"};
  long long k = 1;
  for (const EigenResult& e : ev) {
    t.rows.push_back({k, e.lambda, static_cast<long long>(e.multiplicity)});
    k += e.multiplicity;
  }
  t.summary["count"] = k - 1;
  return t;
}

Table task_slopes(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"family"});
  allow_options(opt, {"t0", "lambda"});
  const FamilyPath path = parse_family(prob.at("family"));
  const double t0 = opt.at("t0").num();
  const double lambda = opt.at("lambda").num();
  const SlopeReport rep = hadamard_slopes(path, t0, lambda, spectral_options(cfg, opt));
  Table t;
  t.columns = {"j", "lambda", "slope"};
  for (Index j = 0; j < rep.slopes.size(); ++j)
    t.rows.push_back({static_cast<long long>(j + 1), rep.lambda, rep.slopes(j)});
  t.summary["t0"] = t0;
  t.summary["lambda"] = rep.lambda;
  t.summary["multiplicity"] = rep.multiplicity;
  return t;
}

Table task_flow(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"family"});
  allow_options(opt, {"lambda0", "half_window", "t_points", "scan_points", "curves"});
  const FamilyPath path = parse_family(prob.at("family"));
  FlowOptions fo;
  fo.track.spectral = spectral_options(cfg, opt);
  if (!opt.has("certify")) fo.track.spectral.certify = false;
  fo.half_window = opt.num("half_window", 0.0);
  if (fo.half_window < 0.0) opt.at("half_window").fail("must be non-negative");
  fo.t_points = static_cast<int>(opt.integer("t_points", fo.t_points));
  fo.scan_points = static_cast<int>(opt.integer("scan_points", fo.scan_points));
  if (fo.t_points < 2) opt.at("t_points").fail("needs at least 2 points");
  if (fo.scan_points < 3) opt.at("scan_points").fail("needs at least 3 points");
  const double lambda0 = opt.at("lambda0").num();
  const FlowReport rep = spectral_flow(path, lambda0, fo);
  if (opt.has("curves")) emit_curves(rep.branches, opt.at("curves").str());
  Table t;
  t.columns = {"t0", "lambda0", "n_plus", "n_minus"};
  for (const CrossingRecord& c : rep.crossings)
    t.rows.push_back({c.t0, c.lambda0, static_cast<long long>(c.n_plus), static_cast<long long>(c.n_minus)});
  t.summary["lambda0"] = lambda0;
  t.summary["spectral_flow"] = rep.spectral_flow;
  t.summary["maslov_index"] = rep.maslov_index;
  t.summary["agree"] = rep.agree;
  return t;
}

Table task_bands(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"kronig_penney"});
  allow_options(opt, {"hi"});
  const PeriodicDeltaModel model = parse_kp(prob.at("kronig_penney"));
  BandOptions bo;
  bo.spectral = spectral_options(cfg, opt);
  const BandStructure bs = band_structure(model, opt.at("hi").num(), bo);
  Table t;
  t.columns = {"band_index", "lo", "hi", "gap_after_width"};
  for (size_t i = 0; i < bs.bands.size(); ++i) {
    const double gap = i < bs.gaps.size() ? bs.gaps[i].width : std::nan("");
    t.rows.push_back({static_cast<long long>(bs.bands[i].index), bs.bands[i].lo, bs.bands[i].hi, gap});
  }
  t.summary["max_edge_defect"] = bs.max_edge_defect;
  return t;
}

Table task_krein(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"graph", "pair1", "pair2"});
  allow_options(opt, {"zeta", "trials"});
  const ParsedGraph pg = parse_graph(prob.at("graph"));
  const SpectralOptions so = spectral_options(cfg, opt);
  const Complex zeta = opt.has("zeta") ? opt.at("zeta").complex() : Complex(0.5, 1.0);
  const long long trials = opt.integer("trials", 20);
  if (trials < 1) opt.at("trials").fail("must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  const Index m = pg.graph.boundary_dim();
  Table t;
  t.columns = {"trial", "residual", "bound"};
  double worst = 0.0;
  for (long long k = 0; k < trials; ++k) {
    const BoundaryPair p1 = prob.has("pair1") ? parse_conditions(prob.at("pair1"), pg)
                                              : robin_pair(random_hermitian(m, rng, 2.0));
    const BoundaryPair p2 = prob.has("pair2") ? parse_conditions(prob.at("pair2"), pg)
                                              : robin_pair(random_hermitian(m, rng, 2.0));
    const GraphFunction f = random_function(pg.graph, rng), g = random_function(pg.graph, rng);
    const double res = std::abs(krein_weak_residual(pg.graph, p1, p2, zeta, f, g, so));
    const double bound = 1e-8 * l2_norm(f) * l2_norm(g);
    worst = std::max(worst, res / bound);
    t.rows.push_back({k, res, bound});
  }
  t.summary["worst_ratio"] = worst;
  t.summary["pass"] = worst <= 1.0;
  return t;
}

Table task_riccati(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"family"});
  allow_options(opt, {"t0", "zeta", "h"});
  const FamilyPath path = parse_family(prob.at("family"));
  const SpectralOptions so = spectral_options(cfg, opt);
  const double t0 = opt.at("t0").num();
  const Complex zeta = opt.has("zeta") ? opt.at("zeta").complex() : Complex(0.5, 1.0);
  const std::vector<double> hs = opt.has("h") ? opt.at("h").nums() : std::vector<double>{1e-3, 1e-4};
  for (size_t i = 0; i < hs.size(); ++i)
    if (!(hs[i] > 0.0)) opt.at("h").at(i).fail("step must be positive");
  std::mt19937_64 rng(cfg.seed);
  const MetricGraph g0 = path.graph(t0);
  const GraphFunction f = random_function(g0, rng), g = random_function(g0, rng);
  // Richardson ratio r(h) / r(h/2) per step; second order gives about 4
  Table t;
  t.columns = {"h", "residual", "ratio"};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double h : hs) {
    const double r = std::abs(riccati_residual(path, t0, zeta, f, g, h, so));
    const double ratio = r / std::abs(riccati_residual(path, t0, zeta, f, g, h / 2, so));
    t.rows.push_back({h, r, ratio});
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  t.summary["min_ratio"] = lo;
  t.summary["max_ratio"] = hi;
  return t;
}

Table task_scaling(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"potential"});
  allow_options(opt, {"j_max"});
  const PotentialSpec ps = prob.has("potential") ? parse_potential(prob.at("potential"))
                                                 : PotentialSpec{Potential::constant(0.0), [](double) { return 0.0; }};
  const long long jmax = opt.integer("j_max", 3);
  if (jmax < 1) opt.at("j_max").fail("must be >= 1");
  const auto rows = scaling_slopes(ps.v, ps.dv, static_cast<int>(jmax), spectral_options(cfg, opt));
  Table t;
  t.columns = {"j", "lambda", "lambda_dot", "mu_dot", "rellich"};
  for (const ScalingRow& r : rows)
    t.rows.push_back({static_cast<long long>(r.j), r.lambda, r.lambda_dot, r.mu_dot, r.rellich});
  return t;
}

Table task_gap(const RunConfig& cfg, const Node& prob, const Node& opt) {
  prob.allow({"kronig_penney"});
  allow_options(opt, {"gap", "t_probe"});
  const PeriodicDeltaModel model = parse_kp(prob.at("kronig_penney"));
  BandOptions bo;
  bo.spectral = spectral_options(cfg, opt);
  const long long gap = opt.integer("gap", 1);
  if (gap < 1) opt.at("gap").fail("gap index is 1-based");
  const GapExperiment ex =
      gap_opening_experiment(model, static_cast<int>(gap), opt.positive("t_probe", 1e-3), bo);
  Table t;
  t.columns = {"j", "slope", "site_value_abs"};
  for (Index j = 0; j < ex.slopes.size(); ++j)
    t.rows.push_back({static_cast<long long>(j + 1), ex.slopes(j), std::abs(ex.site_values(j))});
  t.summary["gap"] = ex.gap;
  t.summary["theta"] = ex.theta;
  t.summary["level"] = ex.level;
  t.summary["opened"] = ex.opened;
  t.summary["t_probe"] = ex.t_probe;
  t.summary["width"] = ex.width;
  t.summary["predicted"] = ex.predicted;
  return t;
}

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  return std::get<std::string>(c);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

RunConfig parse_config(const std::string& text, const std::string& task_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());  // message carries line and column
  }
  const Node root(doc, "");
  root.allow({"task", "problem", "options", "output", "seed", "tol"});
  RunConfig cfg;
  if (root.has("task")) cfg.task = root.at("task").str();
  if (!task_override.empty()) {
    if (!cfg.task.empty() && cfg.task != task_override)
      root.at("task").fail("config task '" + cfg.task + "' does not match subcommand '" + task_override + "'");
    cfg.task = task_override;
  }
  if (cfg.task.empty()) root.fail("missing field 'task'");
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), cfg.task) == names.end())
    (root.has("task") ? root.at("task") : root).fail("unknown task '" + cfg.task + "'");
  if (!root.has("problem")) root.fail("missing field 'problem'");
  if (!root.at("problem").is_object()) root.at("problem").fail("expected an object");
  cfg.problem = doc["problem"];
  if (root.has("options")) {
    if (!root.at("options").is_object()) root.at("options").fail("expected an object");
    cfg.options = doc["options"];
  }
  if (root.has("output")) {
    const Node out = root.at("output");
    out.allow({"path", "format"});
    if (out.has("path")) cfg.out_path = out.at("path").str();
    if (out.has("format")) cfg.format = out.at("format").str();
  }
  if (cfg.format != "csv" && cfg.format != "json") root.at("output").at("format").fail("format must be csv or json");
  if (root.has("seed")) {
    const long long s = root.at("seed").integer();
    if (s < 0) root.at("seed").fail("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root.has("tol")) cfg.tol = root.positive("tol", 1.0);
  if (root.has("options")) {
    const Node opt = root.at("options");
    for (const char* k : {"tol", "ode_tol", "scan_density", "t_probe"})
      if (opt.has(k)) opt.positive(k, 1.0);
    if (opt.has("window")) opt.window("window");
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& task_override) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), task_override);
}

Table execute(const RunConfig& cfg) {
  if (cfg.tol && !(*cfg.tol > 0.0)) config_error("tol must be positive");
  const Node prob(cfg.problem, "/problem");
  const Node opt(cfg.options, "/options");
  if (cfg.task == "spectrum") return task_spectrum(cfg, prob, opt);
  if (cfg.task == "slopes") return task_slopes(cfg, prob, opt);
  if (cfg.task == "flow") return task_flow(cfg, prob, opt);
  if (cfg.task == "bands") return task_bands(cfg, prob, opt);
  if (cfg.task == "krein-check") return task_krein(cfg, prob, opt);
  if (cfg.task == "riccati-check") return task_riccati(cfg, prob, opt);
  if (cfg.task == "scaling") return task_scaling(cfg, prob, opt);
  if (cfg.task == "gap-experiment") return task_gap(cfg, prob, opt);
  config_error("unknown task '" + cfg.task + "'");
}

void write_csv(const Table& t, std::ostream& os) {
  os << "# " << kVersion << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
}

void write_json(const Table& t, const std::string& task, std::ostream& os) {
  json out = t.summary;
  out["version"] = kVersion;
  out["task"] = task;
  out["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const Cell& c : row) {
      if (std::holds_alternative<long long>(c))
        r.push_back(std::get<long long>(c));
      else if (std::holds_alternative<double>(c))
        r.push_back(std::get<double>(c));
      else
        r.push_back(std::get<std::string>(c));
    }
    rows.push_back(r);
  }
  out["rows"] = rows;
  os << out.dump(2) << "\n";
}

int run(const RunConfig& cfg, std::ostream& err) {
  try {
    const Table t = execute(cfg);
    std::ostringstream buf;
    if (cfg.format == "json")
      write_json(t, cfg.task, buf);
    else
      write_csv(t, buf);
    if (cfg.out_path.empty()) {
      std::cout << buf.str();
    } else {
      std::ofstream out(cfg.out_path);
      if (!out) throw Error(ErrorKind::IoError, "cannot write '" + cfg.out_path + "'");
      out << buf.str();
      if (!out) throw Error(ErrorKind::IoError, "write failed for '" + cfg.out_path + "'");
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

void emit_curves(const std::vector<Branch>& branches, std::ostream& os) {
  os << "# " << kVersion << "\n";
  os << "t,branch_id,lambda\n";
  for (const Branch& b : branches)
    for (size_t i = 0; i < b.t.size(); ++i)
      os << format_double(b.t[i]) << "," << b.id << "," << format_double(b.lambda[i]) << "\n";
}

void emit_curves(const std::vector<Branch>& branches, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  emit_curves(branches, out);
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

}  // namespace qgraph
