#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qgraph/spectral.hpp"

namespace qgraph {

// t -> (graph with potentials V_t, chart (X_t, Y_t)) with derivative access.
class FamilyPath {
 public:
  using GraphMap = std::function<MetricGraph(double)>;
  using PairMap = std::function<BoundaryPair(double)>;
  using PairDerivMap = std::function<PairDerivative(double)>;
  // Per-edge potential derivative; an empty vector means Vdot = 0.
  using PotDerivMap = std::function<std::vector<Potential>(double)>;

  FamilyPath(double t_lo, double t_hi, GraphMap graph, PairMap pair);

  FamilyPath& with_pair_derivative(PairDerivMap d);
  FamilyPath& with_potential_derivative(PotDerivMap d);
  FamilyPath& with_fixed_potential();
  FamilyPath& with_fd_step(double h);

  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double fd_step() const { return fd_step_; }
  bool closed_form() const { return static_cast<bool>(dpair_) && static_cast<bool>(dpot_); }

  MetricGraph graph(double t) const { return graph_(t); }
  BoundaryPair pair(double t) const { return pair_(t); }
  PairDerivative pair_derivative(double t) const;
  std::vector<Potential> potential_derivative(double t) const;

 private:
  double t_lo_, t_hi_;
  GraphMap graph_;
  PairMap pair_;
  PairDerivMap dpair_;
  PotDerivMap dpot_;
  double fd_step_ = 1e-5;
};

// a + s * b (piecewise constants stay piecewise constant).
Potential add_scaled(const Potential& a, const Potential& b, double s);

FamilyPath robin_homotopy_family(const MetricGraph& graph);
FamilyPath delta_star_family(const std::vector<double>& lengths, const std::vector<Potential>& potentials,
                             const BoundaryPair& outer, double t_lo = 0.0, double t_hi = 1.0);
// X_t = Theta0 + t (Theta1 - Theta0), Y = I.
FamilyPath robin_matrix_family(const MetricGraph& graph, const CMatrix& theta0, const CMatrix& theta1);
// V_t = V_0 + t W on every edge, fixed conditions.
FamilyPath potential_family(const MetricGraph& graph, const BoundaryPair& pair, const std::vector<Potential>& w,
                            double t_lo = 0.0, double t_hi = 1.0);
// Quasi-periodic conditions in theta on a single interval.
FamilyPath floquet_theta_family(const MetricGraph& interval, double t_lo, double t_hi);
// Dirichlet unit interval with V_t(x) = t^2 V(t x); dv is V'.
FamilyPath scaling_family(const Potential& v, const Potential::Fn& dv, double t_lo = 0.5, double t_hi = 1.5);

struct SlopeMatrix {
  CMatrix b;          // Hermitian multiplicity x multiplicity
  EigenResult basis;  // kernel basis the matrix refers to
  CMatrix phi;        // W T v_k as columns
};

struct SlopeReport {
  double t0 = 0.0;
  double lambda = 0.0;
  int multiplicity = 0;
  RVector slopes;                     // ascending
  std::vector<GraphFunction> adapted;  // Kato-adapted eigenfunctions
  CMatrix coefficients;
  CMatrix phi;                        // boundary vectors, one column per slope
  std::vector<TraceVector> traces;
};

SlopeMatrix slope_matrix(const FamilyPath& path, double t0, double lambda, const SpectralOptions& opts = {});
SlopeMatrix slope_matrix(const FamilyPath& path, double t0, const EigenResult& eig);
SlopeReport hadamard_slopes(const FamilyPath& path, double t0, double lambda, const SpectralOptions& opts = {});
SlopeReport hadamard_slopes(const FamilyPath& path, double t0, const EigenResult& eig);

struct CrossingRecord {
  double t0 = 0.0;
  double lambda0 = 0.0;
  RVector values;
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
};

CrossingRecord crossing_form(const FamilyPath& path, double t0, double lambda0, const SpectralOptions& opts = {},
                             double degeneracy = 1e-7);

struct Branch {
  int id = 0;
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> slope;
};

struct TrackOptions {
  SpectralOptions spectral{.certify = false};
  int max_depth = 20;
};

std::vector<Branch> track_curves(const FamilyPath& path, double lo, double hi, const std::vector<double>& t_grid,
                                 const TrackOptions& opts = {});

struct FlowReport {
  double lambda0 = 0.0;
  std::vector<Branch> branches;
  std::vector<CrossingRecord> crossings;
  int spectral_flow = 0;
  int maslov_index = 0;
  bool agree = false;
};

struct FlowOptions {
  TrackOptions track;
  double half_window = 0.0;  // 0: automatic
  int t_points = 41;         // tracking grid
  int scan_points = 400;     // crossing detection grid
  double crossing_tol = 1e-8;
  double degeneracy = 1e-7;
};

FlowReport spectral_flow(const FamilyPath& path, double lambda0, const FlowOptions& opts = {});

// <Rdot f, g> by central differences minus the Riccati formula.
Complex riccati_residual(const FamilyPath& path, double t0, Complex zeta, const GraphFunction& f,
                         const GraphFunction& g, double h, const SpectralOptions& opts = {});

struct ScalingRow {
  int j = 0;
  double lambda = 0.0;
  double lambda_dot = 0.0;
  double mu_dot = 0.0;
  double rellich = 0.0;  // -u'(1)^2
};

std::vector<ScalingRow> scaling_slopes(const Potential& v, const Potential::Fn& dv, int j_max,
                                       const SpectralOptions& opts = {});

}  // namespace qgraph
