#pragma once

#include <vector>

#include "qgraph/graph_function.hpp"
#include "qgraph/propagate.hpp"

namespace qgraph {

struct SpectralOptions {
  double tol = 1e-9;                 // accepted smallest normalised singular value at a root
  double multiplicity_tol = 1e-7;    // singular values below this count towards multiplicity
  double scan_density = 16.0;        // grid points per mean eigenvalue spacing in sqrt scale
  bool certify = true;               // cross-check the count with the finite-difference oracle
  double fd_points_per_unit = 2000.0;
  double ode_tol = 1e-12;            // sampled potentials
  double spectrum_floor = 1e-11;     // resolvent refuses zeta with sigma_min below this
};

struct SecularMatrix {
  Complex zeta;
  CMatrix m;  // X Gamma0(Psi) + Y Gamma1(Psi)
};

// Columns: traces of (c_e, s_e) for each edge, rows (Gamma0; Gamma1).
CMatrix cauchy_data(const MetricGraph& graph, Complex zeta, double ode_tol = 1e-12);
SecularMatrix secular(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol = 1e-12);
// Chart-independent version: orthonormal rows of [X, Y] times an orthonormal basis of the Cauchy-data plane.
CMatrix normalized_secular(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta,
                           double ode_tol = 1e-12);
// Singular values of the normalised secular matrix, ascending.
RVector secular_sigma(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, double ode_tol = 1e-12);

struct EigenResult {
  double lambda = 0.0;
  int multiplicity = 0;
  CMatrix coefficients;  // rows (alpha_0, beta_0, alpha_1, ...), one column per eigenfunction
  std::vector<GraphFunction> eigenfunctions;
  std::vector<TraceVector> traces;
  double residual = 0.0;
};

std::vector<EigenResult> eigenvalues(const MetricGraph& graph, const BoundaryPair& pair, double lo, double hi,
                                     const SpectralOptions& opts = {});
EigenResult eigenfunctions(const MetricGraph& graph, const BoundaryPair& pair, double lambda,
                           const SpectralOptions& opts = {});
// Local minimiser of sigma_min within [guess - radius, guess + radius].
double refine_eigenvalue(const MetricGraph& graph, const BoundaryPair& pair, double guess, double radius,
                         const SpectralOptions& opts = {});

// Edge combination sum_e alpha_e c_e + beta_e s_e sampled on a plan.
GraphFunction basis_combination(const MetricGraph& graph, Complex zeta, const CVector& coef, const PanelPlan& plan,
                                double ode_tol = 1e-12);

GraphFunction resolvent_apply(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta,
                              const GraphFunction& f, const SpectralOptions& opts = {});
TraceVector trace_resolvent(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta,
                            const GraphFunction& f, const SpectralOptions& opts = {});

// Dirichlet-to-inward-Neumann matrix.
CMatrix weyl_m(const MetricGraph& graph, Complex zeta, double ode_tol = 1e-12);
// gamma(zeta) h: solution of the homogeneous equation with Gamma0 = h.
GraphFunction gamma_field(const MetricGraph& graph, Complex zeta, const CVector& h, const PanelPlan& plan,
                          double ode_tol = 1e-12);

// L2 norm of R_Theta f - R_0 f - gamma(zeta)(Theta - M(zeta))^{-1} gamma*(conj zeta) f.
double krein_naimark_check(const MetricGraph& graph, const BoundaryPair& pair, Complex zeta, const GraphFunction& f,
                           const SpectralOptions& opts = {});

// <(R2 - R1) f, g> - <Z21 T R1(zeta) f, T R2(conj zeta) g>.
Complex krein_weak_residual(const MetricGraph& graph, const BoundaryPair& pair1, const BoundaryPair& pair2,
                            Complex zeta, const GraphFunction& f, const GraphFunction& g,
                            const SpectralOptions& opts = {});

}  // namespace qgraph
