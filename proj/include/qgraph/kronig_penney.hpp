#pragma once

#include <numbers>
#include <vector>

#include "qgraph/perturbation.hpp"

namespace qgraph {

// p-periodic delta couplings alpha_0..alpha_{p-1} at the integers.
struct PeriodicDeltaModel {
  int p = 1;
  std::vector<double> alpha{0.0};

  void validate() const;
  static PeriodicDeltaModel free(int p) { return {p, std::vector<double>(static_cast<size_t>(p), 0.0)}; }
};

// Cell (-1/2, p - 1/2) cut at 0, 1, ..., p-1: edges of length 1/2, 1, ..., 1, 1/2.
MetricGraph kp_chain(const PeriodicDeltaModel& model);

// Trace permutation: site-ordered trace = P * per-edge trace.
RMatrix kp_permutation(int p);

// Block-diagonal pair on the cell-end / site ordering (u(-1/2), u(p-1/2), u(0-), u(0+), ...).
BoundaryPair floquet_site_pair(const PeriodicDeltaModel& model, double theta);
// Same plane on the per-edge ordering.
BoundaryPair floquet_boundary_pair(const PeriodicDeltaModel& model, double theta);

std::vector<EigenResult> floquet_eigenvalues(const PeriodicDeltaModel& model, double theta, double lo, double hi,
                                             const SpectralOptions& opts = {});

// Trace of the one-period monodromy.
double discriminant(const PeriodicDeltaModel& model, double lambda);

struct Band {
  double lo = 0.0, hi = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;  // which Floquet problem supplies each edge
  int index = 0;                          // 1-based eigenvalue index of both edges
};

struct Gap {
  double lo = 0.0, hi = 0.0;
  double width = 0.0;
  bool closed = true;
};

struct BandStructure {
  std::vector<Band> bands;
  std::vector<Gap> gaps;  // gaps[n] lies between bands[n] and bands[n+1]
  double max_edge_defect = 0.0;  // max | |D(edge)| - 2 |
};

struct BandOptions {
  SpectralOptions spectral;
  double edge_tol = 1e-7;      // | |D| - 2 | at band edges
  double interlace_tol = 1e-8;  // relative slack in the ordering chain
  double closed_tol = 1e-8;
};

// Bands with both edges <= hi.
BandStructure band_structure(const PeriodicDeltaModel& model, double hi, const BandOptions& opts = {});

// alpha_0 -> alpha_0 + t at fixed theta.
FamilyPath alpha0_family(const PeriodicDeltaModel& model, double theta, double t_lo = -1.0, double t_hi = 1.0);
// theta -> Floquet pair.
FamilyPath kp_theta_family(const PeriodicDeltaModel& model, double t_lo = 0.0, double t_hi = 2.0 * std::numbers::pi);

struct GapExperiment {
  int gap = 0;            // 1-based: between band gap and gap + 1
  double theta = 0.0;
  double level = 0.0;
  RVector slopes;         // ascending, two entries
  CVector site_values;    // adapted eigenfunctions at x = 0
  bool opened = false;
  double t_probe = 0.0;
  double width = 0.0;      // gap width at alpha_0 + t_probe
  double predicted = 0.0;  // |slope difference| / 2 * t_probe
};

GapExperiment gap_opening_experiment(const PeriodicDeltaModel& model, int gap, double t_probe = 1e-3,
                                     const BandOptions& opts = {}, double slope_tol = 1e-6);

// d lambda_j / d theta at theta0 for the j-th (1-based) Floquet eigenvalue.
double theta_slope(const PeriodicDeltaModel& model, double theta0, int j, const SpectralOptions& opts = {});

}  // namespace qgraph
