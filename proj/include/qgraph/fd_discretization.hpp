#pragma once

#include <functional>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// Lumped-mass P1 (three-point) discretisation of the quadratic form of H on the graph.
// Boundary values range over ran(Y*), with boundary term <L Gamma0 u, Gamma0 u>.
class FdDiscretization {
 public:
  FdDiscretization(const MetricGraph& graph, const BoundaryPair& pair, double points_per_unit = 2000.0);

  // Number of discrete eigenvalues strictly below lambda.
  Index count_below(double lambda) const;
  // k-th discrete eigenvalue (0-based), by bisection on count_below.
  double eigenvalue(Index k, double rel_tol = 1e-13) const;
  // Nodal values of the solution of (H - zeta) u = f, endpoints included.
  std::vector<CVector> solve(Complex zeta, const std::function<Complex(Index, double)>& f) const;
  const std::vector<RVector>& grids() const { return grids_; }

 private:
  struct EdgeMesh {
    double h;
    RVector pot;   // lumped potential at interior nodes
    double pot_a;  // lumped potential at the endpoints
    double pot_b;
  };
  MetricGraph graph_;
  std::vector<EdgeMesh> meshes_;
  std::vector<RVector> grids_;
  CMatrix basis_;  // m x r, orthonormal basis of admissible endpoint values
  CMatrix lform_;  // r x r boundary form
};

struct FdSpectrum {
  std::vector<double> values;  // Richardson-extrapolated, ascending
  Index strict_count = 0;      // values inside the open window, away from the edges
  Index inclusive_count = 0;   // values within edge tolerance counted as inside
};

FdSpectrum fd_spectrum(const MetricGraph& graph, const BoundaryPair& pair, double lo, double hi,
                       double points_per_unit = 2000.0);

}  // namespace qgraph
