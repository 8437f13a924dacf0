#pragma once

#include "qgraph/matcore.hpp"

namespace qgraph {

struct PairTolerances {
  double compatibility = 1e-10;
  double definiteness = 1e-10;
};

// Chart (X, Y) of the Lagrangian plane ker[X, Y] in C^m x C^m.
class BoundaryPair {
 public:
  BoundaryPair() = default;
  const CMatrix& x() const { return x_; }
  const CMatrix& y() const { return y_; }
  Index dim() const { return x_.rows(); }

  friend BoundaryPair validate_pair(const CMatrix& x, const CMatrix& y, const PairTolerances& tol);

 private:
  BoundaryPair(CMatrix x, CMatrix y) : x_(std::move(x)), y_(std::move(y)) {}
  CMatrix x_;
  CMatrix y_;
};

BoundaryPair validate_pair(const CMatrix& x, const CMatrix& y, const PairTolerances& tol = {});

// Parameter derivative of a chart t -> (X_t, Y_t).
struct PairDerivative {
  CMatrix dx;
  CMatrix dy;
};

CMatrix symplectic_j(Index m);

// <Jf, g> = <f2, g1> - <f1, g2>
Complex omega(const CVector& f, const CVector& g);

// X X* + Y Y*
CMatrix gram_s(const BoundaryPair& pair);

// Orthogonal projection onto ker[X, Y].
CMatrix projection(const BoundaryPair& pair);

// (X X* + Y Y*)^{-1} [-Y, X]
CMatrix weight_w(const BoundaryPair& pair);

// W2* (X2 Y1* - Y2 X1*) W1
CMatrix coupling_z(const BoundaryPair& pair2, const BoundaryPair& pair1);

bool membership(const BoundaryPair& pair, const CVector& f, double tol = 1e-10);

// Spectral norm of the difference of projections.
double plane_distance(const BoundaryPair& a, const BoundaryPair& b);

bool same_plane(const BoundaryPair& a, const BoundaryPair& b, double tol = 1e-10);

// S^{-1/2} [X, Y]: orthonormal rows, same kernel.
CMatrix normalized_rows(const BoundaryPair& pair);

// X Ydot* - Y Xdot*  (Hermitian for smooth Lagrangian families)
CMatrix boundary_slope_form(const BoundaryPair& pair, const CMatrix& xdot, const CMatrix& ydot);

}  // namespace qgraph
