#include "qgraph/lagrangian.hpp"

namespace qgraph {

BoundaryPair validate_pair(const CMatrix& x, const CMatrix& y, const PairTolerances& tol) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows() || x.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "validate_pair: X and Y must be square of equal size");
  if (!x.allFinite() || !y.allFinite())
    throw Error(ErrorKind::Degenerate, "validate_pair: non-finite entries");
  const CMatrix s = x * x.adjoint() + y * y.adjoint();
  const RVector ev = herm_eig(s).values;
  const double scale = ev(ev.size() - 1);
  if (!(scale > 0.0) || ev(0) < tol.definiteness * scale)
    throw Error(ErrorKind::Degenerate, "validate_pair: X X* + Y Y* not positive definite");
  const CMatrix defect = x * y.adjoint() - y * x.adjoint();
  if (norm2(defect) > tol.compatibility * scale)
    throw Error(ErrorKind::NotCompatible, "validate_pair: X Y* != Y X*");
  return BoundaryPair(x, y);
}

CMatrix symplectic_j(Index m) {
  CMatrix j = CMatrix::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -CMatrix::Identity(m, m);
  return j;
}

Complex omega(const CVector& f, const CVector& g) {
  if (f.size() != g.size() || f.size() % 2 != 0)
    throw Error(ErrorKind::DimensionMismatch, "omega: vectors must have equal even length");
  const Index m = f.size() / 2;
  // <a, b> = b* a
  return g.head(m).dot(f.tail(m)) - g.tail(m).dot(f.head(m));
}

CMatrix gram_s(const BoundaryPair& pair) {
  return pair.x() * pair.x().adjoint() + pair.y() * pair.y().adjoint();
}

CMatrix weight_w(const BoundaryPair& pair) {
  const Index m = pair.dim();
  CMatrix rhs(m, 2 * m);
  rhs << -pair.y(), pair.x();
  return solve(gram_s(pair), rhs);
}

CMatrix projection(const BoundaryPair& pair) {
  const Index m = pair.dim();
  CMatrix left(2 * m, m);
  left << -pair.y().adjoint(), pair.x().adjoint();
  CMatrix q = left * weight_w(pair);
  return (q + q.adjoint()) / 2.0;
}

CMatrix coupling_z(const BoundaryPair& pair2, const BoundaryPair& pair1) {
  if (pair1.dim() != pair2.dim()) throw Error(ErrorKind::DimensionMismatch, "coupling_z: dimensions differ");
  const CMatrix mid = pair2.x() * pair1.y().adjoint() - pair2.y() * pair1.x().adjoint();
  return weight_w(pair2).adjoint() * mid * weight_w(pair1);
}

bool membership(const BoundaryPair& pair, const CVector& f, double tol) {
  const Index m = pair.dim();
  if (f.size() != 2 * m) throw Error(ErrorKind::DimensionMismatch, "membership: vector length");
  const CVector r = pair.x() * f.head(m) + pair.y() * f.tail(m);
  return r.norm() <= tol * (f.norm() + 1.0);
}

double plane_distance(const BoundaryPair& a, const BoundaryPair& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "plane_distance: dimensions differ");
  return norm2(CMatrix(projection(a) - projection(b)));
}

bool same_plane(const BoundaryPair& a, const BoundaryPair& b, double tol) {
  return plane_distance(a, b) <= tol;
}

CMatrix normalized_rows(const BoundaryPair& pair) {
  const Index m = pair.dim();
  CMatrix xy(m, 2 * m);
  xy << pair.x(), pair.y();
  return inv_sqrt_pd(gram_s(pair)) * xy;
}

CMatrix boundary_slope_form(const BoundaryPair& pair, const CMatrix& xdot, const CMatrix& ydot) {
  if (xdot.rows() != pair.dim() || ydot.rows() != pair.dim())
    throw Error(ErrorKind::DimensionMismatch, "boundary_slope_form: derivative size");
  return pair.x() * ydot.adjoint() - pair.y() * xdot.adjoint();
}

}  // namespace qgraph
