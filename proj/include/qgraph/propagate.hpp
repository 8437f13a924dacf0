#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

using Mat2 = Eigen::Matrix2cd;

// Maps (u, u') at the left end to (u, u') at the right end.
struct TransferMatrix {
  Mat2 t = Mat2::Identity();
  std::optional<Complex> zeta;  // empty for zeta-independent jumps
  std::string edge_id;
  double wronskian_drift = 0.0;
};

struct EdgeBasis {
  Complex c_val, c_der, s_val, s_der;
};

// cos(sqrt(q) x) and sin(sqrt(q) x)/sqrt(q) as entire functions of q.
Complex entire_c(Complex q, double x);
Complex entire_s(Complex q, double x);

TransferMatrix propagate_constant(double v, Complex zeta, double length);
TransferMatrix propagate_sampled(const Potential::Fn& v, Complex zeta, double length,
                                 double tol = 1e-10, double x0 = 0.0);
TransferMatrix delta_jump(double alpha);
TransferMatrix compose(const TransferMatrix& t2, const TransferMatrix& t1);

// Propagator over [x0, x1] for any potential kind.
TransferMatrix propagate(const Potential& v, Complex zeta, double x0, double x1, double tol = 1e-10);

EdgeBasis edge_basis(const Edge& edge, Complex zeta, double tol = 1e-10);

// Fundamental matrices from 0 to each x (xs ascending within [0, length]).
std::vector<Mat2> fundamental_at(const Potential& v, Complex zeta, const std::vector<double>& xs,
                                 double tol = 1e-10);

}  // namespace qgraph
