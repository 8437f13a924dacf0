#pragma once

#include "qgraph/matcore.hpp"

// Chebyshev panels on the reference interval [-1, 1], second-kind points in ascending order.
namespace qgraph::cheb {

constexpr int kPoints = 32;

const RVector& nodes();
const RVector& bary_weights();
const RMatrix& diff_matrix();
// Row i gives the integral from -1 to node i.
const RMatrix& cumsum_matrix();

struct GaussRule {
  RVector x;
  RVector w;
};
// Cached Gauss-Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(int n);

Complex interpolate(const CVector& values, double s);

}  // namespace qgraph::cheb
