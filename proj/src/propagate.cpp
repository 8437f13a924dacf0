#include "qgraph/propagate.hpp"

#include <algorithm>
#include <cmath>

namespace qgraph {

namespace {

constexpr double kSeriesSwitch = 1e-2;

Mat2 constant_block(Complex q, double x) {
  const Complex c = entire_c(q, x), s = entire_s(q, x);
  Mat2 t;
  t << c, s, -q * s, c;
  return t;
}

Mat2 rhs(const Potential::Fn& v, Complex zeta, double x, const Mat2& y) {
  Mat2 a;
  a << 0.0, 1.0, v(x) - zeta, 0.0;
  return a * y;
}

void check_zeta(Complex zeta) {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag()))
    throw Error(ErrorKind::DimensionMismatch, "spectral parameter not finite");
}

}  // namespace

Complex entire_c(Complex q, double x) {
  const Complex z = -q * x * x;
  if (std::abs(z) < kSeriesSwitch) {
    // sum z^n / (2n)!
    Complex term = 1.0, sum = 1.0;
    for (int n = 1; n < 12; ++n) {
      term *= z / static_cast<double>((2 * n - 1) * (2 * n));
      sum += term;
    }
    return sum;
  }
  return std::cos(std::sqrt(q) * x);
}

Complex entire_s(Complex q, double x) {
  const Complex z = -q * x * x;
  if (std::abs(z) < kSeriesSwitch) {
    Complex term = 1.0, sum = 1.0;
    for (int n = 1; n < 12; ++n) {
      term *= z / static_cast<double>((2 * n) * (2 * n + 1));
      sum += term;
    }
    return x * sum;
  }
  const Complex r = std::sqrt(q);
  return std::sin(r * x) / r;
}

TransferMatrix propagate_constant(double v, Complex zeta, double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::NonpositiveLength, "propagate_constant: length");
  check_zeta(zeta);
  TransferMatrix out;
  out.t = constant_block(zeta - v, length);
  out.zeta = zeta;
  return out;
}

TransferMatrix propagate_sampled(const Potential::Fn& v, Complex zeta, double length, double tol, double x0) {
  if (!(length > 0.0)) throw Error(ErrorKind::NonpositiveLength, "propagate_sampled: length");
  check_zeta(zeta);
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double e[7] = {35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
                                  125.0 / 192 - 393.0 / 640, -2187.0 / 6784 + 92097.0 / 339200,
                                  11.0 / 84 - 187.0 / 2100, -1.0 / 40};

  const double scale = std::sqrt(std::abs(zeta) + std::abs(v(x0)) + 1.0);
  double h = std::min(length, 0.1 / scale);
  const double hmin = 1e-14 * std::max(1.0, length);
  double x = 0.0;
  Mat2 y = Mat2::Identity();
  Mat2 k[7];
  k[0] = rhs(v, zeta, x0, y);
  while (x < length) {
    if (x + h > length) h = length - x;
    if (h < hmin) throw Error(ErrorKind::StepUnderflow, "propagate_sampled: step size underflow");
    for (int s = 1; s < 7; ++s) {
      Mat2 ys = y;
      for (int j = 0; j < s; ++j) ys += h * a[s][j] * k[j];
      k[s] = rhs(v, zeta, x0 + x + c[s] * h, ys);
    }
    Mat2 ynew = y;
    for (int j = 0; j < 6; ++j) ynew += h * a[6][j] * k[j];
    Mat2 err = Mat2::Zero();
    for (int j = 0; j < 7; ++j) err += h * e[j] * k[j];
    const double ref = 1.0 + std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
    // error per unit step, so the accumulated error stays near tol
    const double en = err.cwiseAbs().maxCoeff() / (tol * ref * std::max(h / length, 1e-3));
    if (!std::isfinite(en)) {
      h /= 4.0;
      continue;
    }
    if (en <= 1.0) {
      x += h;
      y = ynew;
      k[0] = k[6];
    }
    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
  }
  TransferMatrix out;
  const Complex det = y.determinant();
  out.wronskian_drift = std::abs(det - 1.0);
  out.t = y / std::sqrt(det);
  out.zeta = zeta;
  return out;
}

TransferMatrix delta_jump(double alpha) {
  TransferMatrix out;
  out.t << 1.0, 0.0, alpha, 1.0;
  return out;
}

TransferMatrix compose(const TransferMatrix& t2, const TransferMatrix& t1) {
  if (t1.zeta && t2.zeta && *t1.zeta != *t2.zeta)
    throw Error(ErrorKind::ZetaMismatch, "compose: spectral parameters differ");
  TransferMatrix out;
  out.t = t2.t * t1.t;
  out.zeta = t2.zeta ? t2.zeta : t1.zeta;
  out.edge_id = t2.edge_id == t1.edge_id ? t1.edge_id : t1.edge_id + "+" + t2.edge_id;
  out.wronskian_drift = t1.wronskian_drift + t2.wronskian_drift;
  return out;
}

TransferMatrix propagate(const Potential& v, Complex zeta, double x0, double x1, double tol) {
  TransferMatrix out;
  out.zeta = zeta;
  if (x1 <= x0) return out;
  // split at breakpoints / hints inside (x0, x1)
  std::vector<double> cuts{x0};
  for (double b : v.breakpoints())
    if (b > x0 && b < x1) cuts.push_back(b);
  cuts.push_back(x1);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    TransferMatrix piece;
    if (v.kind() == Potential::Kind::Sampled)
      piece = propagate_sampled(v.function(), zeta, len, tol, cuts[i]);
    else
      piece = propagate_constant(v(0.5 * (cuts[i] + cuts[i + 1])), zeta, len);
    out = compose(piece, out);
  }
  return out;
}

EdgeBasis edge_basis(const Edge& edge, Complex zeta, double tol) {
  const Mat2 t = propagate(edge.potential, zeta, 0.0, edge.length, tol).t;
  return {t(0, 0), t(1, 0), t(0, 1), t(1, 1)};
}

std::vector<Mat2> fundamental_at(const Potential& v, Complex zeta, const std::vector<double>& xs, double tol) {
  std::vector<Mat2> out;
  out.reserve(xs.size());
  if (v.kind() != Potential::Kind::Sampled) {
    for (double x : xs) out.push_back(propagate(v, zeta, 0.0, x, tol).t);
    return out;
  }
  Mat2 acc = Mat2::Identity();
  double at = 0.0;
  for (double x : xs) {
    if (x > at) {
      acc = propagate(v, zeta, at, x, tol).t * acc;
      at = x;
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace qgraph
