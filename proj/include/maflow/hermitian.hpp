#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// Pointwise Hermitian matrix of size 1 or 2, [[a, b], [conj(b), d]].
/// For n = 1 only `a` is meaningful. All closed forms below avoid a general
/// eigensolver.
struct Herm2 {
  double a = 0.0;
  double d = 0.0;
  double b_re = 0.0;
  double b_im = 0.0;

  static Herm2 scalar(double s) { return {s, s, 0.0, 0.0}; }

  double abs_b2() const { return b_re * b_re + b_im * b_im; }

  double trace(int n) const { return n == 1 ? a : a + d; }
  double det(int n) const { return n == 1 ? a : a * d - abs_b2(); }

  double min_eig(int n) const {
    if (n == 1) return a;
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + abs_b2());
    return 0.5 * (a + d) - half_gap;
  }
  double max_eig(int n) const {
    if (n == 1) return a;
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + abs_b2());
    return 0.5 * (a + d) + half_gap;
  }
};

/// tr(A^{-1} B) for Hermitian A positive definite.
inline double trace_inv_times(const Herm2& A, const Herm2& B, int n) {
  if (n == 1) return B.a / A.a;
  const double det = A.det(2);
  return (A.d * B.a + A.a * B.d - 2.0 * (A.b_re * B.b_re + A.b_im * B.b_im)) / det;
}

/// Mixed determinant D(A, B) with D(A, A) = det A; for n = 1 it is (A + B)/2.
inline double mixed_det(const Herm2& A, const Herm2& B, int n) {
  if (n == 1) return 0.5 * (A.a + B.a);
  return 0.5 * (A.a * B.d + A.d * B.a) - (A.b_re * B.b_re + A.b_im * B.b_im);
}

/// Field of Hermitian matrices. Components h11, h22, and the real and
/// imaginary parts of h12; for n = 1 only h11 is populated.
struct HermitianField {
  TorusGrid grid;
  std::vector<double> h11, h22, re12, im12;

  HermitianField() = default;
  explicit HermitianField(const TorusGrid& g) : grid(g), h11(g.size(), 0.0) {
    if (g.n == 2) {
      h22.assign(g.size(), 0.0);
      re12.assign(g.size(), 0.0);
      im12.assign(g.size(), 0.0);
    }
  }

  std::size_t size() const { return h11.size(); }

  Herm2 at(std::size_t i) const {
    if (grid.n == 1) return {h11[i], 0.0, 0.0, 0.0};
    return {h11[i], h22[i], re12[i], im12[i]};
  }
  void set(std::size_t i, const Herm2& m) {
    h11[i] = m.a;
    if (grid.n == 2) {
      h22[i] = m.d;
      re12[i] = m.b_re;
      im12[i] = m.b_im;
    }
  }

  /// s * I + (*this), pointwise.
  HermitianField shifted(double s) const {
    HermitianField out = *this;
    for (double& v : out.h11) v += s;
    for (double& v : out.h22) v += s;
    return out;
  }
};

/// Smallest eigenvalue over the whole field; no positivity requirement.
inline double min_eig(const HermitianField& m) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) lo = std::min(lo, m.at(i).min_eig(m.grid.n));
  return lo;
}

/// Positive definite Hermitian field, the local matrix of a Kähler metric.
/// Only constructible through `from`, which checks positivity.
class MetricField {
 public:
  /// Throws KaehlerConeViolation if some eigenvalue is <= 0 or not finite.
  static MetricField from(HermitianField m);

  const HermitianField& matrices() const { return m_; }
  const TorusGrid& grid() const { return m_.grid; }
  Herm2 at(std::size_t i) const { return m_.at(i); }
  double min_eig() const { return min_eig_; }

 private:
  MetricField(HermitianField m, double min_eig) : m_(std::move(m)), min_eig_(min_eig) {}
  HermitianField m_;
  double min_eig_;
};

}  // namespace maflow
