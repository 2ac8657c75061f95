#include "maflow/geometry.hpp"

#include <numeric>

#include "maflow/spectral.hpp"

namespace maflow {

std::string to_string(SignClass s) {
  switch (s) {
    case SignClass::Zero: return "zero";
    case SignClass::NonNeg: return "nonneg";
    case SignClass::NonPos: return "nonpos";
    case SignClass::Mixed: return "mixed";
  }
  return "mixed";
}

SignClass TwistSpec::sign_class(double tol) const {
  if (!has_psi()) {
    if (std::abs(c) <= tol) return SignClass::Zero;
    return c > 0.0 ? SignClass::NonNeg : SignClass::NonPos;
  }
  const HermitianField chi = complex_hessian(psi_chi).shifted(c);
  const int n = psi_chi.grid.n;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const Herm2 m = chi.at(i);
    lo = std::min(lo, m.min_eig(n));
    hi = std::max(hi, m.max_eig(n));
  }
  if (lo >= -tol && hi <= tol) return SignClass::Zero;
  if (lo >= -tol) return SignClass::NonNeg;
  if (hi <= tol) return SignClass::NonPos;
  return SignClass::Mixed;
}

Field TwistSpec::psi_on(const TorusGrid& g) const {
  if (!has_psi()) return Field(g);
  if (psi_chi.grid != g) throw InvalidSpec("twist potential lives on a different grid");
  return psi_chi;
}

HermitianField complex_hessian(const Field& phi) { return spectral_for(phi.grid).hessian(phi); }

HermitianField reference_form(const TwistSpec& twist, double t, const TorusGrid& grid) {
  HermitianField out(grid);
  if (twist.has_psi() && t != 0.0) out = complex_hessian(t * twist.psi_on(grid));
  return out.shifted(1.0 + t * twist.c);
}

MetricField metric_matrix(const Field& phi, const TwistSpec& twist, double t) {
  if (twist.has_psi() && t != 0.0) {
    Field u = axpy(phi, t, twist.psi_on(phi.grid));
    return MetricField::from(complex_hessian(u).shifted(1.0 + t * twist.c));
  }
  return MetricField::from(complex_hessian(phi).shifted(1.0 + t * twist.c));
}

Field ma_ratio(const MetricField& m) {
  const int n = m.grid().n;
  Field out(m.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.at(i).det(n);
  return out;
}

Field ma_ratio(const Field& phi, const TwistSpec& twist, double t) {
  return ma_ratio(metric_matrix(phi, twist, t));
}

Field trace_wrt(const MetricField& m, const HermitianField& nf) {
  const int n = m.grid().n;
  Field out(m.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Herm2 a = m.at(i);
    const double det = a.det(n);
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
      throw SingularMetric("metric determinant " + std::to_string(det) + " at gridpoint " +
                           std::to_string(i));
    out[i] = trace_inv_times(a, nf.at(i), n);
  }
  return out;
}

Field laplacian_wrt(const MetricField& m, const Field& psi) {
  return trace_wrt(m, complex_hessian(psi));
}

double mean(const Field& f) {
  const double s = std::accumulate(f.values.begin(), f.values.end(), 0.0);
  return s / static_cast<double>(f.size());
}

double integrate(const Field& f) { return mean(f) * f.grid.volume(); }

double min_eigenvalue(const MetricField& m) { return m.min_eig(); }

}  // namespace maflow
