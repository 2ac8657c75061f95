#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/hermitian.hpp"
#include "maflow/twist.hpp"

namespace maflow {

/// F(u) = n log(alpha) [alpha > 0] + log det M_t(u) - alpha u - g - h.
/// Throws KaehlerConeViolation when M_t(u) is not positive.
Field newton_residual(const Field& u, double alpha, const Field& g, const TwistSpec& twist, double t,
                      const Field& h);

/// Derivative of F at u: delta -> tr_{M_t(u)} H(delta) - alpha delta.
class Linearization {
 public:
  Linearization(const Field& u, double alpha, const TwistSpec& twist, double t);

  Field apply(const Field& delta) const;
  /// det(M) * apply(delta), i.e. sum cof(M)_jk H(delta)_jk - alpha det(M) delta.
  Field apply_divergence_form(const Field& delta) const;
  const Field& det() const { return det_; }
  /// Flat symbol used by the preconditioner: kappa * trH - shift.
  double kappa() const { return kappa_; }
  double shift() const { return shift_; }

 private:
  HermitianField m_;
  Field det_;
  double alpha_;
  double kappa_;
  double shift_;
};

struct NewtonLogRow {
  int iteration = 0;
  double residual = 0.0;
  double damping = 0.0;
  int inner_iterations = 0;
};

struct EllipticOptions {
  double tol = 1e-9;
  int max_newton = 60;
  int max_inner = 400;
  double inner_rtol = 1e-11;
  std::optional<Field> warm_start;
};

struct EllipticResult {
  Field u;
  double residual = 0.0;
  int iterations = 0;
  std::vector<NewtonLogRow> log;
};

/// Solves alpha^n det M_t(u) = exp(alpha u + g + h) by damped Newton.
/// alpha = 0 requires int e^(g+h) = (1+tc)^n V and normalizes int u e^h = 0.
/// Throws NewtonDiverged, IncompatibleData.
EllipticResult solve_ma(double alpha, const Field& g, const TwistSpec& twist, double t, const Field& h,
                        const EllipticOptions& options = {});

struct LinearSolveResult {
  Field x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned BiCGSTAB for A x = b with right preconditioner P^-1.
LinearSolveResult bicgstab(const std::function<Field(const Field&)>& A, const Field& b,
                           const std::function<Field(const Field&)>& precond, double rtol, int max_iter);

}  // namespace maflow
