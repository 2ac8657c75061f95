#pragma once

#include <limits>
#include <string>

#include "maflow/grid.hpp"

namespace maflow {

enum class SignClass { Zero, NonNeg, NonPos, Mixed };

std::string to_string(SignClass s);

/// Twist form chi = c * omega + dd^c(psi_chi). An empty psi_chi means zero.
struct TwistSpec {
  double c = 0.0;
  Field psi_chi;

  bool has_psi() const { return !psi_chi.empty(); }

  /// Sign of c*I + H(psi_chi) over the grid, with absolute tolerance `tol`.
  SignClass sign_class(double tol = 1e-12) const;

  /// psi_chi on `g`, or the zero field when absent.
  Field psi_on(const TorusGrid& g) const;
};

/// Largest time with 1 + t*c >= 0; +inf when c >= 0.
inline double t_max(const TwistSpec& tw) {
  if (tw.c >= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / -tw.c;
}

}  // namespace maflow
