#pragma once

#include "maflow/grid.hpp"
#include "maflow/hermitian.hpp"
#include "maflow/twist.hpp"

namespace maflow {

// Normalization: omega is the flat form whose local matrix is I, and dd^c u
// is represented by the complex Hessian d^2 u / dz_j dzbar_k. Hence
// (omega + dd^c u)^n / omega^n = det(I + H(u)).

HermitianField complex_hessian(const Field& phi);

/// Local matrix of theta_t = (1 + t c) I + t H(psi_chi).
HermitianField reference_form(const TwistSpec& twist, double t, const TorusGrid& grid);

/// M_t = (1 + t c) I + H(t psi_chi + phi). Throws KaehlerConeViolation.
MetricField metric_matrix(const Field& phi, const TwistSpec& twist, double t);

/// det M_t pointwise.
Field ma_ratio(const MetricField& m);
Field ma_ratio(const Field& phi, const TwistSpec& twist, double t);

/// tr_M(H(psi)).
Field laplacian_wrt(const MetricField& m, const Field& psi);
/// tr_M(N) = sum (M^-1)_kj N_jk.
Field trace_wrt(const MetricField& m, const HermitianField& n);

/// Quadrature on the torus: grid mean times volume.
double integrate(const Field& f);
double mean(const Field& f);

double min_eigenvalue(const MetricField& m);

}  // namespace maflow
