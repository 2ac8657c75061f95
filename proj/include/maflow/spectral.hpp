#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/hermitian.hpp"

namespace maflow {

/// FFT-backed differentiation and filtering on one TorusGrid.
///
/// Wavenumbers at the Nyquist index are treated as zero in every symbol, so
/// each derivative symbol is a product of first-derivative symbols. This
/// makes the discrete identities that integration by parts gives in the
/// continuum (zero mean of H(u), the Stokes identity for det(I + H(u)))
/// hold to round-off for arbitrary grid data.
///
/// Not thread-safe; use `spectral_for` to get a per-thread instance.
class Spectral {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  explicit Spectral(const TorusGrid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const TorusGrid& grid() const { return grid_; }
  std::size_t spectral_size() const { return nspec_; }

  void forward(const Field& f, Spectrum& out);
  /// Inverse transform including the 1/N normalization. `in` is not modified.
  void inverse(const Spectrum& in, Field& out);

  /// Wavenumber (2 pi m / L, Nyquist zeroed) along real axis `axis` for
  /// every spectral index.
  const std::vector<double>& wavenumbers(int axis) const { return k_[axis]; }
  /// |k|^2 per spectral index.
  const std::vector<double>& k2() const { return k2_; }

  /// Complex Hessian d^2 f / dz_j dzbar_k.
  HermitianField hessian(const Field& f);
  /// tr H(f) = flat Laplacian / 4.
  Field flat_trace(const Field& f);
  /// Flat real Laplacian.
  Field laplacian(const Field& f);
  /// exp(s * Laplacian) f: Gaussian smoothing with variance 2s per real axis.
  Field heat(const Field& f, double s);
  /// Solve kappa * trH(u) - alpha * u = r. For alpha == 0 the mean mode of
  /// the result is set to zero.
  Field solve_shifted(const Field& r, double kappa, double alpha);
  /// Zero every mode the flat trace annihilates (the mean and modes whose
  /// wavenumbers all sit at 0 or Nyquist).
  Field project_range(const Field& f);
  /// Zero modes with |m| > res/3 along any axis.
  Field dealias(const Field& f);
  /// Multiply the spectrum by a real symbol given per spectral index.
  Field apply_symbol(const Field& f, const std::vector<double>& symbol);

 private:
  TorusGrid grid_;
  std::size_t nreal_ = 0;
  std::size_t nspec_ = 0;
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::vector<std::vector<double>> k_;
  std::vector<double> k2_;
  // |k|^2 with the Nyquist wavenumber kept, used only by smoothing filters.
  std::vector<double> k2_full_;
  std::vector<int> max_abs_mode_;
  Spectrum work_;
  Spectrum work2_;
};

/// Per-thread cached Spectral instance for `grid`.
Spectral& spectral_for(const TorusGrid& grid);

}  // namespace maflow
