#include "maflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace maflow {

namespace {
// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Spectral::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

Spectral::Spectral(const TorusGrid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int d = grid.axes();
  const int res = grid.res;
  nreal_ = grid.size();
  nspec_ = nreal_ / res * (res / 2 + 1);

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->real = fftw_alloc_real(nreal_);
    plans_->spec = fftw_alloc_complex(nspec_);
    std::vector<int> dims(d, res);
    // FFTW_ESTIMATE keeps the chosen algorithm, and therefore every bit of
    // the output, independent of timing measurements.
    plans_->r2c = fftw_plan_dft_r2c(d, dims.data(), plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r(d, dims.data(), plans_->spec, plans_->real, FFTW_ESTIMATE);
  }

  const double base = 2.0 * std::numbers::pi / grid.period;
  const double nyquist_k = std::numbers::pi / grid.spacing();
  k_.assign(d, std::vector<double>(nspec_, 0.0));
  k2_.assign(nspec_, 0.0);
  k2_full_.assign(nspec_, 0.0);
  max_abs_mode_.assign(nspec_, 0);
  const int last = res / 2 + 1;
  for (std::size_t s = 0; s < nspec_; ++s) {
    std::size_t rem = s;
    double k2 = 0.0, k2f = 0.0;
    int maxm = 0;
    for (int a = d - 1; a >= 0; --a) {
      const int extent = (a == d - 1) ? last : res;
      const int i = static_cast<int>(rem % extent);
      rem /= extent;
      int m = (i <= res / 2) ? i : i - res;
      const bool nyq = (i == res / 2);
      const double k = nyq ? 0.0 : base * m;
      k_[a][s] = k;
      k2 += k * k;
      k2f += nyq ? nyquist_k * nyquist_k : k * k;
      maxm = std::max(maxm, std::abs(m));
    }
    k2_[s] = k2;
    k2_full_[s] = k2f;
    max_abs_mode_[s] = maxm;
  }
  work_.resize(nspec_);
  work2_.resize(nspec_);
}

Spectral::~Spectral() = default;

void Spectral::forward(const Field& f, Spectrum& out) {
  std::memcpy(plans_->real, f.values.data(), nreal_ * sizeof(double));
  fftw_execute(plans_->r2c);
  out.resize(nspec_);
  std::memcpy(reinterpret_cast<void*>(out.data()), plans_->spec, nspec_ * sizeof(fftw_complex));
}

void Spectral::inverse(const Spectrum& in, Field& out) {
  std::memcpy(plans_->spec, reinterpret_cast<const void*>(in.data()), nspec_ * sizeof(fftw_complex));
  fftw_execute(plans_->c2r);
  if (out.grid != grid_ || out.size() != nreal_) out = Field(grid_);
  const double scale = 1.0 / static_cast<double>(nreal_);
  for (std::size_t i = 0; i < nreal_; ++i) out.values[i] = plans_->real[i] * scale;
}

Field Spectral::apply_symbol(const Field& f, const std::vector<double>& symbol) {
  forward(f, work_);
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= symbol[s];
  Field out(grid_);
  inverse(work_, out);
  return out;
}

HermitianField Spectral::hessian(const Field& f) {
  forward(f, work_);
  HermitianField h(grid_);
  Field tmp(grid_);
  auto component = [&](auto&& symbol, std::vector<double>& dst) {
    for (std::size_t s = 0; s < nspec_; ++s) work2_[s] = work_[s] * symbol(s);
    inverse(work2_, tmp);
    dst = tmp.values;
  };
  if (grid_.n == 1) {
    component([&](std::size_t s) { return -0.25 * k2_[s]; }, h.h11);
    return h;
  }
  const auto& k0 = k_[0];
  const auto& k1 = k_[1];
  const auto& k2 = k_[2];
  const auto& k3 = k_[3];
  component([&](std::size_t s) { return -0.25 * (k0[s] * k0[s] + k1[s] * k1[s]); }, h.h11);
  component([&](std::size_t s) { return -0.25 * (k2[s] * k2[s] + k3[s] * k3[s]); }, h.h22);
  component([&](std::size_t s) { return -0.25 * (k0[s] * k2[s] + k1[s] * k3[s]); }, h.re12);
  component([&](std::size_t s) { return 0.25 * (k1[s] * k2[s] - k0[s] * k3[s]); }, h.im12);
  return h;
}

Field Spectral::flat_trace(const Field& f) {
  forward(f, work_);
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= -0.25 * k2_[s];
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Field Spectral::laplacian(const Field& f) {
  forward(f, work_);
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= -k2_[s];
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Field Spectral::heat(const Field& f, double s_time) {
  forward(f, work_);
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= std::exp(-s_time * k2_full_[s]);
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Field Spectral::solve_shifted(const Field& r, double kappa, double alpha) {
  forward(r, work_);
  for (std::size_t s = 0; s < nspec_; ++s) {
    const double denom = -0.25 * kappa * k2_[s] - alpha;
    work_[s] = std::abs(denom) > 1e-300 ? work_[s] / denom : std::complex<double>(0.0, 0.0);
  }
  if (alpha == 0.0) work_[0] = 0.0;
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Field Spectral::project_range(const Field& f) {
  forward(f, work_);
  for (std::size_t s = 0; s < nspec_; ++s)
    if (k2_[s] == 0.0) work_[s] = 0.0;
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Field Spectral::dealias(const Field& f) {
  forward(f, work_);
  const int cutoff = grid_.res / 3;
  for (std::size_t s = 0; s < nspec_; ++s)
    if (max_abs_mode_[s] > cutoff) work_[s] = 0.0;
  Field out(grid_);
  inverse(work_, out);
  return out;
}

Spectral& spectral_for(const TorusGrid& grid) {
  thread_local std::map<std::tuple<int, int, double>, std::unique_ptr<Spectral>> cache;
  auto key = std::make_tuple(grid.n, grid.res, grid.period);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Spectral>(grid)).first;
  return *it->second;
}

}  // namespace maflow
