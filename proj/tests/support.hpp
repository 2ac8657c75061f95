#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/hermitian.hpp"

namespace testsupport {

using maflow::Field;
using maflow::TorusGrid;

inline constexpr double pi = std::numbers::pi;

/// Random trigonometric polynomial with integer modes |m| <= max_mode on
/// every axis, scaled so its sup norm is about `amp`.
inline Field random_band_limited(const TorusGrid& g, int max_mode, double amp, unsigned seed,
                                 int terms = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Field f(g);
  const double w = 2.0 * pi / g.period;
  for (int t = 0; t < terms; ++t) {
    int m[4] = {mode(rng), mode(rng), g.n == 2 ? mode(rng) : 0, g.n == 2 ? mode(rng) : 0};
    const double a = coef(rng) * amp / terms;
    const double ph = coef(rng) * pi;
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto x = g.coords(i);
      double arg = ph;
      for (int k = 0; k < g.axes(); ++k) arg += w * m[k] * x[k];
      f[i] += a * std::cos(arg);
    }
  }
  return f;
}

// Assemble d^2/dz_j dzbar_k from real second partials of a single mode
// a*cos(k.x + ph): f_{x_a x_b} = -k_a k_b a cos(...).
struct ModeTerm {
  double amp, phase;
  std::array<int, 4> m;
};

inline maflow::Herm2 symbolic_hessian(const std::vector<ModeTerm>& terms, const TorusGrid& g,
                                      const std::array<double, 4>& x) {
  const double w = 2.0 * pi / g.period;
  double d2[4][4] = {};
  for (const auto& t : terms) {
    double arg = t.phase;
    for (int a = 0; a < g.axes(); ++a) arg += w * t.m[a] * x[a];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) d2[a][b] += -w * t.m[a] * w * t.m[b] * t.amp * std::cos(arg);
  }
  // axes (x1, y1, x2, y2) = 0, 1, 2, 3
  maflow::Herm2 h;
  h.a = 0.25 * (d2[0][0] + d2[1][1]);
  h.d = 0.25 * (d2[2][2] + d2[3][3]);
  h.b_re = 0.25 * (d2[0][2] + d2[1][3]);
  h.b_im = 0.25 * (d2[0][3] - d2[1][2]);
  return h;
}

inline Field from_terms(const std::vector<ModeTerm>& terms, const TorusGrid& g) {
  const double w = 2.0 * pi / g.period;
  return Field::from_function(g, [&](const std::array<double, 4>& x) {
    double s = 0.0;
    for (const auto& t : terms) {
      double arg = t.phase;
      for (int a = 0; a < g.axes(); ++a) arg += w * t.m[a] * x[a];
      s += t.amp * std::cos(arg);
    }
    return s;
  });
}

inline std::vector<ModeTerm> random_terms(int n, int max_mode, unsigned seed, int count = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ModeTerm> out;
  for (int i = 0; i < count; ++i)
    out.push_back({u(rng), pi * u(rng),
                   {mode(rng), mode(rng), n == 2 ? mode(rng) : 0, n == 2 ? mode(rng) : 0}});
  return out;
}

}  // namespace testsupport
