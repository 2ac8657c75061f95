#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "maflow/errors.hpp"

namespace maflow {

/// Uniform periodic grid on the flat complex torus (C/LZ[i])^n.
///
/// Real axes are ordered (x1, y1, x2, y2) with z_j = x_j + i y_j and stored
/// row-major, so the last axis varies fastest.
struct TorusGrid {
  int n = 1;
  int res = 64;
  double period = 1.0;

  /// Validating constructor: n in {1,2}, res a power of two >= 8, period > 0.
  static TorusGrid make(int n, int res, double period = 1.0);

  int axes() const { return 2 * n; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < axes(); ++a) s *= static_cast<std::size_t>(res);
    return s;
  }
  double spacing() const { return period / res; }
  /// Volume of the torus for the flat form, V = period^(2n).
  double volume() const { return std::pow(period, 2 * n); }

  /// Real coordinates of a grid node.
  std::array<double, 4> coords(std::size_t index) const {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
    for (int a = axes() - 1; a >= 0; --a) {
      x[a] = static_cast<double>(index % res) * spacing();
      index /= res;
    }
    return x;
  }

  bool operator==(const TorusGrid& o) const {
    return n == o.n && res == o.res && period == o.period;
  }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

/// Real scalar field sampled on a TorusGrid. Potentials, densities and
/// time derivatives all use this representation.
struct Field {
  TorusGrid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const TorusGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const TorusGrid& g, std::vector<double> v);

  static Field from_function(const TorusGrid& g,
                             const std::function<double(const std::array<double, 4>&)>& f);

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double max() const;
  double min() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  Field& operator+=(double s);
};

using PotentialField = Field;

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator+(Field a, double s);

/// a + s*b without temporaries.
Field axpy(const Field& a, double s, const Field& b);
double sup_norm(const Field& f);
double sup_distance(const Field& a, const Field& b);

}  // namespace maflow
