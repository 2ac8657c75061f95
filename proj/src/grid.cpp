#include "maflow/grid.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace maflow {

TorusGrid TorusGrid::make(int n, int res, double period) {
  if (n != 1 && n != 2) throw InvalidSpec("complex dimension must be 1 or 2, got " + std::to_string(n));
  if (res < 8 || (res & (res - 1)) != 0)
    throw InvalidSpec("res must be a power of two >= 8, got " + std::to_string(res));
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidSpec("period must be positive");
  return TorusGrid{n, res, period};
}

Field::Field(const TorusGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidSpec("field size does not match grid");
}

Field Field::from_function(const TorusGrid& g,
                           const std::function<double(const std::array<double, 4>&)>& f) {
  Field out(g);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(g.coords(i));
  return out;
}

double Field::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  return m;
}

double Field::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) m = std::min(m, v);
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& o) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

Field& Field::operator+=(double s) {
  for (double& v : values) v += s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }
Field operator+(Field a, double s) { return a += s; }

Field axpy(const Field& a, double s, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += s * b.values[i];
  return out;
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace maflow
