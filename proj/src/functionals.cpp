#include "maflow/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "maflow/geometry.hpp"

namespace maflow {

namespace {

double weighted_integral(const Field& f, const Field& h) {
  if (h.empty()) return integrate(f);
  Field w(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i] * std::exp(h[i]);
  return integrate(w);
}

}  // namespace

double energy(const Field& phi, const TwistSpec& twist, double t) {
  const TorusGrid& g = phi.grid;
  const int n = g.n;
  const HermitianField theta = reference_form(twist, t, g);
  HermitianField h = complex_hessian(phi);
  Field integrand(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Herm2 th = theta.at(i);
    Herm2 m = h.at(i);
    m.a += th.a;
    m.d += th.d;
    m.b_re += th.b_re;
    m.b_im += th.b_im;
    double wedge = 0.0;
    if (n == 1) {
      wedge = th.a + m.a;
    } else {
      wedge = th.det(2) + mixed_det(th, m, 2) + m.det(2);
    }
    integrand[i] = phi[i] * wedge;
  }
  return integrate(integrand) / ((n + 1) * g.volume());
}

double mean_value(const Field& phi, const Field& h) {
  return weighted_integral(phi, h) / phi.grid.volume();
}

double oscillation(const Field& phi) { return phi.max() - phi.min(); }

Field density(const Field& phi, const TwistSpec& twist, double t, const Field& h) {
  Field f = ma_ratio(phi, twist, t);
  if (!h.empty())
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::exp(-h[i]);
  return f;
}

double lp_norm(const Field& f, double p, const Field& h) {
  Field a(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::pow(std::abs(f[i]), p);
  return std::pow(weighted_integral(a, h), 1.0 / p);
}

double orlicz_integral(const Field& f, const std::function<double(double)>& w, const Field& h) {
  Field a(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = w(f[i]);
  return weighted_integral(a, h);
}

const std::vector<std::string>& FunctionalRow::columns() {
  static const std::vector<std::string> names{"t",    "sup",  "inf",          "osc", "I",       "E", "fmin",
                                              "fmax", "f_l2", "orlicz_xlogx", "vol", "min_eig", "dt"};
  return names;
}

std::vector<double> FunctionalRow::values() const {
  return {t, sup, inf, osc, I, E, fmin, fmax, f_l2, orlicz, vol, min_eig, dt};
}

FunctionalRow FunctionalRow::from_values(const std::vector<double>& v) {
  if (v.size() != columns().size()) throw InvalidSpec("functional row needs 13 values");
  FunctionalRow r;
  r.t = v[0], r.sup = v[1], r.inf = v[2], r.osc = v[3], r.I = v[4], r.E = v[5], r.fmin = v[6];
  r.fmax = v[7], r.f_l2 = v[8], r.orlicz = v[9], r.vol = v[10], r.min_eig = v[11], r.dt = v[12];
  return r;
}

FunctionalRow evaluate_functionals(const Field& phi, const TwistSpec& twist, double t, const Field& h) {
  FunctionalRow r;
  r.t = t;
  r.sup = phi.max();
  r.inf = phi.min();
  r.osc = r.sup - r.inf;
  r.I = mean_value(phi, h);
  r.E = energy(phi, twist, t);
  const MetricField m = metric_matrix(phi, twist, t);
  Field det = ma_ratio(m);
  r.vol = integrate(det);
  r.min_eig = m.min_eig();
  Field f = det;
  if (!h.empty())
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::exp(-h[i]);
  r.fmin = f.min();
  r.fmax = f.max();
  r.f_l2 = lp_norm(f, 2.0, h);
  r.orlicz = orlicz_integral(f, orlicz_xlogx, h);
  return r;
}

std::vector<double> FunctionalSeries::times() const { return column("t"); }

std::vector<double> FunctionalSeries::column(const std::string& name) const {
  const auto& cols = FunctionalRow::columns();
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw InvalidSpec("unknown functional '" + name + "'");
  const auto k = static_cast<std::size_t>(it - cols.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.values()[k]);
  return out;
}

}  // namespace maflow
