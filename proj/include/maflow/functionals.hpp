#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "maflow/grid.hpp"
#include "maflow/hermitian.hpp"
#include "maflow/twist.hpp"

namespace maflow {

/// E(phi) = 1/((n+1) V) sum_j int phi (theta_t + dd^c phi)^j ^ theta_t^(n-j),
/// with the wedge products of two forms written as mixed determinants.
double energy(const Field& phi, const TwistSpec& twist, double t);

/// I = (1/V) int phi e^h dV. An empty h means h = 0.
double mean_value(const Field& phi, const Field& h);

double oscillation(const Field& phi);

/// f = det(M_t) e^-h, so that (theta_t + dd^c phi)^n = f e^h omega^n.
Field density(const Field& phi, const TwistSpec& twist, double t, const Field& h);

/// (int |f|^p e^h)^(1/p).
double lp_norm(const Field& f, double p, const Field& h);
/// int w(f) e^h.
double orlicz_integral(const Field& f, const std::function<double(double)>& w, const Field& h);

inline double orlicz_xlogx(double x) { return x * std::log1p(x); }

/// One row of the recorded series. Column names and order are fixed:
/// t, sup, inf, osc, I, E, fmin, fmax, f_l2, orlicz_xlogx, vol, min_eig, dt.
struct FunctionalRow {
  double t = 0.0;
  double sup = 0.0;
  double inf = 0.0;
  double osc = 0.0;
  double I = 0.0;
  double E = 0.0;
  double fmin = 0.0;
  double fmax = 0.0;
  double f_l2 = 0.0;
  double orlicz = 0.0;
  double vol = 0.0;
  double min_eig = 0.0;
  double dt = 0.0;

  static const std::vector<std::string>& columns();
  std::vector<double> values() const;
  static FunctionalRow from_values(const std::vector<double>& v);
};

FunctionalRow evaluate_functionals(const Field& phi, const TwistSpec& twist, double t, const Field& h);

/// Times plus named value columns.
struct FunctionalSeries {
  std::vector<FunctionalRow> rows;

  std::vector<double> times() const;
  std::vector<double> column(const std::string& name) const;
};

}  // namespace maflow
