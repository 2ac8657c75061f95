#include "maflow/elliptic.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "maflow/geometry.hpp"
#include "maflow/spectral.hpp"

namespace maflow {

namespace {

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Field& a) { return std::sqrt(dot(a, a)); }

void remove_mean(Field& f) { f += -mean(f); }

double weighted_mean(const Field& u, const Field& h) {
  if (h.empty()) return mean(u);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = std::exp(h[i]);
    num += u[i] * w;
    den += w;
  }
  return num / den;
}

HermitianField full_metric(const Field& u, const TwistSpec& twist, double t) {
  return metric_matrix(u, twist, t).matrices();
}

}  // namespace

Field newton_residual(const Field& u, double alpha, const Field& g, const TwistSpec& twist, double t,
                      const Field& h) {
  const MetricField m = metric_matrix(u, twist, t);
  const int n = u.grid.n;
  const double la = alpha > 0.0 ? n * std::log(alpha) : 0.0;
  Field r(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    r[i] = la + std::log(m.at(i).det(n)) - alpha * u[i] - g[i];
    if (!h.empty()) r[i] -= h[i];
  }
  return r;
}

Linearization::Linearization(const Field& u, double alpha, const TwistSpec& twist, double t)
    : m_(full_metric(u, twist, t)), det_(u.grid), alpha_(alpha) {
  const int n = u.grid.n;
  double tr = 0.0;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const Herm2 a = m_.at(i);
    det_[i] = a.det(n);
    tr += a.trace(n);
  }
  kappa_ = n == 1 ? 1.0 : tr / (static_cast<double>(m_.size()) * n);
  shift_ = alpha * mean(det_);
}

Field Linearization::apply_divergence_form(const Field& delta) const {
  const int n = delta.grid.n;
  const HermitianField hd = complex_hessian(delta);
  Field out(delta.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Herm2 a = m_.at(i);
    const Herm2 b = hd.at(i);
    // For n = 2, cof(M) = [[d, -b], [-conj b, a]] and sum cof_jk B_kj = 2 D(M, B).
    const double c = n == 1 ? b.a : 2.0 * mixed_det(a, b, 2);
    out[i] = c - alpha_ * det_[i] * delta[i];
  }
  return out;
}

Field Linearization::apply(const Field& delta) const {
  Field out = apply_divergence_form(delta);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= det_[i];
  return out;
}

LinearSolveResult bicgstab(const std::function<Field(const Field&)>& A, const Field& b,
                           const std::function<Field(const Field&)>& precond, double rtol, int max_iter) {
  LinearSolveResult res;
  res.x = Field(b.grid);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;
  Field r = b;
  const Field r0 = r;
  Field p(b.grid), v(b.grid);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int k = 1; k <= max_iter; ++k) {
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0) break;
    if (k == 1) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;
    const Field phat = precond(p);
    v = A(phat);
    const double r0v = dot(r0, v);
    if (r0v == 0.0 || !std::isfinite(r0v)) break;
    alpha = rho / r0v;
    Field s = axpy(r, -alpha, v);
    res.x = axpy(res.x, alpha, phat);
    res.iterations = k;
    if (norm2(s) <= rtol * bnorm) {
      res.relative_residual = norm2(s) / bnorm;
      return res;
    }
    const Field shat = precond(s);
    const Field tv = A(shat);
    const double tt = dot(tv, tv);
    if (tt == 0.0 || !std::isfinite(tt)) {
      res.relative_residual = norm2(s) / bnorm;
      return res;
    }
    omega = dot(tv, s) / tt;
    res.x = axpy(res.x, omega, shat);
    r = axpy(s, -omega, tv);
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual <= rtol || omega == 0.0) return res;
  }
  return res;
}

EllipticResult solve_ma(double alpha, const Field& g, const TwistSpec& twist, double t, const Field& h,
                        const EllipticOptions& opt) {
  if (!(alpha >= 0.0)) throw InvalidSpec("alpha must be >= 0");
  const TorusGrid& grid = g.grid;
  const int n = grid.n;
  if (alpha == 0.0) {
    Field e(grid);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(g[i] + (h.empty() ? 0.0 : h[i]));
    const double mass = integrate(e);
    const double expect = std::pow(1.0 + t * twist.c, n) * grid.volume();
    if (std::abs(mass - expect) > 1e-8 * expect)
      throw IncompatibleData("int e^(g+h) = " + std::to_string(mass) + " but the class volume is " +
                             std::to_string(expect));
  }

  EllipticResult out;
  Field u = opt.warm_start ? *opt.warm_start : Field(grid);
  if (alpha == 0.0) u += -weighted_mean(u, h);
  Spectral& sp = spectral_for(grid);

  Field r = newton_residual(u, alpha, g, twist, t, h);
  double rn = sup_norm(r);
  for (int it = 0; it < opt.max_newton; ++it) {
    if (rn <= opt.tol) break;
    const Linearization lin(u, alpha, twist, t);
    // For alpha = 0 the range of the divergence form is orthogonal to
    // constants, so drop the det-weighted mean of the residual first.
    double c = 0.0;
    if (alpha == 0.0) c = dot(lin.det(), r) / std::accumulate(lin.det().values.begin(), lin.det().values.end(), 0.0);
    Field b(grid);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = -lin.det()[i] * (r[i] - c);
    if (alpha == 0.0) b = sp.project_range(b);
    auto A = [&](const Field& x) {
      Field y = lin.apply_divergence_form(x);
      return alpha == 0.0 ? sp.project_range(y) : y;
    };
    auto P = [&](const Field& x) { return sp.solve_shifted(x, lin.kappa(), lin.shift()); };
    LinearSolveResult ls = bicgstab(A, b, P, opt.inner_rtol, opt.max_inner);
    Field delta = std::move(ls.x);
    if (alpha == 0.0) remove_mean(delta);

    double lambda = 1.0;
    for (;;) {
      Field trial = axpy(u, lambda, delta);
      if (alpha == 0.0) trial += -weighted_mean(trial, h);
      try {
        Field rt = newton_residual(trial, alpha, g, twist, t, h);
        const double rtn = sup_norm(rt);
        if (std::isfinite(rtn) && (rtn < (1.0 - 1e-4 * lambda) * rn || rtn <= opt.tol)) {
          u = std::move(trial);
          r = std::move(rt);
          rn = rtn;
          break;
        }
      } catch (const KaehlerConeViolation&) {
      }
      lambda *= 0.5;
      if (lambda < std::ldexp(1.0, -20)) {
        std::ostringstream os;
        os << "damping underflow at iteration " << it << ", residual " << rn;
        throw NewtonDiverged(os.str());
      }
    }
    out.log.push_back({it + 1, rn, lambda, ls.iterations});
    out.iterations = it + 1;
  }
  if (rn > opt.tol) throw NewtonDiverged("no convergence after " + std::to_string(opt.max_newton) + " iterations, residual " + std::to_string(rn));
  out.u = std::move(u);
  out.residual = rn;
  return out;
}

}  // namespace maflow
