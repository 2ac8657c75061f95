#include "maflow/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "maflow/field_io.hpp"
#include "maflow/geometry.hpp"
#include "maflow/spectral.hpp"

namespace maflow {

namespace {

constexpr double pi = std::numbers::pi;

// theta_1(u) = 2 sum_k (-1)^k q^{(k+1/2)^2} sin((2k+1) u), q = e^-pi (square lattice).
constexpr int kThetaTerms = 7;

double theta_coeff(int k) { return 2.0 * std::exp(-pi * (k + 0.5) * (k + 0.5)) * ((k % 2) ? -1.0 : 1.0); }

double theta1_prime_zero() {
  double s = 0.0;
  for (int k = 0; k < kThetaTerms; ++k) s += theta_coeff(k) * (2 * k + 1);
  return s;
}

double wrap(double x, double period) {
  x = std::fmod(x, period);
  if (x >= 0.5 * period) x -= period;
  if (x < -0.5 * period) x += period;
  return x;
}

}  // namespace

Field modes_field(const std::vector<Mode>& modes, const TorusGrid& grid) {
  Field f(grid);
  const double w = 2.0 * pi / grid.period;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = grid.coords(i);
    double s = 0.0;
    for (const Mode& m : modes) {
      double arg = 0.0;
      for (int a = 0; a < grid.axes(); ++a) arg += w * m.m[a] * x[a];
      s += m.amp * (m.sine ? std::sin(arg) : std::cos(arg));
    }
    f[i] = s;
  }
  return f;
}

double log_distance_1d(double x, double y, double period) {
  x = wrap(x, period);
  y = wrap(y, period);
  const std::complex<double> u(pi * x / period, pi * y / period);
  std::complex<double> th = 0.0;
  for (int k = 0; k < kThetaTerms; ++k) th += theta_coeff(k) * std::sin(static_cast<double>(2 * k + 1) * u);
  static const double norm = std::log(theta1_prime_zero());
  return std::log(std::abs(th)) - pi * y * y / (period * period) - norm - std::log(pi / period);
}

double log_distance(const std::array<double, 4>& z, const std::array<double, 4>& z0, int n,
                    double period) {
  const double g1 = log_distance_1d(z[0] - z0[0], z[1] - z0[1], period);
  if (n == 1) return g1;
  const double g2 = log_distance_1d(z[2] - z0[2], z[3] - z0[3], period);
  const double hi = std::max(g1, g2), lo = std::min(g1, g2);
  if (!std::isfinite(hi)) return hi;
  return hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
}

double log_distance_sup(int n, double period) {
  constexpr int mesh = 256;
  double sup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= mesh; ++i)
    for (int j = 0; j <= mesh; ++j)
      sup = std::max(sup, log_distance_1d(period * (i - mesh / 2) / mesh, period * (j - mesh / 2) / mesh, period));
  return n == 1 ? sup : sup + 0.5 * std::log(2.0);
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::Smooth: return "smooth";
    case PotentialKind::Lelong: return "lelong";
    case PotentialKind::ZeroLelongUnbounded: return "zero_lelong";
    case PotentialKind::BoundedDiscontinuous: return "bounded_discontinuous";
    case PotentialKind::FiniteEnergy: return "finite_energy";
    case PotentialKind::FromFile: return "file";
  }
  return "smooth";
}

PotentialKind potential_kind_from_string(const std::string& s) {
  for (auto k : {PotentialKind::Smooth, PotentialKind::Lelong, PotentialKind::ZeroLelongUnbounded,
                 PotentialKind::BoundedDiscontinuous, PotentialKind::FiniteEnergy, PotentialKind::FromFile})
    if (to_string(k) == s) return k;
  throw InvalidSpec("unknown potential kind '" + s + "'");
}

PotentialSpec PotentialSpec::smooth(std::vector<Mode> modes) {
  PotentialSpec s;
  s.kind = PotentialKind::Smooth;
  s.modes = std::move(modes);
  return s;
}

PotentialSpec PotentialSpec::lelong(double gamma) {
  PotentialSpec s;
  s.kind = PotentialKind::Lelong;
  s.gamma = gamma;
  return s;
}

PotentialSpec PotentialSpec::zero_lelong(double a) {
  PotentialSpec s;
  s.kind = PotentialKind::ZeroLelongUnbounded;
  s.exponent = a;
  return s;
}

PotentialSpec PotentialSpec::finite_energy(double a) {
  PotentialSpec s;
  s.kind = PotentialKind::FiniteEnergy;
  s.exponent = a;
  return s;
}

PotentialSpec PotentialSpec::bounded_discontinuous(double gamma, double depth, std::vector<Mode> modes) {
  PotentialSpec s;
  s.kind = PotentialKind::BoundedDiscontinuous;
  s.gamma = gamma;
  s.depth = depth;
  s.modes = std::move(modes);
  return s;
}

PotentialSpec PotentialSpec::from_file(std::string path) {
  PotentialSpec s;
  s.kind = PotentialKind::FromFile;
  s.path = std::move(path);
  return s;
}

bool PotentialSpec::bounded() const {
  return kind == PotentialKind::Smooth || kind == PotentialKind::BoundedDiscontinuous;
}

bool PotentialSpec::singular() const {
  return kind == PotentialKind::Lelong || kind == PotentialKind::ZeroLelongUnbounded ||
         kind == PotentialKind::FiniteEnergy || kind == PotentialKind::BoundedDiscontinuous;
}

void PotentialSpec::validate(const TorusGrid& grid) const {
  const double curv = pi / (2.0 * grid.period * grid.period);
  if (!(clip_floor < 0.0)) throw InvalidSpec("clip floor must be negative");
  switch (kind) {
    case PotentialKind::Smooth:
      break;
    case PotentialKind::Lelong:
    case PotentialKind::BoundedDiscontinuous:
      if (!(gamma >= 0.0)) throw InvalidSpec("Lelong mass must be >= 0");
      if (gamma * curv >= 1.0)
        throw InvalidSpec("Lelong mass " + std::to_string(gamma) + " too large for period " +
                          std::to_string(grid.period) + " (need gamma * pi / (2 L^2) < 1)");
      if (kind == PotentialKind::BoundedDiscontinuous && !(depth > 0.0))
        throw InvalidSpec("depth must be positive");
      break;
    case PotentialKind::ZeroLelongUnbounded:
    case PotentialKind::FiniteEnergy:
      if (!(exponent > 0.0 && exponent < 1.0)) throw InvalidSpec("exponent must lie in (0, 1)");
      if (kind == PotentialKind::FiniteEnergy && !(exponent < grid.n / (grid.n + 1.0)))
        throw InvalidSpec("finite energy needs exponent < n/(n+1)");
      if (exponent * curv >= 1.0) throw InvalidSpec("exponent too large for period");
      break;
    case PotentialKind::FromFile:
      if (path.empty()) throw InvalidSpec("file potential needs a path");
      break;
  }
  for (const Mode& m : modes)
    if (!std::isfinite(m.amp)) throw InvalidSpec("non-finite mode amplitude");
}

std::array<double, 4> PotentialSpec::singular_point(const TorusGrid& grid) const {
  if (z0) return *z0;
  const double c = 0.5 * grid.period + 0.5 * grid.spacing();
  return {c, c, grid.n == 2 ? c : 0.0, grid.n == 2 ? c : 0.0};
}

Field sample_potential(const PotentialSpec& spec, const TorusGrid& grid) {
  spec.validate(grid);
  if (spec.kind == PotentialKind::FromFile) {
    Snapshot s = load_snapshot(spec.path);
    if (s.field.grid != grid) throw InvalidSpec("snapshot grid does not match " + spec.path);
    if (!s.field.all_finite()) throw InvalidSpec("snapshot has non-finite values");
    const double lam = min_eig(complex_hessian(spectral_for(grid).heat(s.field, 2.0 * grid.spacing() * grid.spacing())).shifted(1.0));
    if (lam < -1e-6) throw InvalidSpec("snapshot potential is not omega-psh (min eigenvalue " + std::to_string(lam) + ")");
    return s.field;
  }
  Field smooth = modes_field(spec.modes, grid);
  if (spec.kind == PotentialKind::Smooth) return smooth;

  const auto z0 = spec.singular_point(grid);
  const double k0 = 1.0 + log_distance_sup(grid.n, grid.period);
  Field out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = log_distance(grid.coords(i), z0, grid.n, grid.period);
    double v = 0.0;
    switch (spec.kind) {
      case PotentialKind::Lelong:
        v = spec.gamma == 0.0 ? 0.0 : spec.gamma * d;
        break;
      case PotentialKind::ZeroLelongUnbounded:
      case PotentialKind::FiniteEnergy:
        v = -std::pow(k0 - d, spec.exponent);
        break;
      case PotentialKind::BoundedDiscontinuous:
        v = std::max(spec.gamma * d, -spec.depth + smooth[i]);
        break;
      default:
        break;
    }
    out[i] = std::isnan(v) ? spec.clip_floor : std::max(v, spec.clip_floor);
  }
  return out;
}

ApproximationSequence approximation_sequence(const PotentialSpec& spec, const TorusGrid& grid, int J,
                                             double K) {
  if (J < 1) throw InvalidSpec("approximation needs J >= 1");
  if (!(K > 0.0)) throw InvalidSpec("truncation step K must be positive");
  ApproximationSequence seq;
  seq.spec = spec;
  seq.grid = grid;
  seq.K = K;
  seq.phi0 = sample_potential(spec, grid);

  const int n = grid.n;
  const double delta_last = 2.0 * grid.spacing();
  std::vector<double> delta(J + 1);
  for (int j = 1; j <= J; ++j) delta[j] = delta_last * std::pow(std::sqrt(2.0), J - j);

  std::vector<Field> raw(J + 1);
  Spectral& sp = spectral_for(grid);
  for (int j = 1; j <= J; ++j) {
    if (spec.kind == PotentialKind::Smooth) {
      raw[j] = seq.phi0;
    } else {
      Field t = seq.phi0;
      for (double& v : t.values) v = std::max(v, -j * K);
      raw[j] = sp.heat(t, 0.5 * delta[j] * delta[j]);
    }
  }

  // Smallest C >= 2n with raw_{j+1} + C d_{j+1}^2 <= raw_j + C d_j^2.
  double need = 0.0;
  for (int j = 1; j < J; ++j) {
    const double gap = delta[j] * delta[j] - delta[j + 1] * delta[j + 1];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < raw[j].size(); ++i) worst = std::max(worst, raw[j + 1][i] - raw[j][i]);
    need = std::max(need, worst / gap);
  }
  const double theory = 2.0 * n;
  if (need > 4.0 * theory)
    throw MonotonicityFailure("compensating constant " + std::to_string(need) + " exceeds cap " +
                              std::to_string(4.0 * theory));
  seq.C = std::max(theory, need * (1.0 + 1e-9) + 1e-12);

  for (int j = 1; j <= J; ++j) {
    ApproximationLevel lv;
    lv.j = j;
    lv.delta = delta[j];
    lv.phi = raw[j] + seq.C * delta[j] * delta[j];
    lv.min_eig = min_eig(complex_hessian(lv.phi).shifted(1.0));
    if (!(lv.min_eig > 0.0))
      throw InvalidSpec("approximation level " + std::to_string(j) + " is not strictly omega-psh (min eigenvalue " +
                        std::to_string(lv.min_eig) + ")");
    seq.levels.push_back(std::move(lv));
  }
  return seq;
}

double interpolate(const Field& phi, const std::array<double, 4>& x) {
  const TorusGrid& g = phi.grid;
  const int d = g.axes();
  const double h = g.spacing();
  int base[4];
  double w[4][4];
  for (int a = 0; a < d; ++a) {
    const double s = x[a] / h;
    const double fl = std::floor(s);
    const double t = s - fl;
    base[a] = static_cast<int>(fl) - 1;
    w[a][0] = -t * (t - 1) * (t - 2) / 6.0;
    w[a][1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[a][2] = -(t + 1) * t * (t - 2) / 2.0;
    w[a][3] = (t + 1) * t * (t - 1) / 6.0;
  }
  auto wrap_index = [&](int i) { return ((i % g.res) + g.res) % g.res; };
  double sum = 0.0;
  const int combos = 1 << (2 * d);
  for (int c = 0; c < combos; ++c) {
    std::size_t idx = 0;
    double wt = 1.0;
    for (int a = 0; a < d; ++a) {
      const int o = (c >> (2 * a)) & 3;
      idx = idx * g.res + static_cast<std::size_t>(wrap_index(base[a] + o));
      wt *= w[a][o];
    }
    sum += wt * phi[idx];
  }
  return sum;
}

double sphere_average(const Field& phi, const std::array<double, 4>& z0, double r) {
  if (phi.grid.n == 1) {
    constexpr int m = 64;
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double a = 2.0 * pi * (k + 0.5) / m;
      s += interpolate(phi, {z0[0] + r * std::cos(a), z0[1] + r * std::sin(a), 0.0, 0.0});
    }
    return s / m;
  }
  // Hopf coordinates: z1 = r cos(eta) e^{i a}, z2 = r sin(eta) e^{i b}, with
  // sin^2(eta) uniform for the round measure.
  constexpr int me = 8, ma = 16;
  double s = 0.0;
  for (int e = 0; e < me; ++e) {
    const double u = (e + 0.5) / me;
    const double ce = std::sqrt(1.0 - u), se = std::sqrt(u);
    for (int i = 0; i < ma; ++i) {
      const double a = 2.0 * pi * (i + 0.5) / ma;
      for (int j = 0; j < ma; ++j) {
        const double b = 2.0 * pi * (j + 0.25) / ma;
        s += interpolate(phi, {z0[0] + r * ce * std::cos(a), z0[1] + r * ce * std::sin(a),
                               z0[2] + r * se * std::cos(b), z0[3] + r * se * std::sin(b)});
      }
    }
  }
  return s / (me * ma * ma);
}

LelongFit lelong_fit(const Field& phi, const std::array<double, 4>& z0) {
  const TorusGrid& g = phi.grid;
  LelongFit fit;
  const double r_max = g.period / 16.0 * (1.0 + 1e-12);
  for (double r = 2.0 * g.spacing(); r <= r_max; r *= std::sqrt(2.0)) fit.radii.push_back(r);
  if (fit.radii.size() < 3)
    throw InsufficientResolution("only " + std::to_string(fit.radii.size()) + " radii between 2h and L/16");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.radii.size());
  for (double r : fit.radii) {
    const double avg = sphere_average(phi, z0, r);
    fit.averages.push_back(avg);
    const double x = std::log(r);
    sx += x;
    sy += avg;
    sxx += x * x;
    sxy += x * avg;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

double lelong_estimate(const Field& phi, const std::array<double, 4>& z0) {
  return std::max(0.0, lelong_fit(phi, z0).slope);
}

IntegrabilityResult integrability_threshold(const PotentialSpec& spec, const TorusGrid& grid,
                                            double beta_lo, double beta_hi, int bisections) {
  PotentialSpec s = spec;
  const double c = 0.5 * grid.period + grid.spacing() / 3.0;
  s.z0 = std::array<double, 4>{c, c, grid.n == 2 ? c : 0.0, grid.n == 2 ? c : 0.0};
  std::vector<Field> samples;
  for (int k = 0; k < 3; ++k) samples.push_back(sample_potential(s, TorusGrid::make(grid.n, grid.res << k, grid.period)));

  auto diverges = [&](double beta) {
    double q[3];
    for (int k = 0; k < 3; ++k) {
      Field e = samples[k];
      for (double& v : e.values) v = std::exp(-2.0 * beta * v);
      q[k] = integrate(e);
    }
    return std::abs(q[2] - q[1]) >= std::abs(q[1] - q[0]);
  };

  IntegrabilityResult res;
  double lo = beta_lo, hi = beta_hi;
  if (diverges(lo)) return {lo, 0};
  if (!diverges(hi)) return {hi, 0};
  for (int i = 0; i < bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    (diverges(mid) ? hi : lo) = mid;
    ++res.bisections;
  }
  res.beta = 0.5 * (lo + hi);
  return res;
}

}  // namespace maflow
