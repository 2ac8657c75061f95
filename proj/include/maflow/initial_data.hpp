#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

/// amp * cos(2 pi m.x / L) or amp * sin(2 pi m.x / L); m has one integer per
/// real axis (x1, y1, x2, y2), unused axes ignored.
struct Mode {
  double amp = 0.0;
  bool sine = false;
  std::array<int, 4> m{0, 0, 0, 0};
};

Field modes_field(const std::vector<Mode>& modes, const TorusGrid& grid);

/// Periodized log|z| on C/(L Z + i L Z), normalized so G(z) = log|z| + O(|z|^2)
/// at 0, built from the Jacobi theta function theta_1 with nome e^-pi.
/// H(G) = (pi/2) delta_0 - pi / (2 L^2).
double log_distance_1d(double x, double y, double period);

/// n = 1: G(z - z0). n = 2: (1/2) log(exp 2G(z1 - z01) + exp 2G(z2 - z02)),
/// which satisfies H >= -pi/(2 L^2) I away from z0 and equals log|z - z0| to
/// second order.
double log_distance(const std::array<double, 4>& z, const std::array<double, 4>& z0, int n,
                    double period);

/// Supremum of log_distance over the torus, from a fixed reference mesh.
double log_distance_sup(int n, double period);

enum class PotentialKind { Smooth, Lelong, ZeroLelongUnbounded, BoundedDiscontinuous, FiniteEnergy, FromFile };

std::string to_string(PotentialKind k);
PotentialKind potential_kind_from_string(const std::string& s);

/// Initial potential description.
///
///   Smooth                 sum of `modes`
///   Lelong                 gamma * D
///   ZeroLelongUnbounded    -(K0 - D)^a,  K0 = 1 + sup D, 0 < a < 1
///   FiniteEnergy           same model with a < n/(n+1)
///   BoundedDiscontinuous   max(gamma * D, -depth + sum of `modes`)
///   FromFile               snapshot at `path`
///
/// D is log_distance to the singular point z0. The default z0 is the torus
/// centre shifted by half a cell on every axis, so it is never a grid node.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Smooth;
  std::vector<Mode> modes;
  double gamma = 1.0;
  double exponent = 0.5;
  double depth = 4.0;
  std::optional<std::array<double, 4>> z0;
  std::string path;
  double clip_floor = -1e6;

  static PotentialSpec smooth(std::vector<Mode> modes);
  static PotentialSpec lelong(double gamma);
  static PotentialSpec zero_lelong(double a);
  static PotentialSpec finite_energy(double a);
  static PotentialSpec bounded_discontinuous(double gamma, double depth, std::vector<Mode> modes = {});
  static PotentialSpec from_file(std::string path);

  bool bounded() const;
  bool singular() const;

  /// Throws InvalidSpec when the parameters are out of range for `grid`.
  void validate(const TorusGrid& grid) const;
  std::array<double, 4> singular_point(const TorusGrid& grid) const;
};

/// Deterministic sample of the spec on `grid`, clipped at spec.clip_floor.
Field sample_potential(const PotentialSpec& spec, const TorusGrid& grid);

struct ApproximationLevel {
  int j = 0;
  double delta = 0.0;
  double min_eig = 0.0;
  Field phi;
};

/// Decreasing smooth approximants phi_{0,j}, j = 1..J:
///   heat(max(phi0, -j K), delta_j^2 / 2) + C delta_j^2,
/// with delta_J = 2 h and delta_j = sqrt(2) delta_{j+1}. Smooth specs skip
/// truncation and smoothing.
struct ApproximationSequence {
  PotentialSpec spec;
  TorusGrid grid;
  double K = 1.0;
  double C = 0.0;
  Field phi0;
  std::vector<ApproximationLevel> levels;
};

ApproximationSequence approximation_sequence(const PotentialSpec& spec, const TorusGrid& grid,
                                             int J, double K = 1.0);

/// Circle (n = 1) or sphere (n = 2) averages of phi around z0 against log r.
struct LelongFit {
  std::vector<double> radii;
  std::vector<double> averages;
  double slope = 0.0;
};

/// Radii 2h * sqrt(2)^k up to period/16; InsufficientResolution below 3.
LelongFit lelong_fit(const Field& phi, const std::array<double, 4>& z0);
/// Least-squares slope of lelong_fit, clamped at 0.
double lelong_estimate(const Field& phi, const std::array<double, 4>& z0);

/// Spherical mean of phi over |z - z0| = r using periodic cubic interpolation.
double sphere_average(const Field& phi, const std::array<double, 4>& z0, double r);
double interpolate(const Field& phi, const std::array<double, 4>& x);

/// Largest beta for which the quadrature of exp(-2 beta phi0) stays bounded
/// as res doubles twice from `grid.res`; found by bisection on
/// [beta_lo, beta_hi]. The singular point is moved a third of a cell off the
/// nodes so every refinement sees the same local node pattern.
struct IntegrabilityResult {
  double beta = 0.0;
  int bisections = 0;
};
IntegrabilityResult integrability_threshold(const PotentialSpec& spec, const TorusGrid& grid,
                                            double beta_lo, double beta_hi, int bisections = 30);

}  // namespace maflow
