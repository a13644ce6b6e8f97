#pragma once

// Spherical-harmonics camera representation. A pencil of rays is written as
// an equiangular base grid (pole + horizontal FoV, square pixels) plus a
// residual expanded in real spherical harmonics of the base-grid angles,
// without the constant term:
//
//   ray(u, v) = normalize(base(u, v) + sum_k Y_k(theta_b, phi_b) * H_k),  H_k in R^3.

#include <raycam/fields.hpp>

#include <array>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace raycam {

struct SHDomain {
  double cx = 0;    // pole, pixels
  double cy = 0;
  double hfov = 0;  // radians
  int width = 1;
  int height = 1;

  /// Always derived from hfov with square pixels.
  double vfov() const { return hfov * height / width; }
  GridSize grid() const { return {width, height}; }

  /// Throws Error(Input) if hfov is outside (0, 2pi], vfov exceeds pi, or the
  /// pole lies outside [0, width] x [0, height].
  void validate() const;
  bool operator==(const SHDomain&) const = default;
};

/// Real SH indices (l, m) for l = 1..degree, m = -l..l.
class SHBasis {
 public:
  /// Throws Error(Input) "degree must be >= 1".
  explicit SHBasis(int degree);

  int degree() const { return degree_; }
  std::size_t count() const { return terms_.size(); }
  const std::vector<std::pair<int, int>>& terms() const { return terms_; }
  /// Position of (l, m) in the ordering.
  static std::size_t index_of(int l, int m) { return static_cast<std::size_t>(l * l - 1 + (m + l)); }

 private:
  int degree_;
  std::vector<std::pair<int, int>> terms_;
};

/// Orthonormal real spherical harmonic Y_lm(theta, phi); m > 0 uses cos(m phi),
/// m < 0 uses sin(|m| phi). No Condon-Shortley phase.
double real_sh(int l, int m, double theta, double phi);

/// All basis functions at one direction. Throws Error(Input) "angle out of
/// range" when theta is outside [0, pi].
std::vector<double> eval_basis(const SHBasis& basis, double theta, double phi);

/// Basis values per pixel, stored as count() planes of angles.size() values.
/// Invalid pixels get zeros.
std::vector<double> eval_basis(const SHBasis& basis, const AngularField& angles);

enum class ChannelMode {
  PerChannel,  // independent coefficient per ray component (K x 3 unknowns)
  Tied,        // one coefficient per harmonic shared by all three components
};

struct SHCoefficients {
  int degree = 3;
  SHDomain domain;
  std::vector<std::array<double, 3>> coeffs;  // one row per basis function
  ChannelMode mode = ChannelMode::PerChannel;

  /// K * channels + 3 domain scalars.
  std::size_t parameter_count() const;
  void validate() const;
};

/// Base ray at a continuous pixel coordinate.
Vec3 base_ray(const SHDomain& domain, double u, double v);

/// Spherical angles of the base ray at every pixel center.
AngularField base_grid(const SHDomain& domain);

/// Base rays and basis planes for one (domain, degree). Immutable once built.
struct SHTable {
  SHDomain domain;
  int degree = 0;
  RayField base;
  std::vector<double> basis;  // terms planes of base.size() values
  std::size_t terms = 0;
};

SHTable make_sh_table(const SHDomain& domain, int degree);

/// Shared, lazily populated cache of tables keyed by (domain, degree).
std::shared_ptr<const SHTable> cached_sh_table(const SHDomain& domain, int degree);

RayField reconstruct(const SHTable& table, const std::vector<std::array<double, 3>>& coeffs);
RayField reconstruct(const SHCoefficients& h);

struct FitResult {
  SHCoefficients coeffs;
  double residual_rms = 0;        // RMS of |base + sum Y H - target| over valid pixels
  double mean_angular_error = 0;  // radians, reconstruct(coeffs) vs target
  double max_angular_error = 0;
  std::size_t valid_pixels = 0;
  std::size_t rank = 0;
};

/// Least-squares coefficients for a target ray field over its valid pixels.
/// Throws Error(Shape) when the domain size differs from the target and
/// Error(Numerical) "underdetermined fit" with fewer than K valid pixels.
FitResult fit_coeffs(const RayField& target, const SHDomain& domain, int degree,
                     ChannelMode mode = ChannelMode::PerChannel);

/// Pole from the sub-pixel maximum of the ray z-component and horizontal FoV
/// from the outermost valid pixels on the pole row. Throws Error(Numerical)
/// "pole not found" when no valid pixel looks forward.
SHDomain estimate_domain(const RayField& target);

/// Mean and max angle between corresponding valid rays of two fields.
std::pair<double, double> angular_error_stats(const RayField& a, const RayField& b);

}  // namespace raycam
