#pragma once

// Parametric camera models. Each model maps a 3D point in the camera frame
// (+z optical axis, +x right, +y down) to a continuous pixel coordinate where
// integer pixel (u, v) covers [u, u+1) x [v, v+1) and is sampled at its
// center (u + 0.5, v + 0.5).

#include <raycam/fields.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace raycam {

struct Pinhole {
  double fx = 1, fy = 1, cx = 0, cy = 0;
};

/// Equidistant fisheye with odd polynomial r(theta) = theta (1 + k1 theta^2 + ... + k4 theta^8).
struct KannalaBrandt {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  std::array<double, 4> k{};
};

/// Unified camera model, xi form: m = (x, y) / (z + xi |X|).
struct UCM {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  double xi = 0;
};

/// Enhanced unified camera model: m = (x, y) / (alpha rho + (1 - alpha) z),
/// rho = sqrt(beta (x^2 + y^2) + z^2).
struct EUCM {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  double alpha = 0;
  double beta = 1;
};

struct DoubleSphere {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  double xi = 0;
  double alpha = 0;
};

/// UCM followed by radial-tangential distortion on the normalized plane.
struct Mei {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  double xi = 0;
  double k1 = 0, k2 = 0;
  double t1 = 0, t2 = 0;
};

/// Six odd radial terms on the polar angle, then tangential (t1, t2) and
/// thin-prism (s1..s4) terms applied to the radially distorted coordinates.
struct Fisheye624 {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  std::array<double, 6> k{};
  std::array<double, 2> t{};
  std::array<double, 4> s{};
};

/// Longitude/latitude grid centered on the optical axis.
struct Equirectangular {
  double hfov = 0;
  double vfov = 0;
};

using Projection = std::variant<Pinhole, KannalaBrandt, UCM, EUCM, DoubleSphere, Mei, Fisheye624, Equirectangular>;

enum class Family { Pinhole, KannalaBrandt, UCM, EUCM, DoubleSphere, Mei, Fisheye624, Equirectangular };

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::Pinhole, Family::KannalaBrandt, Family::UCM,        Family::EUCM,
    Family::DoubleSphere, Family::Mei,      Family::Fisheye624, Family::Equirectangular};

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);  // throws Error(Input) on unknown names

/// True for models whose unprojection needs an iterative solve.
bool is_iterative(Family f);

struct CameraModel {
  int width = 1;
  int height = 1;
  Projection model = Pinhole{};

  Family family() const { return static_cast<Family>(model.index()); }
  GridSize grid() const { return {width, height}; }

  /// Throws Error(Input) when an invariant does not hold.
  void validate() const;

  /// Named parameters in canonical order ("fx", "fy", ..., "k1", ...).
  std::vector<std::pair<std::string, double>> params() const;
  std::optional<double> param(std::string_view name) const;
  /// Throws Error(Input) if the family has no such parameter.
  void set_param(std::string_view name, double value);

  bool operator==(const CameraModel& other) const;
};

/// Default-parameter camera of the given family (identity distortion).
CameraModel make_camera(Family family, int width, int height);

/// Canonical parameter names of a family.
std::vector<std::string> param_names(Family family);

/// Off-image points keep their computed pixel with valid = false; points the
/// model cannot represent get (-1, -1).
struct ProjectedPoint {
  Vec2 pixel{-1.0, -1.0};
  bool valid = false;
};

struct UnprojectedRay {
  Vec3 ray{0.0, 0.0, 0.0};
  bool valid = false;
};

/// Precomputed per-camera state (polynomial limits) for repeated calls.
/// Immutable after construction and safe to share across threads.
class Projector {
 public:
  explicit Projector(CameraModel camera);

  const CameraModel& camera() const { return camera_; }

  /// Continuous pixel of a 3D point; nullopt outside the representable field
  /// of view or off the image.
  std::optional<Vec2> project(const Vec3& point) const;
  /// Same without the image-bounds check.
  std::optional<Vec2> project_unbounded(const Vec3& point) const;

  /// Unit ray through a continuous pixel; nullopt when the pixel lies outside
  /// the model's field of view or the inverse solve fails.
  std::optional<Vec3> unproject(const Vec2& pixel) const;

  /// Largest representable polar angle for the polynomial models, in radians.
  double max_theta() const { return max_theta_; }

 private:
  CameraModel camera_;
  double max_theta_ = 0;   // radial polynomial monotone on [0, max_theta_]
  double max_radius_ = 0;  // polynomial value at max_theta_
};

std::vector<ProjectedPoint> project(const CameraModel& camera, std::span<const Vec3> points);
std::vector<UnprojectedRay> unproject(const CameraModel& camera, std::span<const Vec2> pixels);

/// Unprojects every pixel center.
RayField ray_field(const CameraModel& camera);

namespace detail {

/// r(x) = x (1 + c1 x^2 + c2 x^4 + ...). Solves r(x) = target on
/// [0, upper] with safeguarded Newton and bisection fallback.
struct OddPolynomial {
  std::vector<double> coeffs;

  double eval(double x) const;
  double derivative(double x) const;
  /// First stationary point of r on (0, upper], or upper when r is monotone there.
  double first_stationary(double upper) const;
  /// Returns nullopt when the target is not reached on [0, upper] or the
  /// solve does not reach |r(x) - target| < 1e-10 within 50 iterations.
  std::optional<double> invert(double target, double upper) const;
};

}  // namespace detail

}  // namespace raycam
