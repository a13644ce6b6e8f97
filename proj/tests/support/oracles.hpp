#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's code paths: plain bisection, brute-force scans and textbook
// formulas.

#include <raycam/camera.hpp>
#include <raycam/fields.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Root of f on [lo, hi] by bisection (f(lo) and f(hi) must differ in sign).
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// theta (1 + k1 theta^2 + k2 theta^4 + ...).
inline double odd_poly(const std::vector<double>& k, double theta) {
  double r = theta, p = theta;
  for (double c : k) {
    p *= theta * theta;
    r += c * p;
  }
  return r;
}

/// Polar angle with odd_poly(k, theta) = r on [0, upper] by bisection.
inline double invert_odd_poly(const std::vector<double>& k, double r, double upper) {
  return bisect([&](double t) { return odd_poly(k, t) - r; }, 0.0, upper);
}

/// First local maximum of odd_poly on (0, limit] by dense scan.
inline double first_peak(const std::vector<double>& k, double limit, int steps = 200000) {
  double prev = odd_poly(k, 0.0);
  for (int i = 1; i <= steps; ++i) {
    const double t = limit * i / steps;
    const double v = odd_poly(k, t);
    if (v < prev) return limit * (i - 1) / steps;
    prev = v;
  }
  return limit;
}

/// Pinhole unprojection by the textbook formula.
inline raycam::Vec3 pinhole_ray(double fx, double fy, double cx, double cy, double u, double v) {
  return raycam::Vec3((u - cx) / fx, (v - cy) / fy, 1.0).normalized();
}

inline double angle_between(const raycam::Vec3& a, const raycam::Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline raycam::CameraModel camera(raycam::Family family, int w, int h,
                                  std::initializer_list<std::pair<const char*, double>> params) {
  raycam::CameraModel cam = raycam::make_camera(family, w, h);
  for (const auto& [name, value] : params) cam.set_param(name, value);
  return cam;
}

/// One representative, moderately distorted camera per family at 640 x 480.
inline std::vector<raycam::CameraModel> zoo(int w = 640, int h = 480) {
  using raycam::Family;
  const double cx = w / 2.0, cy = h / 2.0;
  const double s = w / 640.0;
  return {
      camera(Family::Pinhole, w, h, {{"fx", 500 * s}, {"fy", 500 * s}, {"cx", cx}, {"cy", cy}}),
      camera(Family::KannalaBrandt, w, h,
             {{"fx", 200 * s}, {"fy", 200 * s}, {"cx", cx}, {"cy", cy}, {"k1", -0.013}, {"k2", -0.003},
              {"k3", 0.001}, {"k4", -0.0002}}),
      camera(Family::UCM, w, h, {{"fx", 300 * s}, {"fy", 300 * s}, {"cx", cx}, {"cy", cy}, {"xi", 0.8}}),
      camera(Family::EUCM, w, h,
             {{"fx", 300 * s}, {"fy", 300 * s}, {"cx", cx}, {"cy", cy}, {"alpha", 0.6}, {"beta", 1.1}}),
      camera(Family::DoubleSphere, w, h,
             {{"fx", 300 * s}, {"fy", 300 * s}, {"cx", cx}, {"cy", cy}, {"xi", -0.2}, {"alpha", 0.6}}),
      camera(Family::Mei, w, h,
             {{"fx", 400 * s}, {"fy", 400 * s}, {"cx", cx}, {"cy", cy}, {"xi", 0.9}, {"k1", -0.1}, {"k2", 0.01},
              {"t1", 0.001}, {"t2", -0.001}}),
      camera(Family::Fisheye624, w, h,
             {{"fx", 250 * s}, {"fy", 250 * s}, {"cx", cx}, {"cy", cy}, {"k1", -0.03}, {"k2", 0.005},
              {"k3", -0.001}, {"t1", 0.001}, {"t2", -0.0005}, {"s1", 0.001}, {"s3", -0.001}}),
      camera(Family::Equirectangular, w, h, {{"hfov", 2 * kPi}, {"vfov", kPi}}),
  };
}

}  // namespace oracle
