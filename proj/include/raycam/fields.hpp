#pragma once

// Dense per-pixel tensors shared by every module. All grids are row-major,
// index = v * width + u, and keep a byte mask (1 = valid).

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace raycam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mask = std::vector<std::uint8_t>;

struct GridSize {
  int width = 0;
  int height = 0;

  std::size_t count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool operator==(const GridSize&) const = default;
};

/// Per-pixel unit viewing directions, stored as three planes so that the
/// SIMD kernels can stream them. Camera looks along +z, +x right, +y down.
struct RayField {
  int width = 0;
  int height = 0;
  std::vector<double> x, y, z;
  Mask valid;

  RayField() = default;
  RayField(int w, int h)
      : width(w), height(h), x(size(), 0.0), y(size(), 0.0), z(size(), 0.0), valid(size(), 0) {}

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  GridSize grid() const { return {width, height}; }
  Vec3 dir(std::size_t i) const { return {x[i], y[i], z[i]}; }
  void set(std::size_t i, const Vec3& d) {
    x[i] = d.x();
    y[i] = d.y();
    z[i] = d.z();
  }
  std::size_t valid_count() const;
};

/// Spherical angles per pixel: theta is the polar angle from +z in [0, pi],
/// phi the azimuth in (-pi, pi].
struct AngularField {
  int width = 0;
  int height = 0;
  std::vector<double> theta, phi;
  Mask valid;

  AngularField() = default;
  AngularField(int w, int h)
      : width(w), height(h), theta(size(), 0.0), phi(size(), 0.0), valid(size(), 0) {}

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  GridSize grid() const { return {width, height}; }
};

/// Scalar image with a validity mask.
struct ScalarMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  Mask valid;

  ScalarMap() = default;
  ScalarMap(int w, int h) : width(w), height(h), values(size(), 0.0), valid(size(), 0) {}

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  GridSize grid() const { return {width, height}; }
};

/// Euclidean distance from the camera center, meters.
struct RadiusMap : ScalarMap {
  using ScalarMap::ScalarMap;
};

/// Perpendicular depth along +z, meters. May be <= 0 for rays behind the
/// image plane when produced from a radius map.
struct DepthMap : ScalarMap {
  using ScalarMap::ScalarMap;
};

/// Inverse confidence, strictly positive.
struct ConfidenceMap {
  int width = 0;
  int height = 0;
  std::vector<double> sigma;
};

struct PointCloud {
  std::vector<Vec3> points;
  // Source pixel index per point, when the cloud was produced from a grid.
  std::vector<std::size_t> pixels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace raycam
