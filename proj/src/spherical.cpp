#include <raycam/spherical.hpp>

#include <raycam/error.hpp>

#include <cmath>
#include <numbers>

namespace raycam {

namespace {

void require_same(GridSize a, GridSize b, const char* what) {
  if (!(a == b))
    fail(ErrorKind::Shape, std::string(what) + ": grid " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                               " does not match " + std::to_string(b.width) + "x" + std::to_string(b.height));
}

double fold_azimuth(double phi) { return phi <= -std::numbers::pi ? std::numbers::pi : phi; }

}  // namespace

AngularField angles_from_rays(const RayField& rays) {
  AngularField out(rays.width, rays.height);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!rays.valid[i]) continue;
    out.theta[i] = std::atan2(std::hypot(rays.x[i], rays.y[i]), rays.z[i]);
    out.phi[i] = fold_azimuth(std::atan2(rays.y[i], rays.x[i]));
    out.valid[i] = 1;
  }
  return out;
}

RayField rays_from_angles(const AngularField& angles) {
  RayField out(angles.width, angles.height);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!angles.valid[i]) continue;
    const double st = std::sin(angles.theta[i]);
    out.set(i, Vec3(st * std::cos(angles.phi[i]), st * std::sin(angles.phi[i]), std::cos(angles.theta[i])));
    out.valid[i] = 1;
  }
  return out;
}

PointCloud spherical_to_cartesian(const AngularField& angles, const RadiusMap& radius) {
  require_same(angles.grid(), radius.grid(), "spherical_to_cartesian");
  PointCloud pc;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!angles.valid[i] || !radius.valid[i]) continue;
    const double r = radius.values[i];
    const double st = std::sin(angles.theta[i]);
    pc.points.emplace_back(r * st * std::cos(angles.phi[i]), r * st * std::sin(angles.phi[i]),
                           r * std::cos(angles.theta[i]));
    pc.pixels.push_back(i);
  }
  return pc;
}

PointCloud rays_to_points(const RayField& rays, const RadiusMap& radius) {
  require_same(rays.grid(), radius.grid(), "rays_to_points");
  PointCloud pc;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!rays.valid[i] || !radius.valid[i]) continue;
    pc.points.push_back(rays.dir(i) * radius.values[i]);
    pc.pixels.push_back(i);
  }
  return pc;
}

SphericalGrid cartesian_to_spherical(const PointCloud& pc, GridSize grid) {
  if (!pc.pixels.empty() && pc.pixels.size() != pc.points.size())
    fail(ErrorKind::Shape, "point cloud pixel assignment has the wrong length");
  if (pc.pixels.empty() && pc.points.size() != grid.count())
    fail(ErrorKind::Shape, "point cloud without pixel assignment must fill the grid");

  SphericalGrid out{AngularField(grid.width, grid.height), RadiusMap(grid.width, grid.height)};
  for (std::size_t j = 0; j < pc.points.size(); ++j) {
    const std::size_t i = pc.pixels.empty() ? j : pc.pixels[j];
    if (i >= grid.count()) fail(ErrorKind::Shape, "point assigned outside the grid");
    const Vec3& p = pc.points[j];
    if (!p.allFinite()) fail(ErrorKind::Input, "non-finite point");
    const double r = p.norm();
    if (!(r > 0)) fail(ErrorKind::Input, "origin point");
    out.radius.values[i] = r;
    out.radius.valid[i] = 1;
    out.angles.theta[i] = std::atan2(std::hypot(p.x(), p.y()), p.z());
    out.angles.phi[i] = fold_azimuth(std::atan2(p.y(), p.x()));
    out.angles.valid[i] = 1;
  }
  return out;
}

RadiusMap depth_to_radius(const DepthMap& depth, const RayField& rays) {
  require_same(depth.grid(), rays.grid(), "depth_to_radius");
  RadiusMap out(depth.width, depth.height);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid[i] || !rays.valid[i]) continue;
    const double c = rays.z[i];
    if (!(c > kPlaneCosCutoff)) continue;
    out.values[i] = depth.values[i] / c;
    out.valid[i] = 1;
  }
  return out;
}

DepthMap radius_to_depth(const RadiusMap& radius, const RayField& rays) {
  require_same(radius.grid(), rays.grid(), "radius_to_depth");
  DepthMap out(radius.width, radius.height);
  for (std::size_t i = 0; i < radius.size(); ++i) {
    if (!radius.valid[i] || !rays.valid[i]) continue;
    out.values[i] = radius.values[i] * rays.z[i];
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace raycam
