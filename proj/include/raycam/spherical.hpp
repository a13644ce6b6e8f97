#pragma once

// Fully spherical output space: (theta, phi, radius) per pixel and the
// conversions to perpendicular depth and Cartesian points.

#include <raycam/fields.hpp>

namespace raycam {

/// Rays with |cos theta| at or below this are treated as lying in the xy-plane.
inline constexpr double kPlaneCosCutoff = 1e-6;

/// theta from +z in [0, pi], phi = atan2(y, x) folded into (-pi, pi].
AngularField angles_from_rays(const RayField& rays);
RayField rays_from_angles(const AngularField& angles);

/// point = r (sin theta cos phi, sin theta sin phi, cos theta) for pixels valid
/// in both inputs. Throws Error(Shape) on size mismatch.
PointCloud spherical_to_cartesian(const AngularField& angles, const RadiusMap& radius);

/// Same, directly from unit rays.
PointCloud rays_to_points(const RayField& rays, const RadiusMap& radius);

struct SphericalGrid {
  AngularField angles;
  RadiusMap radius;
};

/// Inverse of spherical_to_cartesian. Points are assigned to grid pixels by
/// pc.pixels, or in order when pc.pixels is empty. Throws Error(Input)
/// "origin point" for a zero-norm point, Error(Shape) when the assignment
/// does not fit the grid.
SphericalGrid cartesian_to_spherical(const PointCloud& pc, GridSize grid);

/// r = z / cos theta. Pixels with cos theta <= 1e-6 become invalid.
RadiusMap depth_to_radius(const DepthMap& depth, const RayField& rays);

/// z = r cos theta. Stays valid for every ray; depth may be <= 0.
DepthMap radius_to_depth(const RadiusMap& radius, const RayField& rays);

}  // namespace raycam
