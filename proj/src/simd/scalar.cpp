#include <raycam/simd.hpp>

#include <cmath>
#include <limits>

namespace raycam::simd::scalar {

void combine_rays(const CombineRaysArgs& a) {
  for (std::size_t i = 0; i < a.n; ++i) {
    double x = a.base_x[i], y = a.base_y[i], z = a.base_z[i];
    for (std::size_t k = 0; k < a.terms; ++k) {
      const double b = a.basis[k * a.n + i];
      x = x + b * a.coeffs[3 * k + 0];
      y = y + b * a.coeffs[3 * k + 1];
      z = z + b * a.coeffs[3 * k + 2];
    }
    const double norm = std::sqrt((x * x + y * y) + z * z);
    if (norm >= 1e-6) {
      a.out_x[i] = x / norm;
      a.out_y[i] = y / norm;
      a.out_z[i] = z / norm;
      a.valid[i] = 1;
    } else {
      a.out_x[i] = a.out_y[i] = a.out_z[i] = 0.0;
      a.valid[i] = 0;
    }
  }
}

void dot_cross(const DotCrossArgs& a) {
  for (std::size_t i = 0; i < a.n; ++i) {
    const double ax = a.ax[i], ay = a.ay[i], az = a.az[i];
    const double bx = a.bx[i], by = a.by[i], bz = a.bz[i];
    a.dot[i] = (ax * bx + ay * by) + az * bz;
    const double cx = ay * bz - az * by;
    const double cy = az * bx - ax * bz;
    const double cz = ax * by - ay * bx;
    a.cross_norm[i] = std::sqrt((cx * cx + cy * cy) + cz * cz);
  }
}

double pinball(const PinballArgs& a) {
  double acc[4] = {0, 0, 0, 0};
  const double over = a.alpha, under = 1 - a.alpha;
  for (std::size_t i = 0; i < a.n; ++i) {
    const double d = a.diff[i];
    double loss = 0, g = 0;
    if (a.mask[i]) {
      if (d > 0) {
        loss = over * d;
        g = over * a.weight;
      } else {
        loss = under * (0.0 - d);
        g = d < 0 ? (0.0 - under) * a.weight : 0.0;
      }
    }
    a.grad[i] = g;
    acc[i % 4] = acc[i % 4] + loss;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double min_sq_dist(const MinSqDistArgs& a) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.n; ++i) {
    const double dx = a.px[i] - a.qx;
    const double dy = a.py[i] - a.qy;
    const double dz = a.pz[i] - a.qz;
    const double d = (dx * dx + dy * dy) + dz * dz;
    if (d < best) best = d;
  }
  return best;
}

}  // namespace raycam::simd::scalar
