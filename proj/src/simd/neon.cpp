#include <raycam/simd.hpp>

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace raycam::simd::neon {

void combine_rays(const CombineRaysArgs& a) {
  const std::size_t n = a.n;
  const float64x2_t threshold = vdupq_n_f64(1e-6);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t x = vld1q_f64(a.base_x + i);
    float64x2_t y = vld1q_f64(a.base_y + i);
    float64x2_t z = vld1q_f64(a.base_z + i);
    for (std::size_t k = 0; k < a.terms; ++k) {
      const float64x2_t b = vld1q_f64(a.basis + k * n + i);
      x = vaddq_f64(x, vmulq_f64(b, vdupq_n_f64(a.coeffs[3 * k + 0])));
      y = vaddq_f64(y, vmulq_f64(b, vdupq_n_f64(a.coeffs[3 * k + 1])));
      z = vaddq_f64(z, vmulq_f64(b, vdupq_n_f64(a.coeffs[3 * k + 2])));
    }
    const float64x2_t norm =
        vsqrtq_f64(vaddq_f64(vaddq_f64(vmulq_f64(x, x), vmulq_f64(y, y)), vmulq_f64(z, z)));
    const uint64x2_t ok = vcgeq_f64(norm, threshold);
    vst1q_f64(a.out_x + i, vbslq_f64(ok, vdivq_f64(x, norm), zero));
    vst1q_f64(a.out_y + i, vbslq_f64(ok, vdivq_f64(y, norm), zero));
    vst1q_f64(a.out_z + i, vbslq_f64(ok, vdivq_f64(z, norm), zero));
    a.valid[i] = vgetq_lane_u64(ok, 0) ? 1 : 0;
    a.valid[i + 1] = vgetq_lane_u64(ok, 1) ? 1 : 0;
  }
  for (; i < n; ++i) {
    double x = a.base_x[i], y = a.base_y[i], z = a.base_z[i];
    for (std::size_t k = 0; k < a.terms; ++k) {
      const double b = a.basis[k * n + i];
      x = x + b * a.coeffs[3 * k + 0];
      y = y + b * a.coeffs[3 * k + 1];
      z = z + b * a.coeffs[3 * k + 2];
    }
    const double norm = std::sqrt((x * x + y * y) + z * z);
    const bool ok = norm >= 1e-6;
    a.out_x[i] = ok ? x / norm : 0.0;
    a.out_y[i] = ok ? y / norm : 0.0;
    a.out_z[i] = ok ? z / norm : 0.0;
    a.valid[i] = ok ? 1 : 0;
  }
}

void dot_cross(const DotCrossArgs& a) {
  std::size_t i = 0;
  for (; i + 2 <= a.n; i += 2) {
    const float64x2_t ax = vld1q_f64(a.ax + i), ay = vld1q_f64(a.ay + i), az = vld1q_f64(a.az + i);
    const float64x2_t bx = vld1q_f64(a.bx + i), by = vld1q_f64(a.by + i), bz = vld1q_f64(a.bz + i);
    vst1q_f64(a.dot + i, vaddq_f64(vaddq_f64(vmulq_f64(ax, bx), vmulq_f64(ay, by)), vmulq_f64(az, bz)));
    const float64x2_t cx = vsubq_f64(vmulq_f64(ay, bz), vmulq_f64(az, by));
    const float64x2_t cy = vsubq_f64(vmulq_f64(az, bx), vmulq_f64(ax, bz));
    const float64x2_t cz = vsubq_f64(vmulq_f64(ax, by), vmulq_f64(ay, bx));
    vst1q_f64(a.cross_norm + i,
              vsqrtq_f64(vaddq_f64(vaddq_f64(vmulq_f64(cx, cx), vmulq_f64(cy, cy)), vmulq_f64(cz, cz))));
  }
  if (i < a.n) {
    DotCrossArgs tail = a;
    tail.n = a.n - i;
    tail.ax += i;
    tail.ay += i;
    tail.az += i;
    tail.bx += i;
    tail.by += i;
    tail.bz += i;
    tail.dot += i;
    tail.cross_norm += i;
    scalar::dot_cross(tail);
  }
}

// Two registers give the same four interleaved partial sums as the scalar path.
double pinball(const PinballArgs& a) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t over = vdupq_n_f64(a.alpha);
  const float64x2_t under = vdupq_n_f64(1 - a.alpha);
  const float64x2_t g_over = vdupq_n_f64(a.alpha * a.weight);
  const float64x2_t g_under = vdupq_n_f64((0.0 - (1 - a.alpha)) * a.weight);
  float64x2_t acc[2] = {zero, zero};
  std::size_t i = 0;
  for (; i + 4 <= a.n; i += 4) {
    for (int h = 0; h < 2; ++h) {
      const std::size_t j = i + 2 * h;
      const float64x2_t d = vld1q_f64(a.diff + j);
      const uint64_t m0 = a.mask[j] ? ~0ull : 0ull, m1 = a.mask[j + 1] ? ~0ull : 0ull;
      const uint64x2_t on = vcombine_u64(vcreate_u64(m0), vcreate_u64(m1));
      const uint64x2_t pos = vcgtq_f64(d, zero);
      const uint64x2_t neg = vcltq_f64(d, zero);
      const float64x2_t loss_pos = vmulq_f64(over, d);
      const float64x2_t loss_neg = vmulq_f64(under, vsubq_f64(zero, d));
      const float64x2_t loss = vbslq_f64(on, vbslq_f64(pos, loss_pos, loss_neg), zero);
      const float64x2_t grad = vbslq_f64(on, vbslq_f64(pos, g_over, vbslq_f64(neg, g_under, zero)), zero);
      vst1q_f64(a.grad + j, grad);
      acc[h] = vaddq_f64(acc[h], loss);
    }
  }
  double lanes[4] = {vgetq_lane_f64(acc[0], 0), vgetq_lane_f64(acc[0], 1), vgetq_lane_f64(acc[1], 0),
                     vgetq_lane_f64(acc[1], 1)};
  const double over_s = a.alpha, under_s = 1 - a.alpha;
  for (; i < a.n; ++i) {
    const double d = a.diff[i];
    double loss = 0, g = 0;
    if (a.mask[i]) {
      if (d > 0) {
        loss = over_s * d;
        g = over_s * a.weight;
      } else {
        loss = under_s * (0.0 - d);
        g = d < 0 ? (0.0 - under_s) * a.weight : 0.0;
      }
    }
    a.grad[i] = g;
    lanes[i % 4] = lanes[i % 4] + loss;
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double min_sq_dist(const MinSqDistArgs& a) {
  const float64x2_t qx = vdupq_n_f64(a.qx), qy = vdupq_n_f64(a.qy), qz = vdupq_n_f64(a.qz);
  float64x2_t best = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= a.n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(a.px + i), qx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(a.py + i), qy);
    const float64x2_t dz = vsubq_f64(vld1q_f64(a.pz + i), qz);
    best = vminq_f64(best, vaddq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)), vmulq_f64(dz, dz)));
  }
  double out = std::min(vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1));
  for (; i < a.n; ++i) {
    const double dx = a.px[i] - a.qx;
    const double dy = a.py[i] - a.qy;
    const double dz = a.pz[i] - a.qz;
    const double d = (dx * dx + dy * dy) + dz * dz;
    if (d < out) out = d;
  }
  return out;
}

}  // namespace raycam::simd::neon

#endif
