// Compiled with -mavx2 (and without FMA contraction) so that every lane
// reproduces the scalar reference bit for bit.

#include <raycam/simd.hpp>

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace raycam::simd::avx2 {

void combine_rays(const CombineRaysArgs& a) {
  const std::size_t n = a.n;
  const __m256d threshold = _mm256_set1_pd(1e-6);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(a.base_x + i);
    __m256d y = _mm256_loadu_pd(a.base_y + i);
    __m256d z = _mm256_loadu_pd(a.base_z + i);
    for (std::size_t k = 0; k < a.terms; ++k) {
      const __m256d b = _mm256_loadu_pd(a.basis + k * n + i);
      x = _mm256_add_pd(x, _mm256_mul_pd(b, _mm256_set1_pd(a.coeffs[3 * k + 0])));
      y = _mm256_add_pd(y, _mm256_mul_pd(b, _mm256_set1_pd(a.coeffs[3 * k + 1])));
      z = _mm256_add_pd(z, _mm256_mul_pd(b, _mm256_set1_pd(a.coeffs[3 * k + 2])));
    }
    const __m256d sq = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)), _mm256_mul_pd(z, z));
    const __m256d norm = _mm256_sqrt_pd(sq);
    const __m256d ok = _mm256_cmp_pd(norm, threshold, _CMP_GE_OQ);
    _mm256_storeu_pd(a.out_x + i, _mm256_blendv_pd(zero, _mm256_div_pd(x, norm), ok));
    _mm256_storeu_pd(a.out_y + i, _mm256_blendv_pd(zero, _mm256_div_pd(y, norm), ok));
    _mm256_storeu_pd(a.out_z + i, _mm256_blendv_pd(zero, _mm256_div_pd(z, norm), ok));
    const int bits = _mm256_movemask_pd(ok);
    for (int j = 0; j < 4; ++j) a.valid[i + j] = static_cast<std::uint8_t>((bits >> j) & 1);
  }
  if (i < n) {
    for (std::size_t idx = i; idx < n; ++idx) {
      double x = a.base_x[idx], y = a.base_y[idx], z = a.base_z[idx];
      for (std::size_t k = 0; k < a.terms; ++k) {
        const double b = a.basis[k * n + idx];
        x = x + b * a.coeffs[3 * k + 0];
        y = y + b * a.coeffs[3 * k + 1];
        z = z + b * a.coeffs[3 * k + 2];
      }
      const double norm = std::sqrt((x * x + y * y) + z * z);
      const bool ok = norm >= 1e-6;
      a.out_x[idx] = ok ? x / norm : 0.0;
      a.out_y[idx] = ok ? y / norm : 0.0;
      a.out_z[idx] = ok ? z / norm : 0.0;
      a.valid[idx] = ok ? 1 : 0;
    }
  }
}

void dot_cross(const DotCrossArgs& a) {
  std::size_t i = 0;
  for (; i + 4 <= a.n; i += 4) {
    const __m256d ax = _mm256_loadu_pd(a.ax + i), ay = _mm256_loadu_pd(a.ay + i), az = _mm256_loadu_pd(a.az + i);
    const __m256d bx = _mm256_loadu_pd(a.bx + i), by = _mm256_loadu_pd(a.by + i), bz = _mm256_loadu_pd(a.bz + i);
    const __m256d dot =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)), _mm256_mul_pd(az, bz));
    const __m256d cx = _mm256_sub_pd(_mm256_mul_pd(ay, bz), _mm256_mul_pd(az, by));
    const __m256d cy = _mm256_sub_pd(_mm256_mul_pd(az, bx), _mm256_mul_pd(ax, bz));
    const __m256d cz = _mm256_sub_pd(_mm256_mul_pd(ax, by), _mm256_mul_pd(ay, bx));
    const __m256d cn = _mm256_sqrt_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(cx, cx), _mm256_mul_pd(cy, cy)), _mm256_mul_pd(cz, cz)));
    _mm256_storeu_pd(a.dot + i, dot);
    _mm256_storeu_pd(a.cross_norm + i, cn);
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

double pinball(const PinballArgs& a) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d over = _mm256_set1_pd(a.alpha);
  const __m256d under = _mm256_set1_pd(1 - a.alpha);
  const __m256d g_over = _mm256_set1_pd(a.alpha * a.weight);
  const __m256d g_under = _mm256_set1_pd((0.0 - (1 - a.alpha)) * a.weight);
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= a.n; i += 4) {
    const __m256d d = _mm256_loadu_pd(a.diff + i);
    std::uint32_t m4;
    __builtin_memcpy(&m4, a.mask + i, 4);
    const __m256i m64 = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(m4)));
    const __m256d on = _mm256_castsi256_pd(_mm256_cmpgt_epi64(m64, _mm256_setzero_si256()));
    const __m256d pos = _mm256_cmp_pd(d, zero, _CMP_GT_OQ);
    const __m256d neg = _mm256_cmp_pd(d, zero, _CMP_LT_OQ);
    const __m256d loss_pos = _mm256_mul_pd(over, d);
    const __m256d loss_neg = _mm256_mul_pd(under, _mm256_sub_pd(zero, d));
    const __m256d loss = _mm256_and_pd(on, _mm256_blendv_pd(loss_neg, loss_pos, pos));
    const __m256d grad = _mm256_and_pd(
        on, _mm256_or_pd(_mm256_and_pd(pos, g_over), _mm256_and_pd(neg, g_under)));
    _mm256_storeu_pd(a.grad + i, grad);
    acc = _mm256_add_pd(acc, loss);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
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
  const __m256d qx = _mm256_set1_pd(a.qx), qy = _mm256_set1_pd(a.qy), qz = _mm256_set1_pd(a.qz);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= a.n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(a.px + i), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(a.py + i), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(a.pz + i), qz);
    const __m256d d =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    best = _mm256_min_pd(best, d);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double out = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  for (; i < a.n; ++i) {
    const double dx = a.px[i] - a.qx;
    const double dy = a.py[i] - a.qy;
    const double dz = a.pz[i] - a.qz;
    const double d = (dx * dx + dy * dy) + dz * dz;
    if (d < out) out = d;
  }
  return out;
}

}  // namespace raycam::simd::avx2
