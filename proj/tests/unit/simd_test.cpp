#include <raycam/error.hpp>
#include <raycam/simd.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace raycam;
using namespace raycam::simd;

namespace {

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 100, 1023, 4097};

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_supported(Isa::Scalar));
  EXPECT_EQ(kernels(Isa::Scalar).isa, Isa::Scalar);
  EXPECT_EQ(isa_name(Isa::Avx2), "avx2");
  EXPECT_TRUE(isa_supported(active_isa()));
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (!isa_supported(isa)) {
      EXPECT_THROW(kernels(isa), Error);
    }
}

TEST(Simd, CombineRaysMatchesScalarBitwise) {
  std::mt19937_64 rng(1);
  for (Isa isa : vector_isas()) {
    for (std::size_t n : kSizes) {
      for (std::size_t terms : {0u, 1u, 3u, 15u}) {
        auto bx = random_vec(n, rng), by = random_vec(n, rng), bz = random_vec(n, rng);
        auto basis = random_vec(n * terms, rng), coeffs = random_vec(terms * 3, rng, -0.3, 0.3);
        if (n > 2) bx[1] = by[1] = bz[1] = 0;  // collapsed ray
        std::vector<double> sx(n), sy(n), sz(n), vx(n), vy(n), vz(n);
        std::vector<std::uint8_t> sv(n), vv(n);
        CombineRaysArgs a{n, bx.data(), by.data(), bz.data(), basis.data(), terms, coeffs.data(),
                          sx.data(), sy.data(), sz.data(), sv.data()};
        scalar::combine_rays(a);
        a.out_x = vx.data();
        a.out_y = vy.data();
        a.out_z = vz.data();
        a.valid = vv.data();
        kernels(isa).combine_rays(a);
        EXPECT_TRUE(bitwise_equal(sx, vx) && bitwise_equal(sy, vy) && bitwise_equal(sz, vz))
            << isa_name(isa) << " n=" << n << " terms=" << terms;
        EXPECT_EQ(sv, vv);
        if (n > 2 && terms == 0) {
          EXPECT_EQ(sv[1], 0);
        }
      }
    }
  }
}

TEST(Simd, CombineRaysNormalizes) {
  std::mt19937_64 rng(2);
  const std::size_t n = 37;
  auto bx = random_vec(n, rng), by = random_vec(n, rng), bz = random_vec(n, rng);
  std::vector<double> ox(n), oy(n), oz(n);
  std::vector<std::uint8_t> valid(n);
  CombineRaysArgs a{n, bx.data(), by.data(), bz.data(), nullptr, 0, nullptr, ox.data(), oy.data(), oz.data(),
                    valid.data()};
  kernels().combine_rays(a);
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_TRUE(valid[i]);
    EXPECT_NEAR(std::sqrt(ox[i] * ox[i] + oy[i] * oy[i] + oz[i] * oz[i]), 1, 1e-15);
  }
}

TEST(Simd, DotCrossMatchesScalarBitwise) {
  std::mt19937_64 rng(3);
  for (Isa isa : vector_isas()) {
    for (std::size_t n : kSizes) {
      auto ax = random_vec(n, rng), ay = random_vec(n, rng), az = random_vec(n, rng);
      auto bx = random_vec(n, rng), by = random_vec(n, rng), bz = random_vec(n, rng);
      std::vector<double> sd(n), sc(n), vd(n), vc(n);
      DotCrossArgs a{n, ax.data(), ay.data(), az.data(), bx.data(), by.data(), bz.data(), sd.data(), sc.data()};
      scalar::dot_cross(a);
      a.dot = vd.data();
      a.cross_norm = vc.data();
      kernels(isa).dot_cross(a);
      EXPECT_TRUE(bitwise_equal(sd, vd) && bitwise_equal(sc, vc)) << isa_name(isa) << " n=" << n;
    }
  }
}

TEST(Simd, DotCrossValues) {
  const double ax[] = {1, 0}, ay[] = {0, 1}, az[] = {0, 0};
  const double bx[] = {0, 0}, by[] = {1, 1}, bz[] = {0, 0};
  double dot[2], cross[2];
  kernels().dot_cross({2, ax, ay, az, bx, by, bz, dot, cross});
  EXPECT_EQ(dot[0], 0);
  EXPECT_EQ(cross[0], 1);
  EXPECT_EQ(dot[1], 1);
  EXPECT_EQ(cross[1], 0);
}

TEST(Simd, PinballMatchesScalarBitwise) {
  std::mt19937_64 rng(4);
  for (Isa isa : vector_isas()) {
    for (std::size_t n : kSizes) {
      auto diff = random_vec(n, rng);
      std::vector<std::uint8_t> mask(n);
      for (std::size_t i = 0; i < n; ++i) mask[i] = i % 5 != 2;
      if (n > 4) diff[4] = 0;  // tie
      for (double alpha : {0.0, 0.3, 0.5, 0.7, 1.0}) {
        std::vector<double> sg(n), vg(n);
        PinballArgs a{n, diff.data(), mask.data(), alpha, 0.25, sg.data()};
        const double s = scalar::pinball(a);
        a.grad = vg.data();
        const double v = kernels(isa).pinball(a);
        EXPECT_TRUE(bitwise_equal(s, v)) << isa_name(isa) << " n=" << n << " alpha=" << alpha;
        EXPECT_TRUE(bitwise_equal(sg, vg)) << isa_name(isa) << " n=" << n << " alpha=" << alpha;
      }
    }
  }
}

TEST(Simd, PinballValues) {
  const double diff[] = {1.0, -2.0, 0.0, 5.0};
  const std::uint8_t mask[] = {1, 1, 1, 0};
  double grad[4];
  const double v = kernels().pinball({4, diff, mask, 0.7, 2.0, grad});
  EXPECT_NEAR(v, 0.7 * 1 + 0.3 * 2, 1e-15);
  EXPECT_DOUBLE_EQ(grad[0], 1.4);
  EXPECT_DOUBLE_EQ(grad[1], -0.6);
  EXPECT_EQ(grad[2], 0);
  EXPECT_EQ(grad[3], 0);
}

TEST(Simd, MinSqDistMatchesScalarBitwise) {
  std::mt19937_64 rng(5);
  for (Isa isa : vector_isas()) {
    for (std::size_t n : kSizes) {
      auto px = random_vec(n, rng, -10, 10), py = random_vec(n, rng, -10, 10), pz = random_vec(n, rng, -10, 10);
      for (int q = 0; q < 5; ++q) {
        const auto c = random_vec(3, rng, -12, 12);
        MinSqDistArgs a{c[0], c[1], c[2], px.data(), py.data(), pz.data(), n};
        const double s = scalar::min_sq_dist(a), v = kernels(isa).min_sq_dist(a);
        EXPECT_TRUE(bitwise_equal(s, v)) << isa_name(isa) << " n=" << n;
        double brute = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          const double dx = c[0] - px[i], dy = c[1] - py[i], dz = c[2] - pz[i];
          brute = std::min(brute, dx * dx + dy * dy + dz * dz);
        }
        EXPECT_EQ(s, brute);
      }
    }
  }
}
