#include <raycam/camera.hpp>
#include <raycam/error.hpp>
#include <raycam/metrics.hpp>
#include <raycam/spherical.hpp>
#include <raycam/warp.hpp>

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace raycam;

namespace {

CameraModel pinhole(int w, int h, double f) {
  return oracle::camera(Family::Pinhole, w, h, {{"fx", f}, {"fy", f}, {"cx", w / 2.0}, {"cy", h / 2.0}});
}

// Slanted plane with a gentle bump, strictly positive.
DepthMap scene_depth(int w, int h) {
  DepthMap d(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      d.values[i] = 3.0 + 2.0 * v / h + 0.3 * std::sin(0.05 * u);
      d.valid[i] = 1;
    }
  return d;
}

Image pattern(int w, int h) {
  Image img(w, h, 3);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      img.at(u, v, 0) = (u * 7 + v * 3) % 256;
      img.at(u, v, 1) = (u * u + v) % 256;
      img.at(u, v, 2) = 128 + 100 * std::sin(0.1 * (u + v));
    }
  return img;
}

DeformationField zero_flow(int w, int h) {
  DeformationField f;
  f.width = f.target_width = w;
  f.height = f.target_height = h;
  f.du.assign(f.size(), 0.0);
  f.dv.assign(f.size(), 0.0);
  f.valid.assign(f.size(), 1);
  return f;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(DeformationField, SameCameraGivesZeroFlow) {
  for (const CameraModel& cam : oracle::zoo(64, 48)) {
    if (cam.family() == Family::Equirectangular) continue;
    const DeformationField f = deformation_field(cam, cam, scene_depth(64, 48));
    std::size_t valid = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!f.valid[i]) continue;
      ++valid;
      EXPECT_EQ(f.du[i], 0.0);
      EXPECT_EQ(f.dv[i], 0.0);
    }
    EXPECT_GT(valid, 0u) << family_name(cam.family());
  }
}

TEST(DeformationField, ZoomKeepsPrincipalPointFixed) {
  const DeformationField f = deformation_field(pinhole(65, 49, 50), pinhole(65, 49, 100), scene_depth(65, 49));
  const std::size_t center = 24 * 65 + 32;
  ASSERT_TRUE(f.valid[center]);
  EXPECT_NEAR(f.du[center], 0, 1e-12);
  EXPECT_NEAR(f.dv[center], 0, 1e-12);
  // Everything else moves outward by the zoom factor.
  const std::size_t i = 30 * 65 + 40;
  ASSERT_TRUE(f.valid[i]);
  EXPECT_NEAR(f.du[i], 40.5 - 32.5, 1e-9);
  EXPECT_NEAR(f.dv[i], 30.5 - 24.5, 1e-9);
}

TEST(DeformationField, PinholeToKannalaBrandtMatchesPerPixelOracle) {
  const int w = 120, h = 90;
  const double f = 60, cx = 60, cy = 45, k1 = -0.3;
  const CameraModel src = pinhole(w, h, f);
  const CameraModel tgt =
      oracle::camera(Family::KannalaBrandt, w, h, {{"fx", f}, {"fy", f}, {"cx", cx}, {"cy", cy}, {"k1", k1}});
  const DeformationField flow = deformation_field(src, tgt, scene_depth(w, h), 2);
  double prev = -1;
  for (int u = 60; u < w; ++u) {
    const std::size_t i = 45 * static_cast<std::size_t>(w) + u;
    const Vec3 ray = oracle::pinhole_ray(f, f, cx, cy, u + 0.5, 45.5);
    const double theta = std::acos(ray.z());
    const double rho = std::hypot(ray.x(), ray.y());
    const double r = oracle::odd_poly({k1}, theta);
    const double eu = cx + f * r * ray.x() / rho - (u + 0.5);
    const double ev = cy + f * r * ray.y() / rho - 45.5;
    ASSERT_TRUE(flow.valid[i]);
    EXPECT_NEAR(flow.du[i], eu, 1e-9);
    EXPECT_NEAR(flow.dv[i], ev, 1e-9);
    const double mag = std::hypot(flow.du[i], flow.dv[i]);
    EXPECT_GT(mag, prev);
    prev = mag;
  }
}

TEST(DeformationField, RadiusAndDepthInputsAgree) {
  const CameraModel src = pinhole(50, 40, 45);
  const CameraModel tgt = oracle::zoo(50, 40)[3];
  const DepthMap depth = scene_depth(50, 40);
  const RadiusMap radius = depth_to_radius(depth, ray_field(src));
  const DeformationField a = deformation_field(src, tgt, depth), b = deformation_field(src, tgt, radius);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.valid[i], b.valid[i]);
    if (!a.valid[i]) continue;
    EXPECT_NEAR(a.du[i], b.du[i], 1e-9);
    EXPECT_NEAR(a.dv[i], b.dv[i], 1e-9);
  }
  EXPECT_THROW(deformation_field(src, tgt, scene_depth(40, 40)), Error);
}

TEST(DeformationField, ThreadedMatchesSerial) {
  const CameraModel src = pinhole(70, 50, 40);
  const CameraModel tgt = oracle::zoo(70, 50)[6];
  const DepthMap d = scene_depth(70, 50);
  const DeformationField a = deformation_field(src, tgt, d, 1), b = deformation_field(src, tgt, d, 3);
  EXPECT_EQ(a.du, b.du);
  EXPECT_EQ(a.dv, b.dv);
  EXPECT_EQ(a.valid, b.valid);
}

TEST(SoftmaxSplat, ZeroFlowIsIdentity) {
  const Image img = pattern(31, 17);
  std::vector<double> imp(31 * 17);
  for (std::size_t i = 0; i < imp.size(); ++i) imp[i] = static_cast<double>(i % 11) / 10;
  const SplatResult s = softmax_splat(img.data, 3, zero_flow(31, 17), imp, kDefaultSplatLambda);
  EXPECT_EQ(std::count(s.holes.begin(), s.holes.end(), 1), 0);
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(s.values[i], img.data[i], 1e-12);
}

TEST(SoftmaxSplat, ConservesMassWithUniformImportance) {
  const int w = 23, h = 19;
  std::vector<double> vals(w * h);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 1 + static_cast<double>(i * 37 % 101);
  const std::vector<double> imp(vals.size(), 0.5);
  const SplatResult s = softmax_splat(vals, 1, zero_flow(w, h), imp, 3.0);
  double in = 0, out = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    in += vals[i];
    out += s.values[i];
  }
  EXPECT_NEAR(out, in, 1e-12 * in);
}

TEST(SoftmaxSplat, TwoPixelCollision) {
  // Two sources in a 2 x 1 grid landing on target pixel 0.
  DeformationField f = zero_flow(2, 1);
  f.du[1] = -1;
  const std::vector<double> values{0.0, 10.0};

  const SplatResult z = softmax_splat(values, 1, f, std::vector<double>{1.0, 0.0}, 600);
  EXPECT_LT(z.values[0], 1e-12);
  EXPECT_TRUE(z.holes[1]);

  const SplatResult s = softmax_splat(std::vector<double>{3.0, 7.0}, 1, f, std::vector<double>{1.0, 0.5}, 1.0);
  const double e1 = std::exp(1.0), e2 = std::exp(0.5);
  EXPECT_NEAR(s.values[0], (e1 * 3 + e2 * 7) / (e1 + e2), 1e-12);
  EXPECT_NEAR(s.weight[0], e1 + e2, 1e-12);
}

TEST(SoftmaxSplat, RaisingImportanceNeverLowersShare) {
  DeformationField f = zero_flow(2, 1);
  f.du[1] = -0.7;
  const std::vector<double> values{0.0, 1.0};
  double prev = -1;
  for (double imp : {0.0, 0.1, 0.3, 0.6, 1.0}) {
    const SplatResult s = softmax_splat(values, 1, f, std::vector<double>{0.5, imp}, 5.0);
    EXPECT_GE(s.values[0], prev);
    prev = s.values[0];
  }
}

TEST(SoftmaxSplat, Errors) {
  const DeformationField f = zero_flow(2, 2);
  const std::vector<double> v(4, 1.0), imp(4, 0.5);
  EXPECT_THROW(softmax_splat(std::vector<double>(3, 1.0), 1, f, imp, 1), Error);
  EXPECT_THROW(softmax_splat(v, 1, f, std::vector<double>(3, 0.5), 1), Error);
  EXPECT_THROW(softmax_splat(v, 1, f, imp, -1), Error);
  EXPECT_THROW(softmax_splat(v, 1, f, std::vector<double>(4, 2.0), 1), Error);
}

TEST(Importance, MinMaxNormalizedInverseDepth) {
  DepthMap d(3, 1);
  d.values = {1, 2, 4};
  d.valid = {1, 1, 1};
  const auto imp = inverse_depth_importance(d);
  EXPECT_DOUBLE_EQ(imp[0], 1);
  EXPECT_DOUBLE_EQ(imp[1], (0.5 - 0.25) / 0.75);
  EXPECT_DOUBLE_EQ(imp[2], 0);
  d.values = {2, 2, 2};
  for (double x : inverse_depth_importance(d)) EXPECT_EQ(x, 0);
}

TEST(Warp, IdentityCameraReproducesInput) {
  const int w = 64, h = 48;
  const CameraModel cam = pinhole(w, h, 50);
  const Image img = pattern(w, h);
  const DistortedSample s = warp_to_camera(img, scene_depth(w, h), cam, cam, kDefaultSplatLambda);
  EXPECT_EQ(std::count(s.holes.begin(), s.holes.end(), 1), 0);
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(s.rgb.data[i], img.data[i], 1e-12);
}

TEST(Warp, EndToEndGeometryIsConsistent) {
  const int w = 160, h = 120;
  const CameraModel src = pinhole(w, h, 100);
  const DepthMap depth = scene_depth(w, h);
  const PointCloud source = rays_to_points(ray_field(src), depth_to_radius(depth, ray_field(src)));
  const NearestNeighborIndex index(source.points);

  for (const CameraModel& tgt :
       {oracle::camera(Family::EUCM, w, h, {{"fx", 100}, {"fy", 100}, {"cx", 80}, {"cy", 60}, {"alpha", 0.6}, {"beta", 1.2}}),
        oracle::camera(Family::KannalaBrandt, w, h, {{"fx", 100}, {"fy", 100}, {"cx", 80}, {"cy", 60}, {"k1", 0.2}})}) {
    const DistortedSample s = warp_to_camera(pattern(w, h), depth, src, tgt, kDefaultSplatLambda);
    const RayField rays = ray_field(tgt);
    std::vector<double> err, rad;
    for (std::size_t j = 0; j < rays.size(); ++j) {
      if (s.holes[j] || !rays.valid[j]) continue;
      const Vec3 p = rays.dir(j) * s.radius.values[j];
      err.push_back(std::sqrt(index.nearest_sq(p)));
      rad.push_back(s.radius.values[j]);
    }
    ASSERT_GT(err.size(), rays.size() / 4);
    EXPECT_LT(median(err), 0.01 * median(rad)) << family_name(tgt.family());
  }
}

TEST(Warp, FixedSeedIsDeterministic) {
  const int w = 80, h = 60;
  const CameraModel src = pinhole(w, h, 60);
  const auto spec = augmentation_spec();
  std::mt19937_64 a(42), b(42);
  const DistortedSample x = make_distorted_sample(pattern(w, h), scene_depth(w, h), src, spec, 50, a, 1);
  const DistortedSample y = make_distorted_sample(pattern(w, h), scene_depth(w, h), src, spec, 50, b, 4);
  EXPECT_EQ(x.target, y.target);
  EXPECT_EQ(x.rgb.data, y.rgb.data);
  EXPECT_EQ(x.radius.values, y.radius.values);
  EXPECT_EQ(x.holes, y.holes);
}

TEST(Warp, RequiresDenseDepth) {
  const CameraModel src = pinhole(20, 10, 20);
  DepthMap d = scene_depth(20, 10);
  d.valid[0] = d.valid[1] = d.valid[2] = 0;
  std::mt19937_64 rng(1);
  try {
    make_distorted_sample(pattern(20, 10), d, src, augmentation_spec(), 50, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
  }
}
