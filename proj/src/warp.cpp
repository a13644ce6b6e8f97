#include <raycam/warp.hpp>

#include <raycam/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace raycam {

namespace {

void require_grid(GridSize got, GridSize want, const char* what) {
  if (!(got == want))
    fail(ErrorKind::Shape, std::string(what) + " is " + std::to_string(got.width) + "x" + std::to_string(got.height) +
                               ", expected " + std::to_string(want.width) + "x" + std::to_string(want.height));
}

// Runs body(row) for every row, split into contiguous bands across threads.
template <typename Body>
void for_rows(int rows, int jobs, Body body) {
  jobs = std::clamp(jobs, 1, std::max(rows, 1));
  if (jobs == 1) {
    for (int v = 0; v < rows; ++v) body(v);
    return;
  }
  std::vector<std::thread> pool;
  const int band = (rows + jobs - 1) / jobs;
  for (int j = 0; j < jobs; ++j) {
    const int begin = j * band, end = std::min(rows, begin + band);
    pool.emplace_back([=] {
      for (int v = begin; v < end; ++v) body(v);
    });
  }
  for (auto& t : pool) t.join();
}

// distance(ray, value) -> radius along the ray, or a negative number when unusable.
template <typename ToRadius>
DeformationField lift_and_project(const CameraModel& src, const CameraModel& tgt, const ScalarMap& map, int jobs,
                                  ToRadius to_radius) {
  require_grid(map.grid(), src.grid(), "depth map");
  const Projector from(src), to(tgt);
  DeformationField f;
  f.width = src.width;
  f.height = src.height;
  f.target_width = tgt.width;
  f.target_height = tgt.height;
  f.du.assign(f.size(), 0.0);
  f.dv.assign(f.size(), 0.0);
  f.valid.assign(f.size(), 0);
  const bool same = src == tgt;
  for_rows(src.height, jobs, [&](int v) {
    for (int u = 0; u < src.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * src.width + u;
      if (!map.valid[i]) continue;
      const Vec2 p(u + 0.5, v + 0.5);
      const auto ray = from.unproject(p);
      if (!ray) continue;
      const double r = to_radius(*ray, map.values[i]);
      if (!(r > 0) || !std::isfinite(r)) continue;
      if (same) {
        f.valid[i] = 1;
        continue;
      }
      const auto q = to.project(*ray * r);
      if (!q) continue;
      f.du[i] = q->x() - p.x();
      f.dv[i] = q->y() - p.y();
      f.valid[i] = 1;
    }
  });
  return f;
}

}  // namespace

DeformationField deformation_field(const CameraModel& src, const CameraModel& tgt, const DepthMap& depth, int jobs) {
  return lift_and_project(src, tgt, depth, jobs, [](const Vec3& ray, double z) {
    return ray.z() > 1e-6 ? z / ray.z() : -1.0;
  });
}

DeformationField deformation_field(const CameraModel& src, const CameraModel& tgt, const RadiusMap& radius,
                                   int jobs) {
  return lift_and_project(src, tgt, radius, jobs, [](const Vec3&, double r) { return r; });
}

SplatResult softmax_splat(std::span<const double> values, int channels, const DeformationField& flow,
                          std::span<const double> importance, double lambda) {
  if (channels < 1) fail(ErrorKind::Input, "channels must be >= 1");
  const std::size_t n = flow.size();
  if (values.size() != n * channels) fail(ErrorKind::Shape, "splat values do not match the flow grid");
  if (importance.size() != n) fail(ErrorKind::Shape, "importance does not match the flow grid");
  if (!(lambda >= 0)) fail(ErrorKind::Input, "lambda must be >= 0");
  for (double w : importance)
    if (!(w >= 0 && w <= 1)) fail(ErrorKind::Input, "importance must lie in [0, 1]");
  if (lambda > 700) fail(ErrorKind::Input, "lambda too large");

  SplatResult out;
  out.width = flow.target_width;
  out.height = flow.target_height;
  out.channels = channels;
  const std::size_t m = static_cast<std::size_t>(out.width) * out.height;
  out.values.assign(m * channels, 0.0);
  out.weight.assign(m, 0.0);
  out.holes.assign(m, 1);

  for (int v = 0; v < flow.height; ++v) {
    for (int u = 0; u < flow.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * flow.width + u;
      if (!flow.valid[i]) continue;
      // Target location in pixel-index space (centers at integers).
      const double x = u + flow.du[i];
      const double y = v + flow.dv[i];
      const double x0 = std::floor(x), y0 = std::floor(y);
      const double fx = x - x0, fy = y - y0;
      const double e = std::exp(lambda * importance[i]);
      const double bil[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      for (int k = 0; k < 4; ++k) {
        if (bil[k] == 0) continue;
        const long long tx = static_cast<long long>(x0) + (k & 1);
        const long long ty = static_cast<long long>(y0) + (k >> 1);
        if (tx < 0 || ty < 0 || tx >= out.width || ty >= out.height) continue;
        const std::size_t j = static_cast<std::size_t>(ty) * out.width + static_cast<std::size_t>(tx);
        const double w = bil[k] * e;
        out.weight[j] += w;
        for (int c = 0; c < channels; ++c) out.values[j * channels + c] += w * values[i * channels + c];
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (out.weight[j] > 1e-12) {
      out.holes[j] = 0;
      for (int c = 0; c < channels; ++c) out.values[j * channels + c] /= out.weight[j];
    } else {
      for (int c = 0; c < channels; ++c) out.values[j * channels + c] = 0.0;
    }
  }
  return out;
}

std::vector<double> inverse_depth_importance(const DepthMap& depth) {
  std::vector<double> imp(depth.size(), 0.0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid[i] || !(depth.values[i] > 0)) continue;
    const double d = 1.0 / depth.values[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (!(hi > lo)) return imp;
  for (std::size_t i = 0; i < depth.size(); ++i)
    if (depth.valid[i] && depth.values[i] > 0) imp[i] = (1.0 / depth.values[i] - lo) / (hi - lo);
  return imp;
}

DistortedSample warp_to_camera(const Image& rgb, const DepthMap& depth, const CameraModel& src,
                               const CameraModel& tgt, double lambda, int jobs) {
  src.validate();
  tgt.validate();
  require_grid(rgb.grid(), src.grid(), "image");
  require_grid(depth.grid(), src.grid(), "depth map");

  const DeformationField flow = deformation_field(src, tgt, depth, jobs);
  const std::vector<double> imp = inverse_depth_importance(depth);

  // Radius along each source ray; unchanged by the camera swap.
  const Projector from(src);
  std::vector<double> radius(depth.size(), 0.0);
  for (int v = 0; v < src.height; ++v)
    for (int u = 0; u < src.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * src.width + u;
      if (!flow.valid[i]) continue;
      radius[i] = depth.values[i] / from.unproject(Vec2(u + 0.5, v + 0.5))->z();
    }

  const SplatResult img = softmax_splat(rgb.data, rgb.channels, flow, imp, lambda);
  const SplatResult rad = softmax_splat(radius, 1, flow, imp, lambda);

  DistortedSample s;
  s.source = src;
  s.target = tgt;
  s.rgb = Image(tgt.width, tgt.height, rgb.channels);
  s.rgb.data = img.values;
  s.radius = RadiusMap(tgt.width, tgt.height);
  s.radius.values = rad.values;
  s.holes = img.holes;
  for (std::size_t j = 0; j < s.holes.size(); ++j) s.radius.valid[j] = !s.holes[j];
  return s;
}

DistortedSample make_distorted_sample(const Image& rgb, const DepthMap& depth, const CameraModel& src,
                                      const CameraSamplingSpec& spec, double lambda, std::mt19937_64& rng,
                                      int jobs) {
  const std::size_t filled = static_cast<std::size_t>(std::count(depth.valid.begin(), depth.valid.end(), 1));
  if (filled * 100 < depth.size() * 99) fail(ErrorKind::Input, "depth must be valid on at least 99% of pixels");
  const CameraModel tgt = sample_camera(spec, src, rng);
  return warp_to_camera(rgb, depth, src, tgt, lambda, jobs);
}

}  // namespace raycam
