#pragma once

// Re-rendering an image and its radius map under a different camera model
// sharing the optical center, by forward softmax splatting.

#include <raycam/camera.hpp>
#include <raycam/fields.hpp>
#include <raycam/sampling.hpp>

#include <random>
#include <span>
#include <vector>

namespace raycam {

/// Interleaved multi-channel image with float samples (0..255 for 8-bit data).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0.0) {}
  GridSize grid() const { return {width, height}; }
  double& at(int u, int v, int c) { return data[(static_cast<std::size_t>(v) * width + u) * channels + c]; }
  double at(int u, int v, int c) const { return data[(static_cast<std::size_t>(v) * width + u) * channels + c]; }
};

/// Per source pixel: target location minus source location, continuous pixels.
struct DeformationField {
  int width = 0;  // source grid
  int height = 0;
  int target_width = 0;
  int target_height = 0;
  std::vector<double> du, dv;
  Mask valid;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  GridSize grid() const { return {width, height}; }
  GridSize target_grid() const { return {target_width, target_height}; }
};

/// Lifts each source pixel center with its depth through src and projects it
/// with tgt. Pixels are invalid where the depth is missing, the source ray
/// does not reach the depth plane, or the target projection fails.
/// Throws Error(Shape) when depth does not match the source grid.
DeformationField deformation_field(const CameraModel& src, const CameraModel& tgt, const DepthMap& depth,
                                   int jobs = 1);

/// Same from a radius map (distance along the ray).
DeformationField deformation_field(const CameraModel& src, const CameraModel& tgt, const RadiusMap& radius,
                                   int jobs = 1);

struct SplatResult {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;  // interleaved, zero on holes
  std::vector<double> weight;  // accumulated splat weight per target pixel
  Mask holes;                  // 1 where weight <= 1e-12
};

/// Forward-warps interleaved `values` (channels per source pixel). Each valid
/// source pixel deposits value * w on the four bilinear neighbors of its target
/// location, w = bilinear * exp(lambda * importance); output = sum / sum of w.
/// Accumulation runs in raster order. Throws Error(Shape) on size mismatch and
/// Error(Input) for negative lambda or importance outside [0, 1].
SplatResult softmax_splat(std::span<const double> values, int channels, const DeformationField& flow,
                          std::span<const double> importance, double lambda);

/// 1 / depth min-max normalized to [0, 1] over valid pixels, 0 elsewhere and
/// when all valid depths are equal.
std::vector<double> inverse_depth_importance(const DepthMap& depth);

inline constexpr double kDefaultSplatLambda = 50.0;

struct DistortedSample {
  Image rgb;
  RadiusMap radius;
  Mask holes;
  CameraModel target;
  CameraModel source;
};

/// Samples a target camera, then splats the image and the radius map into it.
/// Throws Error(Input) when fewer than 99% of the depth pixels are valid.
DistortedSample make_distorted_sample(const Image& rgb, const DepthMap& depth, const CameraModel& src,
                                      const CameraSamplingSpec& spec, double lambda, std::mt19937_64& rng,
                                      int jobs = 1);

/// Warp into a given target camera.
DistortedSample warp_to_camera(const Image& rgb, const DepthMap& depth, const CameraModel& src,
                               const CameraModel& tgt, double lambda, int jobs = 1);

}  // namespace raycam
