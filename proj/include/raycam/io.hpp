#pragma once

// File formats: RYF1 float tensors, 8-bit PNG images and JSON documents for
// cameras, sampling specs, SH coefficients and evaluation results.
//
// RYF1 layout (little endian): "RYF1", u32 rank, u32 dims[rank], u32 dtype
// (1 = float32), then the row-major payload.

#include <raycam/camera.hpp>
#include <raycam/fields.hpp>
#include <raycam/losses.hpp>
#include <raycam/metrics.hpp>
#include <raycam/sampling.hpp>
#include <raycam/sh.hpp>
#include <raycam/warp.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace raycam::io {

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
};

std::string encode_tensor(const Tensor& t);
/// Throws Error(Input) on a bad header, unknown dtype or truncated payload.
Tensor decode_tensor(std::string_view bytes);

Tensor read_tensor(const std::filesystem::path& path);

/// H x W x 3 directions; invalid pixels hold zeros.
Tensor rays_tensor(const RayField& rays);
/// H x W with 0/1 entries.
Tensor mask_tensor(const Mask& mask, GridSize grid);
/// H x W values.
Tensor scalar_tensor(const ScalarMap& map);

/// Rebuilds a ray field from H x W x 3 directions and an optional H x W mask
/// (all-valid when absent, otherwise valid where the mask is nonzero).
/// Throws Error(Shape) on mismatched dimensions.
RayField rays_from_tensor(const Tensor& dirs, const Tensor* mask = nullptr);
/// H x W (or H x W x 1) values; valid where finite and, if given, the mask is nonzero.
ScalarMap scalar_from_tensor(const Tensor& values, const Tensor* mask = nullptr);

/// 8-bit RGB PNG. Gray and alpha inputs are converted to RGB.
Image read_png(const std::filesystem::path& path);
/// Samples are rounded and clamped to [0, 255].
std::string encode_png(const Image& img);

std::string read_file(const std::filesystem::path& path);

/// Writes a set of files so that either all of them appear or none: every
/// payload goes to a temporary sibling first, then all are renamed.
class OutputBatch {
 public:
  void add(std::filesystem::path path, std::string bytes);
  /// Throws Error(Input) if a temporary cannot be written; no target is touched then.
  void commit();
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::vector<std::filesystem::path> paths_;
  std::vector<std::string> payloads_;
};

// JSON. Readers throw Error(Input) on schema errors.

nlohmann::json to_json(const CameraModel& cam);
CameraModel camera_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CameraSamplingSpec& spec);
CameraSamplingSpec sampling_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SHCoefficients& h);
SHCoefficients sh_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalConfig& cfg);
EvalConfig eval_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricsReport& r);

nlohmann::json to_json(const LossConfig& cfg);
LossConfig loss_config_from_json(const nlohmann::json& j);

/// Parses a document; throws Error(Input) with the parser message on failure.
nlohmann::json parse_json(std::string_view text);
nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace raycam::io
