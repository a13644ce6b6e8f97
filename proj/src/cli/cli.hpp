#pragma once

#include <raycam/io.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace raycam::cli {

inline constexpr const char* kToolVersion = "raycam 0.1.0";

/// Process exit codes.
enum Exit : int { kOk = 0, kInternal = 1, kInput = 2, kNumerical = 3, kShape = 4 };

/// Runs the tool on argv without the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Per-invocation state shared by the subcommands.
struct Context {
  std::vector<std::string> args;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string manifest_path;
  std::ostream* out = nullptr;

  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> inputs;
  io::OutputBatch outputs;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

/// Adds the run manifest to the pending outputs and writes everything.
void commit(Context& ctx, const std::string& subcommand);

nlohmann::json make_manifest(const Context& ctx, const std::string& subcommand);

/// Arguments stored in a manifest, for replay.
std::vector<std::string> manifest_args(const nlohmann::json& manifest);

struct RaysOptions {
  std::string camera, out, mask;
};
struct FitShOptions {
  std::string rays, mask, out;
  int degree = 3;
  bool tied = false;
};
struct ReconShOptions {
  std::string coeffs, out, mask;
};
struct RoundtripOptions {
  std::string camera, out;
  int samples = 10000;
};
struct WarpOptions {
  std::string image, depth, depth_mask, src, tgt;
  std::string out_image, out_radius, out_holes;
  double lambda = 50;
};
struct GenDistortOptions {
  std::string image, depth, depth_mask, src, spec, preset;
  std::string out_image, out_radius, out_holes, out_camera;
  double lambda = 50;
};
struct EvalOptions {
  std::string pred, gt, pred_mask, gt_mask, camera, pred_camera, config, out;
  std::string kind = "radius";
};
struct LossCheckOptions {
  std::string config, out;
  int pixels = 64;
  double epsilon = 1e-6;
};

void cmd_rays(Context& ctx, const RaysOptions& o);
void cmd_fit_sh(Context& ctx, const FitShOptions& o);
void cmd_recon_sh(Context& ctx, const ReconShOptions& o);
void cmd_roundtrip(Context& ctx, const RoundtripOptions& o);
void cmd_warp(Context& ctx, const WarpOptions& o);
void cmd_gen_distort(Context& ctx, const GenDistortOptions& o);
void cmd_eval(Context& ctx, const EvalOptions& o);
void cmd_loss_check(Context& ctx, const LossCheckOptions& o);

}  // namespace raycam::cli
