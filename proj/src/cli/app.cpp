#include "cli/cli.hpp"

#include <raycam/error.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <functional>
#include <ostream>

namespace raycam::cli {

namespace {

void setup_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_logger_mt("raycam");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    return true;
  }();
  (void)once;
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("RAYCAM_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input:
      return kInput;
    case ErrorKind::Numerical:
      return kNumerical;
    case ErrorKind::Shape:
      return kShape;
  }
  return kInternal;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  Context ctx;
  ctx.args = args;
  ctx.out = &out;

  CLI::App app{"Camera geometry toolkit: ray fields, SH fits, warping and evaluation", "raycam"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--jobs", ctx.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--manifest", ctx.manifest_path,
                 "Manifest path to write; without a subcommand, re-run the manifest instead");
  app.set_version_flag("--version", kToolVersion);

  std::function<void()> action;

  RaysOptions rays;
  auto* c = app.add_subcommand("rays", "Per-pixel unit rays of a camera");
  c->add_option("--camera", rays.camera, "Camera JSON")->required();
  c->add_option("--out", rays.out, "Output H x W x 3 RYF1")->required();
  c->add_option("--mask", rays.mask, "Output H x W RYF1 validity mask")->required();
  c->callback([&] { action = [&] { cmd_rays(ctx, rays); }; });

  FitShOptions fit;
  c = app.add_subcommand("fit-sh", "Fit SH coefficients to a ray field");
  c->add_option("--rays", fit.rays, "H x W x 3 RYF1 rays")->required();
  c->add_option("--mask", fit.mask, "Optional H x W RYF1 mask");
  c->add_option("--degree", fit.degree, "Maximum SH degree")->capture_default_str();
  c->add_flag("--tied", fit.tied, "One coefficient per harmonic for all components");
  c->add_option("--out", fit.out, "Output coefficients JSON")->required();
  c->callback([&] { action = [&] { cmd_fit_sh(ctx, fit); }; });

  ReconShOptions recon;
  c = app.add_subcommand("recon-sh", "Rays from SH coefficients");
  c->add_option("--coeffs", recon.coeffs, "Coefficients JSON")->required();
  c->add_option("--out", recon.out, "Output H x W x 3 RYF1")->required();
  c->add_option("--mask", recon.mask, "Output H x W RYF1 validity mask")->required();
  c->callback([&] { action = [&] { cmd_recon_sh(ctx, recon); }; });

  RoundtripOptions rt;
  c = app.add_subcommand("roundtrip", "Project(unproject(p)) error on random pixels");
  c->add_option("--camera", rt.camera, "Camera JSON")->required();
  c->add_option("--samples", rt.samples, "Random pixels")->capture_default_str();
  c->add_option("--out", rt.out, "Output report JSON")->required();
  c->callback([&] { action = [&] { cmd_roundtrip(ctx, rt); }; });

  WarpOptions warp;
  c = app.add_subcommand("warp", "Re-render an image and depth under another camera");
  c->add_option("--image", warp.image, "Input PNG")->required();
  c->add_option("--depth", warp.depth, "H x W RYF1 depth")->required();
  c->add_option("--depth-mask", warp.depth_mask, "Optional H x W RYF1 mask");
  c->add_option("--src", warp.src, "Source camera JSON")->required();
  c->add_option("--tgt", warp.tgt, "Target camera JSON")->required();
  c->add_option("--lambda", warp.lambda, "Splat temperature")->capture_default_str();
  c->add_option("--out-image", warp.out_image, "Output PNG")->required();
  c->add_option("--out-radius", warp.out_radius, "Output H x W RYF1 radius")->required();
  c->add_option("--out-holes", warp.out_holes, "Output H x W RYF1 hole mask")->required();
  c->callback([&] { action = [&] { cmd_warp(ctx, warp); }; });

  GenDistortOptions gen;
  c = app.add_subcommand("gen-distort", "Warp into a randomly sampled camera");
  c->add_option("--image", gen.image, "Input PNG")->required();
  c->add_option("--depth", gen.depth, "H x W RYF1 depth")->required();
  c->add_option("--depth-mask", gen.depth_mask, "Optional H x W RYF1 mask");
  c->add_option("--src", gen.src, "Source camera JSON")->required();
  auto* spec_opt = c->add_option("--spec", gen.spec, "Camera sampling spec JSON");
  c->add_option("--preset", gen.preset, "Built-in spec")
      ->check(CLI::IsMember({"validation", "augmentation"}))
      ->excludes(spec_opt);
  c->add_option("--lambda", gen.lambda, "Splat temperature")->capture_default_str();
  c->add_option("--out-image", gen.out_image, "Output PNG")->required();
  c->add_option("--out-radius", gen.out_radius, "Output H x W RYF1 radius")->required();
  c->add_option("--out-holes", gen.out_holes, "Output H x W RYF1 hole mask")->required();
  c->add_option("--out-camera", gen.out_camera, "Output target camera JSON")->required();
  c->callback([&] { action = [&] { cmd_gen_distort(ctx, gen); }; });

  EvalOptions ev;
  c = app.add_subcommand("eval", "Metrics of a predicted radius or depth map");
  c->add_option("--pred", ev.pred, "H x W RYF1 prediction")->required();
  c->add_option("--gt", ev.gt, "H x W RYF1 ground truth")->required();
  c->add_option("--pred-mask", ev.pred_mask, "Optional prediction mask");
  c->add_option("--gt-mask", ev.gt_mask, "Optional ground-truth mask");
  c->add_option("--camera", ev.camera, "Ground-truth camera JSON")->required();
  c->add_option("--pred-camera", ev.pred_camera, "Predicted camera JSON (defaults to --camera)");
  c->add_option("--kind", ev.kind, "radius or depth")->capture_default_str();
  c->add_option("--config", ev.config, "Eval config JSON");
  c->add_option("--out", ev.out, "Output report JSON")->required();
  c->callback([&] { action = [&] { cmd_eval(ctx, ev); }; });

  LossCheckOptions lc;
  c = app.add_subcommand("loss-check", "Finite-difference check of the training loss gradients");
  c->add_option("--config", lc.config, "Loss config JSON");
  c->add_option("--pixels", lc.pixels, "Random instance size")->capture_default_str();
  c->add_option("--epsilon", lc.epsilon, "Finite-difference step")->capture_default_str();
  c->add_option("--out", lc.out, "Output report JSON")->required();
  c->callback([&] { action = [&] { cmd_loss_check(ctx, lc); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInput;
  }
  if (seed_opt->count() > 0) ctx.seed = seed;
  setup_logging();

  try {
    if (!action) {
      if (ctx.manifest_path.empty()) {
        err << app.help();
        return kInput;
      }
      if (depth > 0) fail(ErrorKind::Input, "manifest does not name a subcommand");
      spdlog::info("replaying {}", ctx.manifest_path);
      return dispatch(manifest_args(io::read_json(ctx.manifest_path)), out, err, depth + 1);
    }
    action();
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace raycam::cli
