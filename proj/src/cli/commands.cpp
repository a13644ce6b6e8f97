#include "cli/cli.hpp"

#include <raycam/camera.hpp>
#include <raycam/error.hpp>
#include <raycam/losses.hpp>
#include <raycam/metrics.hpp>
#include <raycam/sampling.hpp>
#include <raycam/sh.hpp>
#include <raycam/spherical.hpp>
#include <raycam/warp.hpp>

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>
#include <random>

namespace raycam::cli {

using nlohmann::json;

namespace {

CameraModel load_camera(Context& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  return io::camera_from_json(io::read_json(path));
}

io::Tensor load_tensor(Context& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  return io::read_tensor(path);
}

std::optional<io::Tensor> load_optional(Context& ctx, const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_tensor(ctx, path);
}

DepthMap load_depth(Context& ctx, const std::string& path, const std::string& mask_path) {
  const io::Tensor t = load_tensor(ctx, path);
  const auto m = load_optional(ctx, mask_path);
  DepthMap d;
  static_cast<ScalarMap&>(d) = io::scalar_from_tensor(t, m ? &*m : nullptr);
  for (std::size_t i = 0; i < d.size(); ++i) d.valid[i] = d.valid[i] && d.values[i] > 0;
  return d;
}

void add_sample_outputs(Context& ctx, const DistortedSample& s, const std::string& image, const std::string& radius,
                        const std::string& holes) {
  ctx.outputs.add(image, io::encode_png(s.rgb));
  ctx.outputs.add(radius, io::encode_tensor(io::scalar_tensor(s.radius)));
  ctx.outputs.add(holes, io::encode_tensor(io::mask_tensor(s.holes, s.target.grid())));
}

json fit_stats(const FitResult& fit) {
  return {{"residual_rms", fit.residual_rms},
          {"mean_angular_error", fit.mean_angular_error},
          {"max_angular_error", fit.max_angular_error},
          {"valid_pixels", fit.valid_pixels},
          {"rank", fit.rank}};
}

}  // namespace

void cmd_rays(Context& ctx, const RaysOptions& o) {
  const CameraModel cam = load_camera(ctx, o.camera);
  const RayField rays = ray_field(cam);
  spdlog::info("rays: {} {}x{}, {} valid", family_name(cam.family()), cam.width, cam.height, rays.valid_count());
  ctx.config["camera"] = io::to_json(cam);
  ctx.outputs.add(o.out, io::encode_tensor(io::rays_tensor(rays)));
  ctx.outputs.add(o.mask, io::encode_tensor(io::mask_tensor(rays.valid, rays.grid())));
  commit(ctx, "rays");
}

void cmd_fit_sh(Context& ctx, const FitShOptions& o) {
  const SHBasis basis(o.degree);
  const io::Tensor dirs = load_tensor(ctx, o.rays);
  const auto mask = load_optional(ctx, o.mask);
  const RayField target = io::rays_from_tensor(dirs, mask ? &*mask : nullptr);
  const SHDomain domain = estimate_domain(target);
  const FitResult fit =
      fit_coeffs(target, domain, basis.degree(), o.tied ? ChannelMode::Tied : ChannelMode::PerChannel);
  spdlog::info("fit-sh: degree {} on {} pixels, mean angular error {:.3e} rad", o.degree, fit.valid_pixels,
               fit.mean_angular_error);
  json doc = io::to_json(fit.coeffs);
  doc["fit"] = fit_stats(fit);
  ctx.config["degree"] = o.degree;
  ctx.config["tied"] = o.tied;
  ctx.outputs.add(o.out, io::dump_json(doc));
  commit(ctx, "fit-sh");
}

void cmd_recon_sh(Context& ctx, const ReconShOptions& o) {
  ctx.inputs.push_back(o.coeffs);
  const SHCoefficients h = io::sh_from_json(io::read_json(o.coeffs));
  const RayField rays = reconstruct(h);
  ctx.config["degree"] = h.degree;
  ctx.outputs.add(o.out, io::encode_tensor(io::rays_tensor(rays)));
  ctx.outputs.add(o.mask, io::encode_tensor(io::mask_tensor(rays.valid, rays.grid())));
  commit(ctx, "recon-sh");
}

void cmd_roundtrip(Context& ctx, const RoundtripOptions& o) {
  if (o.samples < 1) fail(ErrorKind::Input, "samples must be >= 1");
  const CameraModel cam = load_camera(ctx, o.camera);
  const Projector proj(cam);
  std::mt19937_64 rng(ctx.seed_or(0));
  std::size_t valid = 0;
  double worst = 0, sum = 0;
  for (int i = 0; i < o.samples; ++i) {
    const Vec2 p(uniform01(rng) * cam.width, uniform01(rng) * cam.height);
    const auto ray = proj.unproject(p);
    if (!ray) continue;
    const auto q = proj.project(*ray);
    if (!q) {
      worst = std::numeric_limits<double>::infinity();
      ++valid;
      continue;
    }
    const double e = (*q - p).cwiseAbs().maxCoeff();
    worst = std::max(worst, e);
    sum += e;
    ++valid;
  }
  const json report = {{"model", family_name(cam.family())},
                       {"samples", o.samples},
                       {"valid", valid},
                       {"max_error_px", std::isfinite(worst) ? json(worst) : json(nullptr)},
                       {"mean_error_px", valid ? sum / valid : 0.0},
                       {"iterative", is_iterative(cam.family())}};
  ctx.config["samples"] = o.samples;
  ctx.outputs.add(o.out, io::dump_json(report));
  commit(ctx, "roundtrip");
}

void cmd_warp(Context& ctx, const WarpOptions& o) {
  ctx.inputs.push_back(o.image);
  const Image rgb = io::read_png(o.image);
  const DepthMap depth = load_depth(ctx, o.depth, o.depth_mask);
  const CameraModel src = load_camera(ctx, o.src);
  const CameraModel tgt = load_camera(ctx, o.tgt);
  const DistortedSample s = warp_to_camera(rgb, depth, src, tgt, o.lambda, ctx.jobs);
  ctx.config["lambda"] = o.lambda;
  add_sample_outputs(ctx, s, o.out_image, o.out_radius, o.out_holes);
  commit(ctx, "warp");
}

void cmd_gen_distort(Context& ctx, const GenDistortOptions& o) {
  ctx.inputs.push_back(o.image);
  const Image rgb = io::read_png(o.image);
  const DepthMap depth = load_depth(ctx, o.depth, o.depth_mask);
  const CameraModel src = load_camera(ctx, o.src);
  CameraSamplingSpec spec;
  if (!o.spec.empty()) {
    ctx.inputs.push_back(o.spec);
    spec = io::sampling_spec_from_json(io::read_json(o.spec));
  } else if (o.preset == "validation") {
    spec = distorted_validation_spec();
  } else if (o.preset == "augmentation") {
    spec = augmentation_spec();
  } else {
    fail(ErrorKind::Input, "gen-distort needs --spec or --preset validation|augmentation");
  }
  std::mt19937_64 rng(ctx.seed_or(spec.seed));
  const DistortedSample s = make_distorted_sample(rgb, depth, src, spec, o.lambda, rng, ctx.jobs);
  spdlog::info("gen-distort: target {}", family_name(s.target.family()));
  ctx.config["lambda"] = o.lambda;
  ctx.config["spec"] = io::to_json(spec);
  add_sample_outputs(ctx, s, o.out_image, o.out_radius, o.out_holes);
  ctx.outputs.add(o.out_camera, io::dump_json(io::to_json(s.target)));
  commit(ctx, "gen-distort");
}

void cmd_eval(Context& ctx, const EvalOptions& o) {
  if (o.kind != "radius" && o.kind != "depth") fail(ErrorKind::Input, "--kind must be radius or depth");
  const io::Tensor pred_t = load_tensor(ctx, o.pred);
  const io::Tensor gt_t = load_tensor(ctx, o.gt);
  const auto pred_m = load_optional(ctx, o.pred_mask);
  const auto gt_m = load_optional(ctx, o.gt_mask);
  if (pred_t.dims != gt_t.dims) fail(ErrorKind::Shape, "prediction and ground truth shapes differ");
  const CameraModel gt_cam = load_camera(ctx, o.camera);
  const CameraModel pred_cam = o.pred_camera.empty() ? gt_cam : load_camera(ctx, o.pred_camera);
  EvalConfig cfg;
  if (!o.config.empty()) {
    ctx.inputs.push_back(o.config);
    cfg = io::eval_config_from_json(io::read_json(o.config));
  }

  EvalInputs in;
  in.gt_rays = ray_field(gt_cam);
  in.pred_rays = ray_field(pred_cam);
  const ScalarMap pred = io::scalar_from_tensor(pred_t, pred_m ? &*pred_m : nullptr);
  const ScalarMap gt = io::scalar_from_tensor(gt_t, gt_m ? &*gt_m : nullptr);
  if (!(pred.grid() == in.gt_rays.grid()) || !(in.pred_rays.grid() == in.gt_rays.grid()))
    fail(ErrorKind::Shape, "tensor shape does not match the camera image size");
  if (o.kind == "depth") {
    DepthMap pd, gd;
    static_cast<ScalarMap&>(pd) = pred;
    static_cast<ScalarMap&>(gd) = gt;
    in.pred_radius = depth_to_radius(pd, in.pred_rays);
    in.gt_radius = depth_to_radius(gd, in.gt_rays);
  } else {
    static_cast<ScalarMap&>(in.pred_radius) = pred;
    static_cast<ScalarMap&>(in.gt_radius) = gt;
  }
  const MetricsReport report = evaluate(in, cfg);
  ctx.config["eval"] = io::to_json(cfg);
  ctx.config["kind"] = o.kind;
  ctx.outputs.add(o.out, io::dump_json(io::to_json(report)));
  commit(ctx, "eval");
}

void cmd_loss_check(Context& ctx, const LossCheckOptions& o) {
  if (o.pixels < 1) fail(ErrorKind::Input, "pixels must be >= 1");
  LossConfig cfg;
  if (!o.config.empty()) {
    ctx.inputs.push_back(o.config);
    cfg = io::loss_config_from_json(io::read_json(o.config));
  }
  std::mt19937_64 rng(ctx.seed_or(0));
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };

  const int n = o.pixels;
  LossInputs in;
  in.pred_angles = AngularField(n, 1);
  in.gt_angles = AngularField(n, 1);
  in.pred_log_radius.resize(n);
  in.gt_log_radius.resize(n);
  in.sigma.resize(n);
  in.mask.assign(n, 1);
  for (int i = 0; i < n; ++i) {
    in.gt_angles.theta[i] = u(0.1, 2.5);
    in.gt_angles.phi[i] = u(-std::numbers::pi, std::numbers::pi);
    in.pred_angles.theta[i] = in.gt_angles.theta[i] + u(-0.2, 0.2);
    in.pred_angles.phi[i] = wrap_angle(in.gt_angles.phi[i] + u(-0.4, 0.4));
    in.gt_log_radius[i] = u(0.0, 3.0);
    in.pred_log_radius[i] = in.gt_log_radius[i] + u(-0.3, 0.3);
    in.sigma[i] = u(0.01, 0.5);
    in.pred_angles.valid[i] = in.gt_angles.valid[i] = 1;
    if (n > 1 && i % 7 == 3) in.mask[i] = 0;
  }

  const TotalLossValue total = total_loss(in, cfg);
  const std::vector<double> x = pack_predictions(in);
  const GradCheckReport check = fd_gradcheck(total_loss_objective(in, cfg), x, o.epsilon);
  const bool pass = check.max_deviation < 1e-5;
  const json report = {{"total", total.value},
                       {"angular", total.angular},
                       {"radial", total.radial},
                       {"confidence", total.confidence},
                       {"fd_max_deviation", check.max_deviation},
                       {"skipped_kinks", check.skipped_kinks},
                       {"checked", check.checked},
                       {"epsilon", o.epsilon},
                       {"pass", pass}};
  ctx.config["loss"] = io::to_json(cfg);
  ctx.config["pixels"] = o.pixels;
  ctx.config["epsilon"] = o.epsilon;
  ctx.outputs.add(o.out, io::dump_json(report));
  commit(ctx, "loss-check");
  if (!pass) fail(ErrorKind::Numerical, "gradient check deviation " + std::to_string(check.max_deviation));
}

}  // namespace raycam::cli
