#pragma once

// Small scene on disk plus one invocation per subcommand, shared by the CLI
// tests and the acceptance runner.

#include "cli/cli.hpp"

#include <raycam/camera.hpp>
#include <raycam/io.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fixture {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "cli") {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("raycam_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

  std::set<std::string> listing() const {
    std::set<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(path_)) names.insert(e.path().string());
    return names;
  }

 private:
  fs::path path_;
};

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

struct RunResult {
  int code = -1;
  std::string out, err;
};

inline RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = raycam::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string manifest_of(const std::string& first_output) { return first_output + ".manifest.json"; }

struct Scene {
  int width = 48, height = 36;
  raycam::CameraModel pinhole, fisheye;
  std::string pinhole_json, fisheye_json, image, depth, radius_pred, radius_gt, small_tensor, loss_config;
};

inline raycam::CameraModel scene_pinhole(int w, int h) {
  raycam::CameraModel cam = raycam::make_camera(raycam::Family::Pinhole, w, h);
  cam.set_param("fx", 40);
  cam.set_param("fy", 40);
  cam.set_param("cx", w / 2.0);
  cam.set_param("cy", h / 2.0);
  return cam;
}

inline Scene make_scene(const TempDir& dir) {
  using namespace raycam;
  Scene s;
  const int w = s.width, h = s.height;
  s.pinhole = scene_pinhole(w, h);
  s.fisheye = make_camera(Family::KannalaBrandt, w, h);
  for (const auto& [name, value] :
       std::vector<std::pair<const char*, double>>{{"fx", 30}, {"fy", 30}, {"cx", w / 2.0}, {"cy", h / 2.0},
                                                   {"k1", -0.05}})
    s.fisheye.set_param(name, value);

  s.pinhole_json = dir / "pinhole.json";
  s.fisheye_json = dir / "fisheye.json";
  write_bytes(s.pinhole_json, io::dump_json(io::to_json(s.pinhole)));
  write_bytes(s.fisheye_json, io::dump_json(io::to_json(s.fisheye)));

  Image img(w, h, 3);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      img.at(u, v, 0) = (u * 5) % 256;
      img.at(u, v, 1) = (v * 7) % 256;
      img.at(u, v, 2) = ((u + v) * 3) % 256;
    }
  s.image = dir / "image.png";
  write_bytes(s.image, io::encode_png(img));

  ScalarMap depth(w, h), pred(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      depth.values[i] = 2.0 + 0.5 * std::sin(0.3 * u) + 0.02 * v;
      pred.values[i] = depth.values[i] * (1.0 + 0.04 * std::cos(0.2 * u + 0.1 * v));
      depth.valid[i] = pred.valid[i] = 1;
    }
  s.depth = dir / "depth.ryf";
  s.radius_gt = s.depth;
  s.radius_pred = dir / "pred.ryf";
  write_bytes(s.depth, io::encode_tensor(io::scalar_tensor(depth)));
  write_bytes(s.radius_pred, io::encode_tensor(io::scalar_tensor(pred)));

  ScalarMap small(w / 2, h / 2);
  std::fill(small.values.begin(), small.values.end(), 1.0);
  std::fill(small.valid.begin(), small.valid.end(), 1);
  s.small_tensor = dir / "small.ryf";
  write_bytes(s.small_tensor, io::encode_tensor(io::scalar_tensor(small)));

  s.loss_config = dir / "loss.json";
  write_bytes(s.loss_config, R"({"alpha_theta": 0.7, "beta": 0.75, "eta": 2, "gamma": 0.1})");
  return s;
}

struct Invocation {
  std::string name;
  std::vector<std::string> args;
  std::vector<std::string> outputs;  // manifest excluded
};

/// One successful call per subcommand, in an order where later calls can read
/// earlier outputs.
inline std::vector<Invocation> every_subcommand(const Scene& s, const TempDir& dir) {
  const std::string rays = dir / "rays.ryf", mask = dir / "rays_mask.ryf", coeffs = dir / "coeffs.json";
  const std::string recon = dir / "recon.ryf", recon_mask = dir / "recon_mask.ryf";
  std::vector<Invocation> calls;
  calls.push_back({"rays", {"rays", "--camera", s.fisheye_json, "--out", rays, "--mask", mask}, {rays, mask}});
  calls.push_back(
      {"fit-sh", {"fit-sh", "--rays", rays, "--mask", mask, "--degree", "3", "--out", coeffs}, {coeffs}});
  calls.push_back({"recon-sh",
                   {"recon-sh", "--coeffs", coeffs, "--out", recon, "--mask", recon_mask},
                   {recon, recon_mask}});
  const std::string rt = dir / "roundtrip.json";
  calls.push_back({"roundtrip",
                   {"--seed", "5", "roundtrip", "--camera", s.fisheye_json, "--samples", "500", "--out", rt},
                   {rt}});
  const std::string wi = dir / "warp.png", wr = dir / "warp_radius.ryf", wh = dir / "warp_holes.ryf";
  calls.push_back({"warp",
                   {"--jobs", "2", "warp", "--image", s.image, "--depth", s.depth, "--src", s.pinhole_json, "--tgt",
                    s.fisheye_json, "--out-image", wi, "--out-radius", wr, "--out-holes", wh},
                   {wi, wr, wh}});
  const std::string gi = dir / "gen.png", gr = dir / "gen_radius.ryf", gh = dir / "gen_holes.ryf",
                    gc = dir / "gen_camera.json";
  calls.push_back({"gen-distort",
                   {"--seed", "13", "gen-distort", "--image", s.image, "--depth", s.depth, "--src", s.pinhole_json,
                    "--preset", "validation", "--out-image", gi, "--out-radius", gr, "--out-holes", gh,
                    "--out-camera", gc},
                   {gi, gr, gh, gc}});
  const std::string ev = dir / "eval.json";
  calls.push_back({"eval",
                   {"eval", "--pred", s.radius_pred, "--gt", s.radius_gt, "--camera", s.pinhole_json, "--out", ev},
                   {ev}});
  const std::string lc = dir / "loss_check.json";
  calls.push_back({"loss-check",
                   {"--seed", "3", "loss-check", "--config", s.loss_config, "--pixels", "32", "--out", lc},
                   {lc}});
  return calls;
}

struct FailureCase {
  std::string name;
  std::vector<std::string> args;
  int expected = 0;
};

/// Invocations that must fail with a specific exit code. Every output path
/// lives under dir/out_*, which must stay absent.
inline std::vector<FailureCase> failure_cases(const Scene& s, const TempDir& dir) {
  using raycam::cli::kInput, raycam::cli::kNumerical, raycam::cli::kShape;
  const std::string bad_model = dir / "bad_model.json";
  write_bytes(bad_model, R"({"model": "spherical_cow", "width": 8, "height": 8})");
  const std::string bad_coeffs = dir / "bad_coeffs.json";
  write_bytes(bad_coeffs,
              R"({"degree": 3, "domain": {"cx": 4, "cy": 4, "hfov": 1, "width": 8, "height": 8}, "coeffs": [[0, 0, 0]]})");
  const std::string bad_loss = dir / "bad_loss.json";
  write_bytes(bad_loss, R"({"beta": 2})");

  // Rays valid on four rows only: fewer pixels than degree-15 harmonics.
  const raycam::RayField field = raycam::ray_field(s.pinhole);
  const std::string rays = dir / "fail_rays.ryf", band = dir / "fail_band.ryf";
  write_bytes(rays, raycam::io::encode_tensor(raycam::io::rays_tensor(field)));
  raycam::Mask m(field.size(), 0);
  for (int v = s.height / 2 - 2; v < s.height / 2 + 2; ++v)
    for (int u = 0; u < s.width; ++u) m[static_cast<std::size_t>(v) * s.width + u] = 1;
  write_bytes(band, raycam::io::encode_tensor(raycam::io::mask_tensor(m, field.grid())));

  const std::string o1 = dir / "out_a", o2 = dir / "out_b", o3 = dir / "out_c", o4 = dir / "out_d";
  const std::string missing_dir = (dir.path() / "out_missing" / "x.ryf").string();
  return {
      {"unknown model", {"rays", "--camera", bad_model, "--out", o1, "--mask", o2}, kInput},
      {"missing input", {"rays", "--camera", dir / "nope.json", "--out", o1, "--mask", o2}, kInput},
      {"unwritable output", {"rays", "--camera", s.pinhole_json, "--out", o1, "--mask", missing_dir}, kInput},
      {"unknown subcommand", {"frobnicate", "--out", o1}, kInput},
      {"missing required option", {"rays", "--camera", s.pinhole_json, "--out", o1}, kInput},
      {"degree zero", {"fit-sh", "--rays", rays, "--degree", "0", "--out", o1}, kInput},
      {"underdetermined fit", {"fit-sh", "--rays", rays, "--mask", band, "--degree", "15", "--out", o1}, kNumerical},
      {"malformed coefficients", {"recon-sh", "--coeffs", bad_coeffs, "--out", o1, "--mask", o2}, kInput},
      {"eval shape mismatch",
       {"eval", "--pred", s.small_tensor, "--gt", s.radius_gt, "--camera", s.pinhole_json, "--out", o1},
       kShape},
      {"eval tensor vs camera",
       {"eval", "--pred", s.small_tensor, "--gt", s.small_tensor, "--camera", s.pinhole_json, "--out", o1},
       kShape},
      {"warp depth size",
       {"warp", "--image", s.image, "--depth", s.small_tensor, "--src", s.pinhole_json, "--tgt", s.fisheye_json,
        "--out-image", o1, "--out-radius", o2, "--out-holes", o3},
       kShape},
      {"gen-distort without spec",
       {"gen-distort", "--image", s.image, "--depth", s.depth, "--src", s.pinhole_json, "--out-image", o1,
        "--out-radius", o2, "--out-holes", o3, "--out-camera", o4},
       kInput},
      {"bad loss config", {"loss-check", "--config", bad_loss, "--out", o1}, kInput},
      {"manifest missing", {"--manifest", dir / "nope.manifest.json"}, kInput},
  };
}

}  // namespace fixture
