#include <raycam/sampling.hpp>

#include <raycam/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace raycam {

namespace {

void add_group(FamilySpec& f, const char* prefix, int count, double lo, double hi) {
  for (int i = 1; i <= count; ++i) f.ranges.push_back({prefix + std::to_string(i), lo, hi});
}

FamilySpec eucm_row(double p) {
  FamilySpec f{Family::EUCM, p, {}};
  f.ranges.push_back({"alpha", 0.0, 1.0});
  f.ranges.push_back({"beta", 0.25, 4.0});
  return f;
}

FamilySpec fisheye_row(double p, double k_lo, double k_hi, double t, double s) {
  FamilySpec f{Family::Fisheye624, p, {}};
  add_group(f, "k", 6, k_lo, k_hi);
  add_group(f, "t", 2, -t, t);
  add_group(f, "s", 4, -s, s);
  return f;
}

FamilySpec kb_row(double p, double k) {
  FamilySpec f{Family::KannalaBrandt, p, {}};
  add_group(f, "k", 3, -k, k);
  return f;
}

}  // namespace

void CameraSamplingSpec::validate() const {
  if (families.empty()) fail(ErrorKind::Input, "no camera families");
  double total = 0;
  for (const auto& f : families) {
    if (!(f.probability >= 0) || !std::isfinite(f.probability))
      fail(ErrorKind::Input, "family probabilities must be non-negative");
    total += f.probability;
    const auto names = param_names(f.family);
    for (const auto& r : f.ranges) {
      if (!(r.lo <= r.hi)) fail(ErrorKind::Input, "range for '" + r.name + "' has lo > hi");
      if (std::find(names.begin(), names.end(), r.name) == names.end())
        fail(ErrorKind::Input, "camera model '" + std::string(family_name(f.family)) + "' has no parameter '" +
                                   r.name + "'");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::Input, "family probabilities must sum to 1");
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CameraModel sample_camera(const CameraSamplingSpec& spec, const CameraModel& base, std::mt19937_64& rng) {
  spec.validate();
  const auto fx = base.param("fx"), fy = base.param("fy"), cx = base.param("cx"), cy = base.param("cy");
  if (!fx || !fy || !cx || !cy) fail(ErrorKind::Input, "base camera must provide fx, fy, cx, cy");

  const double pick = uniform01(rng);
  const FamilySpec* chosen = &spec.families.back();
  double cumulative = 0;
  for (const auto& f : spec.families) {
    cumulative += f.probability;
    if (pick < cumulative) {
      chosen = &f;
      break;
    }
  }

  if (chosen->family == base.family() && chosen->ranges.empty()) return base;

  CameraModel cam = make_camera(chosen->family, base.width, base.height);
  cam.set_param("fx", *fx);
  cam.set_param("fy", *fy);
  cam.set_param("cx", *cx);
  cam.set_param("cy", *cy);
  for (const auto& r : chosen->ranges) cam.set_param(r.name, r.lo + (r.hi - r.lo) * uniform01(rng));
  cam.validate();
  return cam;
}

CameraModel sample_camera(const CameraSamplingSpec& spec, const CameraModel& base) {
  std::mt19937_64 rng(spec.seed);
  return sample_camera(spec, base, rng);
}

CameraSamplingSpec distorted_validation_spec() {
  CameraSamplingSpec spec;
  spec.seed = 13;
  spec.families.push_back(eucm_row(0.1));
  spec.families.push_back(fisheye_row(0.35, 0.6, 0.8, 0.01, 0.01));
  spec.families.push_back(fisheye_row(0.35, -0.6, -0.4, 0.01, 0.01));
  spec.families.push_back(fisheye_row(0.2, -0.2, 0.2, 0.05, 0.05));
  return spec;
}

CameraSamplingSpec augmentation_spec() {
  CameraSamplingSpec spec;
  spec.families.push_back(eucm_row(0.1));
  spec.families.push_back(fisheye_row(0.15, 0.1, 0.5, 0.005, 0.01));
  spec.families.push_back(fisheye_row(0.15, -0.5, -0.1, 0.005, 0.01));
  // The tangential ranges listed for these rows have no counterpart in the
  // radial-only Kannala-Brandt parametrization.
  spec.families.push_back(kb_row(0.2, 0.05));
  spec.families.push_back(kb_row(0.4, 0.5));
  return spec;
}

}  // namespace raycam
