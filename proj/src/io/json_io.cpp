#include <raycam/io.hpp>

#include <raycam/error.hpp>

#include <fstream>

namespace raycam::io {

using nlohmann::json;

namespace {

// Runs a reader, mapping library schema exceptions onto Error(Input).
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::Input, std::string(what) + ": " + e.what());
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object()) fail(ErrorKind::Input, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::Input, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

json to_json(const CameraModel& cam) {
  json params = json::object();
  for (const auto& [name, value] : cam.params()) params[name] = value;
  return {{"model", family_name(cam.family())}, {"width", cam.width}, {"height", cam.height}, {"params", params}};
}

CameraModel camera_from_json(const json& j) {
  return guarded("camera", [&] {
    const Family family = family_from_name(member(j, "model").get<std::string>());
    CameraModel cam = make_camera(family, member(j, "width").get<int>(), member(j, "height").get<int>());
    if (const auto it = j.find("params"); it != j.end()) {
      if (!it->is_object()) fail(ErrorKind::Input, "camera params must be an object");
      for (const auto& [name, value] : it->items()) cam.set_param(name, value.get<double>());
    }
    cam.validate();
    return cam;
  });
}

json to_json(const CameraSamplingSpec& spec) {
  json families = json::array();
  for (const FamilySpec& f : spec.families) {
    json ranges = json::object();
    for (const ParamRange& r : f.ranges) ranges[r.name] = {r.lo, r.hi};
    families.push_back({{"model", family_name(f.family)}, {"probability", f.probability}, {"ranges", ranges}});
  }
  return {{"seed", spec.seed}, {"families", families}};
}

CameraSamplingSpec sampling_spec_from_json(const json& j) {
  return guarded("sampling spec", [&] {
    CameraSamplingSpec spec;
    if (const auto it = j.find("seed"); it != j.end()) spec.seed = it->get<std::uint64_t>();
    for (const json& f : member(j, "families")) {
      FamilySpec fs;
      fs.family = family_from_name(member(f, "model").get<std::string>());
      fs.probability = member(f, "probability").get<double>();
      if (const auto it = f.find("ranges"); it != f.end()) {
        for (const auto& [name, range] : it->items()) {
          if (!range.is_array() || range.size() != 2) fail(ErrorKind::Input, "range '" + name + "' must be [lo, hi]");
          fs.ranges.push_back({name, range[0].get<double>(), range[1].get<double>()});
        }
      }
      spec.families.push_back(std::move(fs));
    }
    spec.validate();
    return spec;
  });
}

json to_json(const SHCoefficients& h) {
  json rows = json::array();
  for (const auto& c : h.coeffs) rows.push_back({c[0], c[1], c[2]});
  json out = {{"degree", h.degree},
              {"domain",
               {{"cx", h.domain.cx},
                {"cy", h.domain.cy},
                {"hfov", h.domain.hfov},
                {"width", h.domain.width},
                {"height", h.domain.height}}},
              {"coeffs", rows}};
  if (h.mode == ChannelMode::Tied) out["tied"] = true;
  return out;
}

SHCoefficients sh_from_json(const json& j) {
  return guarded("SH coefficients", [&] {
    SHCoefficients h;
    h.degree = member(j, "degree").get<int>();
    const json& d = member(j, "domain");
    h.domain.cx = member(d, "cx").get<double>();
    h.domain.cy = member(d, "cy").get<double>();
    h.domain.hfov = member(d, "hfov").get<double>();
    h.domain.width = member(d, "width").get<int>();
    h.domain.height = member(d, "height").get<int>();
    for (const json& row : member(j, "coeffs")) {
      if (!row.is_array() || row.size() != 3) fail(ErrorKind::Input, "coefficient rows must have 3 entries");
      h.coeffs.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    if (j.value("tied", false)) h.mode = ChannelMode::Tied;
    h.validate();
    return h;
  });
}

json to_json(const EvalConfig& cfg) {
  return {{"max_distance", cfg.max_distance},
          {"f_tau_max", cfg.f_tau_max()},
          {"rho_t_max_deg", cfg.rho_t_max_deg},
          {"curve_samples", cfg.curve_samples}};
}

EvalConfig eval_config_from_json(const json& j) {
  return guarded("eval config", [&] {
    EvalConfig cfg;
    if (!j.is_object()) fail(ErrorKind::Input, "expected a JSON object");
    cfg.max_distance = j.value("max_distance", cfg.max_distance);
    cfg.rho_t_max_deg = j.value("rho_t_max_deg", cfg.rho_t_max_deg);
    cfg.curve_samples = j.value("curve_samples", cfg.curve_samples);
    cfg.validate();
    return cfg;
  });
}

json to_json(const MetricsReport& r) {
  return {{"delta1", r.delta1},     {"delta2", r.delta2},       {"delta3", r.delta3},
          {"delta1_ssi", r.delta1_ssi}, {"a_rel", r.a_rel},     {"rmse", r.rmse},
          {"rmse_log", r.rmse_log}, {"log10", r.log10},         {"f_auc", r.f_auc},
          {"rho_auc", r.rho_auc},   {"valid_pixels", r.valid_pixels}, {"config", to_json(r.config)}};
}

json to_json(const LossConfig& cfg) {
  return {{"alpha_theta", cfg.alpha_theta},
          {"alpha_phi", cfg.alpha_phi},
          {"beta", cfg.beta},
          {"eta", cfg.eta},
          {"gamma", cfg.gamma}};
}

LossConfig loss_config_from_json(const json& j) {
  return guarded("loss config", [&] {
    if (!j.is_object()) fail(ErrorKind::Input, "expected a JSON object");
    LossConfig cfg;
    cfg.alpha_theta = j.value("alpha_theta", cfg.alpha_theta);
    cfg.alpha_phi = j.value("alpha_phi", cfg.alpha_phi);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.eta = j.value("eta", cfg.eta);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.validate();
    return cfg;
  });
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Input, std::string("invalid JSON: ") + e.what());
  }
}

json read_json(const std::filesystem::path& path) { return parse_json(read_file(path)); }

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace raycam::io
