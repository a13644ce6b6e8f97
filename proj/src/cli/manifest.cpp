#include "cli/cli.hpp"

#include <raycam/error.hpp>

namespace raycam::cli {

nlohmann::json make_manifest(const Context& ctx, const std::string& subcommand) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : ctx.outputs.paths()) outputs.push_back(p.string());
  nlohmann::json m = {{"tool", kToolVersion},
                      {"subcommand", subcommand},
                      {"args", ctx.args},
                      {"inputs", ctx.inputs},
                      {"outputs", outputs},
                      {"config", ctx.config}};
  m["config"]["jobs"] = ctx.jobs;
  if (ctx.seed) m["config"]["seed"] = *ctx.seed;
  return m;
}

void commit(Context& ctx, const std::string& subcommand) {
  if (ctx.outputs.paths().empty()) fail(ErrorKind::Input, "no outputs requested");
  std::string path = ctx.manifest_path;
  if (path.empty()) path = ctx.outputs.paths().front().string() + ".manifest.json";
  const nlohmann::json m = make_manifest(ctx, subcommand);
  ctx.outputs.add(path, io::dump_json(m));
  ctx.outputs.commit();
}

std::vector<std::string> manifest_args(const nlohmann::json& manifest) {
  try {
    if (manifest.at("tool").get<std::string>().rfind("raycam", 0) != 0)
      fail(ErrorKind::Input, "manifest was not written by raycam");
    return manifest.at("args").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, std::string("invalid manifest: ") + e.what());
  }
}

}  // namespace raycam::cli
