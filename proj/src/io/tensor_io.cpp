#include <raycam/io.hpp>

#include <raycam/error.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace raycam::io {

namespace {

constexpr char kMagic[4] = {'R', 'Y', 'F', '1'};
constexpr std::uint32_t kFloat32 = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in, std::size_t& pos) {
  if (pos + 4 > in.size()) fail(ErrorKind::Input, "truncated tensor header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

void require_dims(const Tensor& t, std::initializer_list<std::uint32_t> want, const char* what) {
  if (t.dims != std::vector<std::uint32_t>(want)) {
    std::string got;
    for (auto d : t.dims) got += (got.empty() ? "" : "x") + std::to_string(d);
    fail(ErrorKind::Shape, std::string(what) + " has shape " + got);
  }
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string encode_tensor(const Tensor& t) {
  if (t.data.size() != t.element_count()) fail(ErrorKind::Shape, "tensor data does not match its dims");
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put_u32(out, d);
  put_u32(out, kFloat32);
  out.reserve(out.size() + 4 * t.data.size());
  for (float f : t.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_tensor(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorKind::Input, "not an RYF1 tensor");
  std::size_t pos = 4;
  const std::uint32_t rank = get_u32(bytes, pos);
  if (rank > 8) fail(ErrorKind::Input, "tensor rank too large");
  Tensor t;
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(get_u32(bytes, pos));
  if (get_u32(bytes, pos) != kFloat32) fail(ErrorKind::Input, "unsupported tensor dtype");
  const std::size_t n = t.element_count();
  if (bytes.size() - pos != 4 * n) fail(ErrorKind::Input, "tensor payload size does not match its dims");
  t.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.data[i] = std::bit_cast<float>(get_u32(bytes, pos));
  return t;
}

Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file(path)); }

Tensor rays_tensor(const RayField& rays) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(rays.height), static_cast<std::uint32_t>(rays.width), 3};
  t.data.resize(rays.size() * 3);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    t.data[3 * i + 0] = static_cast<float>(rays.x[i]);
    t.data[3 * i + 1] = static_cast<float>(rays.y[i]);
    t.data[3 * i + 2] = static_cast<float>(rays.z[i]);
  }
  return t;
}

Tensor mask_tensor(const Mask& mask, GridSize grid) {
  if (mask.size() != grid.count()) fail(ErrorKind::Shape, "mask does not match its grid");
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(grid.height), static_cast<std::uint32_t>(grid.width)};
  t.data.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) t.data[i] = mask[i] ? 1.0f : 0.0f;
  return t;
}

Tensor scalar_tensor(const ScalarMap& map) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width)};
  t.data.resize(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) t.data[i] = static_cast<float>(map.values[i]);
  return t;
}

RayField rays_from_tensor(const Tensor& dirs, const Tensor* mask) {
  if (dirs.dims.size() != 3 || dirs.dims[2] != 3) fail(ErrorKind::Shape, "ray tensor must be H x W x 3");
  const int h = static_cast<int>(dirs.dims[0]), w = static_cast<int>(dirs.dims[1]);
  if (mask) require_dims(*mask, {dirs.dims[0], dirs.dims[1]}, "ray mask");
  RayField rays(w, h);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    rays.x[i] = dirs.data[3 * i + 0];
    rays.y[i] = dirs.data[3 * i + 1];
    rays.z[i] = dirs.data[3 * i + 2];
    rays.valid[i] = mask ? mask->data[i] != 0.0f : 1;
  }
  return rays;
}

ScalarMap scalar_from_tensor(const Tensor& values, const Tensor* mask) {
  const bool planar = values.dims.size() == 2;
  const bool single = values.dims.size() == 3 && values.dims[2] == 1;
  if (!planar && !single) fail(ErrorKind::Shape, "scalar tensor must be H x W");
  if (mask) require_dims(*mask, {values.dims[0], values.dims[1]}, "scalar mask");
  ScalarMap map(static_cast<int>(values.dims[1]), static_cast<int>(values.dims[0]));
  for (std::size_t i = 0; i < map.size(); ++i) {
    map.values[i] = values.data[i];
    map.valid[i] = std::isfinite(values.data[i]) && (!mask || mask->data[i] != 0.0f);
  }
  return map;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Input, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void OutputBatch::add(std::filesystem::path path, std::string bytes) {
  paths_.push_back(std::move(path));
  payloads_.push_back(std::move(bytes));
}

void OutputBatch::commit() {
  std::random_device rd;
  const std::string tag = std::to_string(rd());
  std::vector<std::filesystem::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    std::filesystem::path tmp = paths_[i];
    tmp += ".tmp-" + tag;
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(payloads_[i].data(), static_cast<std::streamsize>(payloads_[i].size()));
    out.close();
    if (!out) {
      cleanup();
      fail(ErrorKind::Input, "cannot write '" + paths_[i].string() + "'");
    }
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(temps[i], paths_[i], ec);
    if (ec) {
      cleanup();
      fail(ErrorKind::Input, "cannot move output into place: '" + paths_[i].string() + "'");
    }
  }
}

}  // namespace raycam::io
