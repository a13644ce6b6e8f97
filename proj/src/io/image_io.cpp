#include <raycam/io.hpp>

#include <raycam/error.hpp>

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace raycam::io {

Image read_png(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    fail(ErrorKind::Input, "cannot decode PNG '" + path.string() + "': " + img.message);
  img.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    fail(ErrorKind::Input, "cannot decode PNG '" + path.string() + "': " + img.message);
  }
  Image out(static_cast<int>(img.width), static_cast<int>(img.height), 3);
  std::transform(buf.begin(), buf.end(), out.data.begin(), [](png_byte b) { return static_cast<double>(b); });
  return out;
}

std::string encode_png(const Image& in) {
  if (in.channels != 1 && in.channels != 3 && in.channels != 4)
    fail(ErrorKind::Shape, "PNG output needs 1, 3 or 4 channels");
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(in.width);
  img.height = static_cast<png_uint_32>(in.height);
  img.format = in.channels == 1 ? PNG_FORMAT_GRAY : in.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_RGBA;
  std::vector<png_byte> buf(in.data.size());
  std::transform(in.data.begin(), in.data.end(), buf.begin(),
                 [](double v) { return static_cast<png_byte>(std::clamp(std::lround(v), 0L, 255L)); });

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, buf.data(), 0, nullptr))
    fail(ErrorKind::Input, std::string("cannot encode PNG: ") + img.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, buf.data(), 0, nullptr))
    fail(ErrorKind::Input, std::string("cannot encode PNG: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace raycam::io
