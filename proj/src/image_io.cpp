#include "satsynth/image_io.hpp"

#include "satsynth/error.hpp"

#include <png.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace satsynth {

namespace {

static_assert(std::endian::native == std::endian::little,
              "float serialization assumes a little-endian host");

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kIo, path.string() + ": " + what);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) io_error(path, std::string("cannot open (") + std::strerror(errno) + ")");
  return f;
}

void png_error_handler(png_structp, png_const_charp message) { throw Error(ErrorCode::kIo, message); }
void png_warning_handler(png_structp, png_const_charp) {}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

void write_png(const std::filesystem::path& path, const ByteImage& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PNG output needs 1 or 3 channels");
  }
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                            png_warning_handler);
  if (!png) io_error(path, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  try {
    if (!info) io_error(path, "png_create_info_struct failed");
    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int row = 0; row < image.height; ++row) {
      png_write_row(png, const_cast<png_bytep>(image.data.data() + row * stride));
    }
    png_write_end(png, nullptr);
  } catch (const Error& e) {
    png_destroy_write_struct(&png, &info);
    io_error(path, e.what());
  }
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) io_error(path, "write failed");
}

ByteImage read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    io_error(path, "not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                           png_warning_handler);
  if (!png) io_error(path, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  ByteImage out;
  try {
    if (!info) io_error(path, "png_create_info_struct failed");
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = static_cast<int>(png_get_channels(png, info));
    if (out.channels != 1 && out.channels != 3) io_error(path, "unsupported channel layout");
    out.data.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
    const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
    for (int row = 0; row < out.height; ++row) {
      png_read_row(png, out.data.data() + row * stride, nullptr);
    }
  } catch (const Error& e) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_error(path, e.what());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_pfm(const std::filesystem::path& path, const FloatImage& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PFM output needs 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  out << (image.channels == 3 ? "PF" : "Pf") << '\n'
      << image.width << ' ' << image.height << '\n'
      << "-1.0\n";
  const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
  for (int row = image.height - 1; row >= 0; --row) {
    out.write(reinterpret_cast<const char*>(image.data.data() + row * stride),
              static_cast<std::streamsize>(stride * sizeof(float)));
  }
  if (!out) io_error(path, "write failed");
}

FloatImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open");
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || (magic != "PF" && magic != "Pf")) io_error(path, "malformed PFM header");
  if (width <= 0 || height <= 0) io_error(path, "invalid PFM dimensions");
  if (scale >= 0.0) io_error(path, "big-endian PFM is not supported");
  in.get();  // single whitespace byte before the raster
  FloatImage image(width, height, magic == "PF" ? 3 : 1);
  const std::size_t stride = static_cast<std::size_t>(width) * image.channels;
  for (int row = height - 1; row >= 0; --row) {
    in.read(reinterpret_cast<char*>(image.data.data() + row * stride),
            static_cast<std::streamsize>(stride * sizeof(float)));
    if (!in) io_error(path, "truncated PFM raster");
  }
  return image;
}

void write_heatmaps(const std::filesystem::path& path, const HeatmapTensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  out.write("SPNH", 4);
  write_u32(out, 1);
  write_u32(out, static_cast<std::uint32_t>(tensor.height()));
  write_u32(out, static_cast<std::uint32_t>(tensor.width()));
  write_u32(out, static_cast<std::uint32_t>(tensor.channels()));
  out.write(reinterpret_cast<const char*>(tensor.values().data()),
            static_cast<std::streamsize>(tensor.values().size() * sizeof(float)));
  if (!out) io_error(path, "write failed");
}

HeatmapTensor read_heatmaps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open");
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SPNH", 4) != 0) io_error(path, "bad heatmap magic");
  const std::uint32_t version = read_u32(in);
  const std::uint32_t height = read_u32(in);
  const std::uint32_t width = read_u32(in);
  const std::uint32_t channels = read_u32(in);
  if (!in) io_error(path, "truncated heatmap header");
  if (version != 1) io_error(path, "unsupported heatmap version " + std::to_string(version));
  if (width == 0 || height == 0 || channels == 0 || width > 65536 || height > 65536 ||
      channels > 4096) {
    io_error(path, "implausible heatmap dimensions");
  }
  std::vector<float> values(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) io_error(path, "truncated heatmap data");
  try {
    return HeatmapTensor(static_cast<int>(width), static_cast<int>(height),
                         static_cast<int>(channels), std::move(values));
  } catch (const Error& e) {
    io_error(path, e.what());
  }
}

}  // namespace satsynth
