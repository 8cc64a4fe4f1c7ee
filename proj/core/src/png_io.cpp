#include <png.h>

#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "tfr/error.hpp"
#include "tfr/featuregram.hpp"

namespace tfr {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_quiet(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; everything with a destructor lives in the
// caller, outside the setjmp frame.
bool write_gray_png(std::FILE* file, const std::vector<png_byte>& pixels, png_uint_32 rows,
                    png_uint_32 cols) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, cols, rows, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 r = 0; r < rows; ++r) {
    png_write_row(png, pixels.data() + std::size_t{r} * cols);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

bool read_gray_png(std::FILE* file, std::vector<png_byte>& pixels, png_uint_32& rows,
                   png_uint_32& cols) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  cols = png_get_image_width(png, info);
  rows = png_get_image_height(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  pixels.resize(std::size_t{rows} * cols);
  for (png_uint_32 r = 0; r < rows; ++r) {
    png_read_row(png, pixels.data() + std::size_t{r} * cols, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void export_png(const FeatureImage& image, const std::filesystem::path& path) {
  const auto rows = static_cast<png_uint_32>(image.values.rows());
  const auto cols = static_cast<png_uint_32>(image.values.cols());
  if (rows == 0 || cols == 0) throw std::invalid_argument("export_png: empty image");

  std::vector<png_byte> pixels(std::size_t{rows} * cols);
  for (png_uint_32 r = 0; r < rows; ++r) {
    // Top row of the picture is the highest frequency.
    const auto src = static_cast<Eigen::Index>(rows - 1 - r);
    for (png_uint_32 c = 0; c < cols; ++c) {
      const double v = std::clamp(image.values(src, c), -1.0, 1.0);
      pixels[std::size_t{r} * cols + c] =
          static_cast<png_byte>(std::floor((v + 1.0) / 2.0 * 255.0 + 0.5));
    }
  }

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw Error("cannot create " + path.string());
  if (!write_gray_png(file.get(), pixels, rows, cols) || std::fflush(file.get()) != 0) {
    throw Error("png: failed to write " + path.string());
  }
}

Eigen::MatrixXd import_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw Error("cannot open " + path.string());
  std::vector<png_byte> pixels;
  png_uint_32 rows = 0, cols = 0;
  if (!read_gray_png(file.get(), pixels, rows, cols)) {
    throw Error("png: " + path.string() + " is not a readable 8-bit grayscale PNG");
  }
  Eigen::MatrixXd out(rows, cols);
  for (png_uint_32 r = 0; r < rows; ++r) {
    for (png_uint_32 c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(rows - 1 - r), c) = pixels[std::size_t{r} * cols + c] / 255.0 * 2.0 - 1.0;
    }
  }
  return out;
}

}  // namespace tfr
