#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "holo/io.hpp"

namespace holo {

namespace {

bool host_little_endian() {
  const uint16_t probe = 1;
  return *reinterpret_cast<const uint8_t*>(&probe) == 1;
}

float swap_float(float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  bits = __builtin_bswap32(bits);
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void write_pfm(const std::string& path, const std::vector<RealGrid>& channels) {
  if (channels.size() != 1 && channels.size() != 3)
    throw DataError("pfm: only 1 or 3 channels supported");
  for (const auto& ch : channels)
    if (!ch.same_shape(channels.front())) throw DataError("pfm: channel shape mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("pfm: cannot write " + path);
  const int rows = channels.front().rows(), cols = channels.front().cols();
  out << (channels.size() == 1 ? "Pf" : "PF") << "\n" << cols << " " << rows << "\n";
  out << (host_little_endian() ? "-1.0" : "1.0") << "\n";
  // Bottom-to-top row order per the format.
  std::vector<float> row(static_cast<size_t>(cols) * channels.size());
  for (int r = rows - 1; r >= 0; --r) {
    size_t k = 0;
    for (int c = 0; c < cols; ++c)
      for (const auto& ch : channels) row[k++] = static_cast<float>(ch(r, c));
    out.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
  }
  if (!out) throw DataError("pfm: short write to " + path);
}

std::vector<RealGrid> read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("pfm: cannot open " + path);
  std::string magic;
  in >> magic;
  int nch = 0;
  if (magic == "Pf")
    nch = 1;
  else if (magic == "PF")
    nch = 3;
  else
    throw DataError("pfm: bad magic in " + path);
  int cols = 0, rows = 0;
  double scale = 0;
  in >> cols >> rows >> scale;
  if (!in || cols < 1 || rows < 1 || scale == 0)
    throw DataError("pfm: malformed header in " + path);
  in.get();  // single whitespace separator before the raster
  const bool file_little = scale < 0;
  const bool need_swap = file_little != host_little_endian();

  std::vector<RealGrid> channels(nch, RealGrid(rows, cols));
  std::vector<float> row(static_cast<size_t>(cols) * nch);
  for (int r = rows - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
    if (!in) throw DataError("pfm: truncated raster in " + path);
    size_t k = 0;
    for (int c = 0; c < cols; ++c)
      for (int ch = 0; ch < nch; ++ch) {
        float v = row[k++];
        if (need_swap) v = swap_float(v);
        channels[ch](r, c) = v;
      }
  }
  return channels;
}

namespace {

struct PngCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

std::vector<RealGrid> read_png(const std::string& path) {
  std::unique_ptr<FILE, PngCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("png: cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw DataError("png: not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png: decode failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // libpng reads big-endian words
  png_read_update_info(png, info);

  const int rows = png_get_image_height(png, info);
  const int cols = png_get_image_width(png, info);
  const int channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  const size_t stride = png_get_rowbytes(png, info);

  std::vector<png_byte> data(stride * rows);
  std::vector<png_bytep> row_ptrs(rows);
  for (int r = 0; r < rows; ++r) row_ptrs[r] = data.data() + stride * r;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const double peak = depth == 16 ? 65535.0 : 255.0;
  std::vector<RealGrid> out(channels, RealGrid(rows, cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int ch = 0; ch < channels; ++ch) {
        double v;
        if (depth == 16) {
          uint16_t raw;
          std::memcpy(&raw, row_ptrs[r] + (static_cast<size_t>(c) * channels + ch) * 2, 2);
          v = raw;
        } else {
          v = row_ptrs[r][static_cast<size_t>(c) * channels + ch];
        }
        out[ch](r, c) = v / peak;
      }
  return out;
}

void write_png8(const std::string& path, const std::vector<RealGrid>& channels, double gamma) {
  if (channels.size() != 1 && channels.size() != 3)
    throw DataError("png: only 1 or 3 channels supported");
  for (const auto& ch : channels)
    if (!ch.same_shape(channels.front())) throw DataError("png: channel shape mismatch");
  std::unique_ptr<FILE, PngCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("png: cannot write " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png: encode failed for " + path);
  }
  png_init_io(png, fp.get());
  const int rows = channels.front().rows(), cols = channels.front().cols();
  const int nch = static_cast<int>(channels.size());
  png_set_IHDR(png, info, cols, rows, 8,
               nch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<size_t>(cols) * nch);
  const double inv_gamma = gamma > 0 ? 1.0 / gamma : 1.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c)
      for (int ch = 0; ch < nch; ++ch) {
        const double v = std::clamp(channels[ch](r, c), 0.0, 1.0);
        row[static_cast<size_t>(c) * nch + ch] =
            static_cast<png_byte>(std::lround(std::pow(v, inv_gamma) * 255.0));
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_png16_gray(const std::string& path, const RealGrid& image) {
  std::unique_ptr<FILE, PngCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("png: cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png: encode failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.cols(), image.rows(), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);

  std::vector<uint16_t> row(image.cols());
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c)
      row[c] = static_cast<uint16_t>(std::lround(std::clamp(image(r, c), 0.0, 1.0) * 65535.0));
    png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace holo
