// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/image.hpp"

#include "rowsplat/types.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace rowsplat {

ImageBuffer::ImageBuffer(int w, int h, const Eigen::Vector3f& bg)
    : width(w),
      height(h),
      background(bg),
      rgb(static_cast<std::size_t>(w) * h * 3, 0.0),
      transmittance(static_cast<std::size_t>(w) * h, 1.0) {}

Eigen::Vector3d ImageBuffer::composited(int x, int y) const {
  const std::size_t p = pixel_index(x, y);
  const double t = transmittance[p];
  return {rgb[3 * p + 0] + t * background[0],
          rgb[3 * p + 1] + t * background[1],
          rgb[3 * p + 2] + t * background[2]};
}

std::vector<double> ImageBuffer::composite() const {
  std::vector<double> out(rgb.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Eigen::Vector3d c = composited(x, y);
      const std::size_t p = pixel_index(x, y);
      out[3 * p + 0] = c[0];
      out[3 * p + 1] = c[1];
      out[3 * p + 2] = c[2];
    }
  }
  return out;
}

std::uint8_t quantize_channel(double value) {
  const double clamped = std::clamp(value, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

std::vector<std::uint8_t> to_bytes_rgb8(const ImageBuffer& image) {
  const std::vector<double> c = image.composite();
  std::vector<std::uint8_t> bytes(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    bytes[i] = quantize_channel(c[i]);
  }
  return bytes;
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  return out;
}

void put_u32_be(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  buf.push_back(static_cast<std::uint8_t>(v >> 24));
  buf.push_back(static_cast<std::uint8_t>(v >> 16));
  buf.push_back(static_cast<std::uint8_t>(v >> 8));
  buf.push_back(static_cast<std::uint8_t>(v));
}

void write_png_chunk(std::ofstream& out, const char type[4],
                     const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> head;
  put_u32_be(head, static_cast<std::uint32_t>(data.size()));
  out.write(reinterpret_cast<const char*>(head.data()), 4);
  out.write(type, 4);
  if (!data.empty()) {
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  }
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!data.empty()) {
    crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
  }
  std::vector<std::uint8_t> tail;
  put_u32_be(tail, static_cast<std::uint32_t>(crc));
  out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

}  // namespace

void write_ppm(const ImageBuffer& image, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  const std::vector<std::uint8_t> bytes = to_bytes_rgb8(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("short write: " + path);
  }
}

void write_png(const ImageBuffer& image, const std::string& path) {
  const std::vector<std::uint8_t> pixels = to_bytes_rgb8(image);

  // Raw scanlines, filter byte 0 per row.
  std::vector<std::uint8_t> raw;
  raw.reserve(pixels.size() + static_cast<std::size_t>(image.height));
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = pixels.data() + static_cast<std::size_t>(y) * stride;
    raw.insert(raw.end(), row, row + stride);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK) {
    throw IoError("zlib compression failed for " + path);
  }
  compressed.resize(compressed_size);

  std::ofstream out = open_output(path);
  static const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.write(reinterpret_cast<const char*>(signature), 8);

  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // interlace
  write_png_chunk(out, "IHDR", ihdr);
  write_png_chunk(out, "IDAT", compressed);
  write_png_chunk(out, "IEND", {});
  if (!out) {
    throw IoError("short write: " + path);
  }
}

void write_pfm(const ImageBuffer& image, const std::string& path) {
  std::ofstream out = open_output(path);
  // Negative scale marks little-endian data; rows bottom-to-top per the format.
  out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(image.width) * 3);
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      const Eigen::Vector3d c = image.composited(x, y);
      row[3 * static_cast<std::size_t>(x) + 0] = static_cast<float>(c[0]);
      row[3 * static_cast<std::size_t>(x) + 1] = static_cast<float>(c[1]);
      row[3 * static_cast<std::size_t>(x) + 2] = static_cast<float>(c[2]);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) {
    throw IoError("short write: " + path);
  }
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  return in;
}

// Reads one whitespace-delimited token, skipping PPM comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
    } else if (!tok.empty()) {
      return tok;
    }
  }
  if (tok.empty()) {
    throw FormatError("unexpected end of header");
  }
  return tok;
}

}  // namespace

FloatImage read_ppm(const std::string& path) {
  std::ifstream in = open_input(path);
  if (next_token(in) != "P6") {
    throw FormatError("not a P6 PPM: " + path);
  }
  FloatImage img;
  img.width = std::stoi(next_token(in));
  img.height = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (maxval != 255) {
    throw FormatError("unsupported PPM maxval (want 255): " + path);
  }
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
  std::vector<std::uint8_t> bytes(n);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError("truncated PPM payload: " + path);
  }
  img.rgb.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.rgb[i] = bytes[i] / 255.0;
  }
  return img;
}

FloatImage read_pfm(const std::string& path) {
  std::ifstream in = open_input(path);
  if (next_token(in) != "PF") {
    throw FormatError("not a color PFM: " + path);
  }
  FloatImage img;
  img.width = std::stoi(next_token(in));
  img.height = std::stoi(next_token(in));
  const double scale = std::stod(next_token(in));
  if (scale >= 0.0) {
    throw FormatError("big-endian PFM unsupported: " + path);
  }
  const std::size_t per_row = static_cast<std::size_t>(img.width) * 3;
  std::vector<float> row(per_row);
  img.rgb.resize(per_row * static_cast<std::size_t>(img.height));
  for (int y = img.height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(per_row * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != per_row * sizeof(float)) {
      throw FormatError("truncated PFM payload: " + path);
    }
    double* dst = img.rgb.data() + static_cast<std::size_t>(y) * per_row;
    for (std::size_t i = 0; i < per_row; ++i) {
      dst[i] = row[i];
    }
  }
  return img;
}

FloatImage read_image(const std::string& path) {
  if (path.size() >= 4) {
    const std::string ext = path.substr(path.size() - 4);
    if (ext == ".ppm") return read_ppm(path);
    if (ext == ".pfm") return read_pfm(path);
  }
  throw FormatError("unsupported image extension (want .ppm or .pfm): " + path);
}

namespace {

double mse_clamped(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::clamp(a[i], 0.0, 1.0) - std::clamp(b[i], 0.0, 1.0);
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace

double psnr_db(const FloatImage& a, const FloatImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DataError("psnr: image dimensions differ");
  }
  const double mse = mse_clamped(a.rgb, b.rgb);
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(1.0 / mse);
}

double psnr_db(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DataError("psnr: image dimensions differ");
  }
  const double mse = mse_clamped(a.composite(), b.composite());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(1.0 / mse);
}

double max_channel_difference(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DataError("image dimensions differ");
  }
  const std::vector<double> ca = a.composite();
  const std::vector<double> cb = b.composite();
  double worst = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    worst = std::max(worst, std::abs(ca[i] - cb[i]));
  }
  return worst;
}

}  // namespace rowsplat
