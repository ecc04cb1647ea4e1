// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace rowsplat {

/// Per-pixel accumulation state of a render. Color channels hold the
/// depth-ordered alpha-blend sum; transmittance starts at 1 and only decays.
/// Values are stored in double; the active render precision decides how they
/// were computed, storage does not add rounding of its own.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  Eigen::Vector3f background = Eigen::Vector3f::Zero();
  std::vector<double> rgb;            // 3 * width * height, row-major
  std::vector<double> transmittance;  // width * height, init 1.0

  ImageBuffer() = default;
  ImageBuffer(int w, int h, const Eigen::Vector3f& bg);

  std::size_t pixel_index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  /// Final color of a pixel: accumulated sum composited over the background
  /// with the remaining transmittance.
  Eigen::Vector3d composited(int x, int y) const;

  /// Full composited image, 3 doubles per pixel, row-major.
  std::vector<double> composite() const;
};

/// 8-bit quantization used for PPM/PNG: clamp to [0,1], scale by 255, round.
std::uint8_t quantize_channel(double value);

std::vector<std::uint8_t> to_bytes_rgb8(const ImageBuffer& image);

void write_ppm(const ImageBuffer& image, const std::string& path);
void write_png(const ImageBuffer& image, const std::string& path);
/// PFM (portable float map), 32-bit float RGB, little-endian (negative scale).
/// Lossless up to the double->float narrowing; used for exact comparisons.
void write_pfm(const ImageBuffer& image, const std::string& path);

/// Decoded image for comparison: composited values in [0, inf).
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // 3 per pixel
};

FloatImage read_ppm(const std::string& path);
FloatImage read_pfm(const std::string& path);
/// Dispatches on extension (.ppm / .pfm).
FloatImage read_image(const std::string& path);

/// 10*log10(1 / MSE) over [0,1]-clamped channels; +inf when identical.
/// Throws DataError on dimension mismatch.
double psnr_db(const FloatImage& a, const FloatImage& b);
double psnr_db(const ImageBuffer& a, const ImageBuffer& b);

/// Largest per-channel absolute difference of the composited images.
double max_channel_difference(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace rowsplat
