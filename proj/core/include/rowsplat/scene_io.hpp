// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/types.hpp"

#include <cstdint>
#include <string>

namespace rowsplat {

/// Loads a binary little-endian splat PLY (the layout used by published
/// Gaussian-splatting scenes: x,y,z, optional nx,ny,nz, f_dc_0..2,
/// f_rest_0..44, opacity, scale_0..2, rot_0..3; all float32, degree-3 SH).
/// Activations are applied exactly once here: opacity = logistic(raw),
/// scale = exp(raw), quaternion normalized.
/// Throws FormatError (header problems, naming the property) or DataError
/// (non-finite values, with the element index).
Scene load_ply(const std::string& path);

/// Inverse of load_ply: raw fields (logit/log/unit quaternion) are stored on
/// disk. Lower SH degrees are zero-padded to the fixed degree-3 layout, so
/// load_ply(write_ply(s)) == s holds bitwise for degree-3 scenes.
void write_ply(const Scene& scene, const std::string& path);

struct SyntheticConfig {
  std::size_t count = 0;
  Eigen::Vector3f extent_min{-1.0f, -1.0f, -1.0f};
  Eigen::Vector3f extent_max{1.0f, 1.0f, 1.0f};
  double scale_min = 0.05;  // world-unit stddev bounds, log-uniform draw
  double scale_max = 0.5;
  double opacity_min = 0.1;
  double opacity_max = 0.9;
  int sh_degree = 3;
  /// Largest-to-smallest axis ratio drawn per Gaussian; 1 = isotropic.
  double max_anisotropy = 4.0;
  std::uint64_t seed = 0;
};

/// Deterministic pure function of the config (own uniform/quaternion
/// sampling on top of mt19937_64, so the output is identical across
/// standard libraries). Throws DataError on inverted ranges.
Scene synthetic_scene(const SyntheticConfig& config);

/// Camera JSON: {"world_to_view":[16 row-major numbers],"fx":..,"fy":..,
/// "cx":..,"cy":..,"width":..,"height":..,"near":..,"far":..}.
/// Throws FormatError naming the missing/invalid field; validates invariants.
Camera load_camera(const std::string& path);
void save_camera(const Camera& camera, const std::string& path);

}  // namespace rowsplat
