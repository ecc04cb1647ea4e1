// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/types.hpp"

#include <optional>
#include <span>

namespace rowsplat {

/// Low-pass dilation added to the projected covariance diagonal (px^2).
/// Keeps the 2x2 covariance comfortably SPD for the downstream EVD.
inline constexpr float kCovarianceDilation = 0.3f;

/// A projected Gaussian on the screen.
struct Splat2D {
  Eigen::Vector2f mean2d;              // pixels
  Eigen::Matrix2f cov2d;               // symmetric, SPD after dilation
  Eigen::Matrix2f inv_cov2d;           // symmetric
  float depth = 0.0f;                  // view-space z, > 0
  Eigen::Vector3f color;               // >= 0 per channel
  float opacity = 0.0f;                // in (0,1)
  std::uint32_t source_index = 0;
};

/// World-space covariance R * S * S^T * R^T from the stored rotation/scale.
Eigen::Matrix3f covariance_3d(const Gaussian3D& g);

/// Unit vector from the camera center to the Gaussian mean, world space.
/// Throws DegenerateInputError when the mean coincides with the center.
Eigen::Vector3f view_direction(const Gaussian3D& g, const Camera& cam);

/// Real spherical harmonics color: max(0, sum_k sh_k * Y_k(dir) + 0.5) per
/// channel, basis up to degree 3. |dir| must be 1 within 1e-4.
/// Throws NumericDomainError on unsupported coefficient counts.
Eigen::Vector3f eval_sh(std::span<const Eigen::Vector3f> sh, const Eigen::Vector3f& view_dir);

/// EWA perspective projection of one Gaussian. Returns nullopt when culled:
/// view z outside (near, far) or the projected mean farther than the 3-sigma
/// truncation radius from the image rectangle.
std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                        std::uint32_t source_index);

/// Order-preserving projection of a whole scene: slot i corresponds to
/// gaussian i, culled entries are nullopt.
std::vector<std::optional<Splat2D>> project_scene(const Scene& scene, const Camera& cam);

}  // namespace rowsplat
