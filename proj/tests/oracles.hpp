// SPDX-License-Identifier: Apache-2.0
// Test-only reference implementations. Everything here is deliberately
// independent of the library's computation paths: direct formulas, brute
// force and quadratic-time scans, no shared helpers beyond the data types.
#pragma once

#include <rowsplat/cache_sim.hpp>
#include <rowsplat/projection.hpp>
#include <rowsplat/scene_io.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Spherical harmonics: real basis up to degree 3 with constants derived from
// their sqrt expressions and the odd-|m| sign convention of the splat
// ecosystem (never from the library's float literals).
inline std::array<double, 16> sh_basis(const Eigen::Vector3d& d) {
  const double pi = std::acos(-1.0);
  const double x = d.x(), y = d.y(), z = d.z();
  std::array<double, 16> basis{};
  basis[0] = 0.5 * std::sqrt(1.0 / pi);

  const double c1 = std::sqrt(3.0 / (4.0 * pi));
  basis[1] = -c1 * y;
  basis[2] = c1 * z;
  basis[3] = -c1 * x;

  basis[4] = 0.5 * std::sqrt(15.0 / pi) * x * y;
  basis[5] = -0.5 * std::sqrt(15.0 / pi) * y * z;
  basis[6] = 0.25 * std::sqrt(5.0 / pi) * (2.0 * z * z - x * x - y * y);
  basis[7] = -0.5 * std::sqrt(15.0 / pi) * x * z;
  basis[8] = 0.25 * std::sqrt(15.0 / pi) * (x * x - y * y);

  basis[9] = -0.25 * std::sqrt(35.0 / (2.0 * pi)) * y * (3.0 * x * x - y * y);
  basis[10] = 0.5 * std::sqrt(105.0 / pi) * x * y * z;
  basis[11] = -0.25 * std::sqrt(21.0 / (2.0 * pi)) * y * (4.0 * z * z - x * x - y * y);
  basis[12] = 0.25 * std::sqrt(7.0 / pi) * z * (2.0 * z * z - 3.0 * x * x - 3.0 * y * y);
  basis[13] = -0.25 * std::sqrt(21.0 / (2.0 * pi)) * x * (4.0 * z * z - x * x - y * y);
  basis[14] = 0.25 * std::sqrt(105.0 / pi) * z * (x * x - y * y);
  basis[15] = -0.25 * std::sqrt(35.0 / (2.0 * pi)) * x * (x * x - 3.0 * y * y);
  return basis;
}

inline Eigen::Vector3d sh_color(const std::vector<Eigen::Vector3f>& sh,
                                const Eigen::Vector3d& dir) {
  const std::array<double, 16> basis = sh_basis(dir);
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < sh.size(); ++k) {
    c += basis[k] * sh[k].cast<double>();
  }
  c.array() += 0.5;
  return c.cwiseMax(0.0);
}

// ---------------------------------------------------------------------------
// Direct-space geometry.

inline double direct_exponent(double px, double py, const rowsplat::Splat2D& s) {
  const Eigen::Vector2d d(px - s.mean2d.x(), py - s.mean2d.y());
  const Eigen::Matrix2d ic = s.inv_cov2d.cast<double>();
  return d.dot(ic * d);
}

inline double threshold(const rowsplat::Splat2D& s, double alpha_min) {
  return std::min(9.0, 2.0 * std::log(static_cast<double>(s.opacity) / alpha_min));
}

/// Brute-force significant-fragment mask over a pixel rectangle
/// [x0,x1] x [y0,y1] (inclusive), by direct evaluation against Th.
inline std::vector<std::pair<int, int>> grid_shaded(const rowsplat::Splat2D& s, int x0, int x1,
                                                    int y0, int y1, double alpha_min) {
  std::vector<std::pair<int, int>> shaded;
  const double th = threshold(s, alpha_min);
  if (!(th > 0.0)) {
    return shaded;
  }
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (direct_exponent(x + 0.5, y + 0.5, s) <= th) {
        shaded.emplace_back(x, y);
      }
    }
  }
  return shaded;
}

/// Linear-scan first significant column of a row, direct evaluation.
inline std::optional<int> linear_scan_first(const rowsplat::Splat2D& s, int row, int c0, int c1,
                                            double alpha_min) {
  const double th = threshold(s, alpha_min);
  if (!(th > 0.0)) {
    return std::nullopt;
  }
  for (int col = c0; col <= c1; ++col) {
    if (direct_exponent(col + 0.5, row + 0.5, s) <= th) {
      return col;
    }
  }
  return std::nullopt;
}

/// Closed-form first significant column: roots of the row-restricted
/// quadratic. Exists only as a cross-check; the render path must never use
/// a closed-form locator.
inline std::optional<int> quadratic_first_col(const rowsplat::Splat2D& s, int row, int c0, int c1,
                                              double alpha_min) {
  const double th = threshold(s, alpha_min);
  if (!(th > 0.0)) {
    return std::nullopt;
  }
  const Eigen::Matrix2d ic = s.inv_cov2d.cast<double>();
  const double a = ic(0, 0);
  const double b = 0.5 * (ic(0, 1) + ic(1, 0));
  const double c = ic(1, 1);
  const double dy = (row + 0.5) - static_cast<double>(s.mean2d.y());
  const double disc = b * b * dy * dy - a * (c * dy * dy - th);
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double left = (-b * dy - std::sqrt(disc)) / a;   // x offsets from mean
  const double right = (-b * dy + std::sqrt(disc)) / a;
  const double mx = s.mean2d.x();
  const int first = std::max(c0, static_cast<int>(std::ceil(mx + left - 0.5)));
  const int last = std::min(c1, static_cast<int>(std::floor(mx + right - 0.5)));
  if (first > last) {
    return std::nullopt;
  }
  return first;
}

inline double power_iteration_lambda_max(const Eigen::Matrix2d& m) {
  Eigen::Vector2d v(1.0, 0.7071067811865476);
  double rq = 0.0;
  // Close eigenvalue pairs converge slowly; iterate on the Rayleigh
  // quotient until it stabilizes (its error is bounded by the gap anyway).
  for (int i = 0; i < 1000000; ++i) {
    v = m * v;
    v.normalize();
    const double next = v.dot(m * v);
    if (i > 4 && std::abs(next - rq) <= 1e-14 * std::abs(next)) {
      return next;
    }
    rq = next;
  }
  return rq;
}

/// Finite-difference EWA covariance: numeric Jacobian of the pinhole
/// projection at the view-space mean, applied to the view-space covariance.
inline Eigen::Matrix2d fd_projected_cov(const rowsplat::Gaussian3D& g,
                                        const rowsplat::Camera& cam, double step = 1e-4) {
  const Eigen::Matrix3d w3 = cam.rotation().cast<double>();
  const Eigen::Vector3d t =
      w3 * g.mean.cast<double>() + cam.translation().cast<double>();

  const auto project = [&](const Eigen::Vector3d& p) {
    return Eigen::Vector2d(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
  };
  Eigen::Matrix<double, 2, 3> jac;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d hi = t, lo = t;
    hi[axis] += step;
    lo[axis] -= step;
    jac.col(axis) = (project(hi) - project(lo)) / (2.0 * step);
  }

  const Eigen::Matrix3d rot = [&g] {
    const Eigen::Vector4f q = g.rotation;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
  }();
  const Eigen::Matrix3d cov3 =
      rot * g.scale.asDiagonal() * g.scale.asDiagonal() * rot.transpose();
  return jac * (w3 * cov3 * w3.transpose()) * jac.transpose();
}

// ---------------------------------------------------------------------------
// Plain double alpha blending, one pixel.
struct BlendRef {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double transmittance = 1.0;
};

inline BlendRef blend_reference(const std::vector<std::pair<double, Eigen::Vector3d>>& fragments,
                                const Eigen::Vector3d& background, double t_stop = 1e-4) {
  BlendRef out;
  for (const auto& [alpha, color] : fragments) {
    if (out.transmittance < t_stop) {
      break;
    }
    out.color += out.transmittance * alpha * color;
    out.transmittance *= 1.0 - alpha;
  }
  out.color += out.transmittance * background;
  return out;
}

// ---------------------------------------------------------------------------
// Cache policy references.

/// Belady optimal replacement by naive forward scanning at every eviction
/// (no precomputed annotations), tie-break toward the lower gaussian id.
inline std::uint64_t belady_hits(const std::vector<rowsplat::CacheAccess>& accesses,
                                 std::size_t lines) {
  std::vector<std::uint32_t> resident;
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    const std::uint32_t g = accesses[i].gaussian;
    if (std::find(resident.begin(), resident.end(), g) != resident.end()) {
      ++hits;
      continue;
    }
    if (resident.size() == lines) {
      // Scan the future once per resident line; farthest next tile wins.
      std::size_t victim = 0;
      std::uint64_t victim_next = 0;
      std::uint32_t victim_id = 0;
      bool have = false;
      for (std::size_t r = 0; r < resident.size(); ++r) {
        std::uint64_t next = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t j = i + 1; j < accesses.size(); ++j) {
          if (accesses[j].gaussian == resident[r]) {
            next = accesses[j].tile;
            break;
          }
        }
        if (!have || next > victim_next ||
            (next == victim_next && resident[r] < victim_id)) {
          have = true;
          victim = r;
          victim_next = next;
          victim_id = resident[r];
        }
      }
      resident.erase(resident.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    resident.push_back(g);
  }
  return hits;
}

/// LRU reference on a plain vector (front = least recent).
inline std::uint64_t lru_hits(const std::vector<rowsplat::CacheAccess>& accesses,
                              std::size_t lines) {
  std::vector<std::uint32_t> order;
  std::uint64_t hits = 0;
  for (const rowsplat::CacheAccess& a : accesses) {
    const auto it = std::find(order.begin(), order.end(), a.gaussian);
    if (it != order.end()) {
      ++hits;
      order.erase(it);
    } else if (order.size() == lines) {
      order.erase(order.begin());
    }
    order.push_back(a.gaussian);
  }
  return hits;
}

/// Quadratic next-use annotation: forward scan per access.
inline std::vector<std::uint64_t> next_use_quadratic(
    const std::vector<rowsplat::CacheAccess>& accesses) {
  std::vector<std::uint64_t> next(accesses.size(), rowsplat::kNoNextUse);
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    for (std::size_t j = i + 1; j < accesses.size(); ++j) {
      if (accesses[j].gaussian == accesses[i].gaussian) {
        next[i] = accesses[j].tile;
        break;
      }
    }
  }
  return next;
}

// ---------------------------------------------------------------------------
// Fixtures.

inline rowsplat::Camera make_camera(int width = 640, int height = 480, float focal = 500.0f) {
  rowsplat::Camera cam;
  cam.fx = cam.fy = focal;
  cam.cx = static_cast<float>(width) / 2.0f;
  cam.cy = static_cast<float>(height) / 2.0f;
  cam.width = width;
  cam.height = height;
  cam.near_z = 0.2f;
  cam.far_z = 100.0f;
  return cam;
}

/// Hand-built splat: diagonal (then rotated) covariance in pixel space.
inline rowsplat::Splat2D make_splat(const Eigen::Vector2f& mean, double sigma_x, double sigma_y,
                                    double angle_rad, float opacity,
                                    const Eigen::Vector3f& color = {1.0f, 0.5f, 0.25f},
                                    float depth = 10.0f, std::uint32_t index = 0) {
  Eigen::Matrix2d rot;
  rot << std::cos(angle_rad), -std::sin(angle_rad), std::sin(angle_rad), std::cos(angle_rad);
  const Eigen::Matrix2d cov =
      rot * Eigen::Vector2d(sigma_x * sigma_x, sigma_y * sigma_y).asDiagonal() * rot.transpose();
  rowsplat::Splat2D s;
  s.mean2d = mean;
  s.cov2d = cov.cast<float>();
  s.inv_cov2d = cov.inverse().cast<float>();
  s.depth = depth;
  s.color = color;
  s.opacity = opacity;
  s.source_index = index;
  return s;
}

/// Desk-scale stand-in for the real-scene statistics: footprints a few
/// pixels across with mild anisotropy, tuned so that the significant
/// fraction, utilization, and fragment:gaussian bands all land where the
/// full-scale measurements sit.
inline rowsplat::SyntheticConfig realistic_config(std::size_t count, std::uint64_t seed) {
  rowsplat::SyntheticConfig cfg;
  cfg.count = count;
  cfg.extent_min = {-7.0f, -5.0f, 8.0f};
  cfg.extent_max = {7.0f, 5.0f, 20.0f};
  cfg.scale_min = 0.009;
  cfg.scale_max = 0.055;
  cfg.opacity_min = 0.15;
  cfg.opacity_max = 0.95;
  cfg.sh_degree = 3;
  cfg.max_anisotropy = 7.0;
  cfg.seed = seed;
  return cfg;
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(seed ^ (salt * 0x9e3779b97f4a7c15ull))();
}

/// Axis-aligned elongated scene: long horizontal footprints so row segments
/// are long. sigma_x_px is the projected x stddev in pixels at z = 10,
/// f = 500.
inline rowsplat::Scene elongated_scene(std::size_t count, double sigma_x_px,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rowsplat::Scene scene;
  for (std::size_t i = 0; i < count; ++i) {
    rowsplat::Gaussian3D g;
    g.mean = Eigen::Vector3f(static_cast<float>(u(rng) * 8 - 4),
                             static_cast<float>(u(rng) * 6 - 3), 10.0f);
    const double sx = sigma_x_px * (0.8 + 0.4 * u(rng)) * 10.0 / 500.0;
    g.scale = Eigen::Vector3d(sx, 0.03, 0.03);
    g.rotation = Eigen::Vector4f(1.0f, 0.0f, 0.0f, 0.0f);  // keep x elongation on screen
    g.opacity = 0.4 + 0.5 * u(rng);
    g.sh.assign(1, Eigen::Vector3f(static_cast<float>(u(rng)), static_cast<float>(u(rng)),
                                   static_cast<float>(u(rng))));
    scene.gaussians.push_back(g);
  }
  return scene;
}

}  // namespace oracle
