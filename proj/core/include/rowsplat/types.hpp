// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rowsplat {

// Error taxonomy shared across modules. Commands map any of these to a
// nonzero exit with the message.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One world-space Gaussian kernel. All fields are stored activated:
/// scale/opacity go through exp/logistic exactly once, at load time.
/// Opacity and scale are kept in double so the raw on-disk floats survive a
/// load -> write round trip bit-exactly (a float-only chain does not).
struct Gaussian3D {
  Eigen::Vector3f mean = Eigen::Vector3f::Zero();
  Eigen::Vector4f rotation{1.0f, 0.0f, 0.0f, 0.0f};  // unit quaternion, (w,x,y,z)
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();   // per-axis stddev, > 0
  double opacity = 0.5;                              // in (0,1)
  std::vector<Eigen::Vector3f> sh;                   // (L+1)^2 RGB triples, L in 0..3

  int sh_degree() const;
  /// Throws DataError when an invariant is violated (|q| != 1 within 1e-4,
  /// non-positive scale, opacity outside (0,1), bad sh length).
  void validate(std::size_t index) const;
};

/// Rotation matrix of a unit quaternion given as (w,x,y,z).
Eigen::Matrix3f quaternion_to_rotation(const Eigen::Vector4f& q);

/// Normalizes a quaternion. Idempotent: inputs already within 1e-6 of unit
/// norm are returned unchanged so repeated load/write cycles are byte-stable.
Eigen::Vector4f normalize_quaternion(const Eigen::Vector4f& q);

struct Camera {
  Eigen::Matrix4f world_to_view = Eigen::Matrix4f::Identity();
  float fx = 0.0f, fy = 0.0f;
  float cx = 0.0f, cy = 0.0f;
  int width = 0, height = 0;
  float near_z = 0.0f, far_z = 0.0f;

  Eigen::Matrix3f rotation() const { return world_to_view.topLeftCorner<3, 3>(); }
  Eigen::Vector3f translation() const { return world_to_view.topRightCorner<3, 1>(); }
  /// Camera center in world coordinates (-R^T t).
  Eigen::Vector3f center() const { return -rotation().transpose() * translation(); }

  /// Throws DataError naming the offending field.
  void validate() const;
};

struct Scene {
  std::vector<Gaussian3D> gaussians;
  std::optional<std::int64_t> frame_index;  // for externally baked dynamic sequences

  std::size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
};

}  // namespace rowsplat
