// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/projection.hpp"

#include "rowsplat/tiling.hpp"

#include <cmath>

namespace rowsplat {

Eigen::Matrix3f covariance_3d(const Gaussian3D& g) {
  const Eigen::Matrix3f r = quaternion_to_rotation(g.rotation);
  const Eigen::Matrix3f m = r * g.scale.cast<float>().asDiagonal();
  return m * m.transpose();
}

Eigen::Vector3f view_direction(const Gaussian3D& g, const Camera& cam) {
  const Eigen::Vector3f d = g.mean - cam.center();
  const float norm = d.norm();
  if (norm == 0.0f) {
    throw DegenerateInputError("gaussian mean coincides with the camera center");
  }
  return d / norm;
}

namespace {

// Real SH basis constants, graphics convention (matches the splat ecosystem).
constexpr double kSh0 = 0.28209479177387814;
constexpr double kSh1 = 0.4886025119029199;
constexpr double kSh2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kSh3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

}  // namespace

Eigen::Vector3f eval_sh(std::span<const Eigen::Vector3f> sh, const Eigen::Vector3f& view_dir) {
  if (std::abs(view_dir.norm() - 1.0f) > 1e-4f) {
    throw NumericDomainError("eval_sh: view direction is not unit length");
  }
  const std::size_t n = sh.size();
  if (n != 1 && n != 4 && n != 9 && n != 16) {
    throw NumericDomainError("eval_sh: unsupported coefficient count " + std::to_string(n));
  }

  const double x = view_dir[0], y = view_dir[1], z = view_dir[2];
  Eigen::Vector3d c = kSh0 * sh[0].cast<double>();
  if (n > 1) {
    c += -kSh1 * y * sh[1].cast<double>() + kSh1 * z * sh[2].cast<double>() -
         kSh1 * x * sh[3].cast<double>();
  }
  if (n > 4) {
    const double xx = x * x, yy = y * y, zz = z * z;
    c += kSh2[0] * x * y * sh[4].cast<double>() + kSh2[1] * y * z * sh[5].cast<double>() +
         kSh2[2] * (2.0 * zz - xx - yy) * sh[6].cast<double>() +
         kSh2[3] * x * z * sh[7].cast<double>() + kSh2[4] * (xx - yy) * sh[8].cast<double>();
  }
  if (n > 9) {
    const double xx = x * x, yy = y * y, zz = z * z;
    c += kSh3[0] * y * (3.0 * xx - yy) * sh[9].cast<double>() +
         kSh3[1] * x * y * z * sh[10].cast<double>() +
         kSh3[2] * y * (4.0 * zz - xx - yy) * sh[11].cast<double>() +
         kSh3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * sh[12].cast<double>() +
         kSh3[4] * x * (4.0 * zz - xx - yy) * sh[13].cast<double>() +
         kSh3[5] * z * (xx - yy) * sh[14].cast<double>() +
         kSh3[6] * x * (xx - 3.0 * yy) * sh[15].cast<double>();
  }
  c.array() += 0.5;
  return c.cwiseMax(0.0).cast<float>();
}

std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                        std::uint32_t source_index) {
  const Eigen::Matrix3f w3 = cam.rotation();
  const Eigen::Vector3f t = w3 * g.mean + cam.translation();
  if (t.z() <= cam.near_z || t.z() >= cam.far_z) {
    return std::nullopt;
  }

  Splat2D s;
  s.depth = t.z();
  s.mean2d = Eigen::Vector2f(cam.fx * t.x() / t.z() + cam.cx,
                             cam.fy * t.y() / t.z() + cam.cy);

  // EWA affine approximation: Jacobian of the perspective map at t.
  const float inv_z = 1.0f / t.z();
  const float inv_z2 = inv_z * inv_z;
  Eigen::Matrix<float, 2, 3> jac;
  jac << cam.fx * inv_z, 0.0f, -cam.fx * t.x() * inv_z2,
         0.0f, cam.fy * inv_z, -cam.fy * t.y() * inv_z2;

  const Eigen::Matrix3f view_cov = w3 * covariance_3d(g) * w3.transpose();
  Eigen::Matrix2f cov = jac * view_cov * jac.transpose();
  cov(0, 0) += kCovarianceDilation;
  cov(1, 1) += kCovarianceDilation;
  // Symmetrize away the accumulation asymmetry.
  cov(0, 1) = cov(1, 0) = 0.5f * (cov(0, 1) + cov(1, 0));
  s.cov2d = cov;

  const float radius = truncation_radius(cov);
  if (s.mean2d.x() < -radius || s.mean2d.x() > static_cast<float>(cam.width) + radius ||
      s.mean2d.y() < -radius || s.mean2d.y() > static_cast<float>(cam.height) + radius) {
    return std::nullopt;
  }

  // Invert in double; the dilation guarantees a healthy determinant.
  const Eigen::Matrix2d cd = cov.cast<double>();
  const double det = cd(0, 0) * cd(1, 1) - cd(0, 1) * cd(1, 0);
  Eigen::Matrix2d inv;
  inv << cd(1, 1), -cd(0, 1), -cd(1, 0), cd(0, 0);
  s.inv_cov2d = (inv / det).cast<float>();

  s.color = eval_sh(std::span<const Eigen::Vector3f>(g.sh), view_direction(g, cam));
  s.opacity = static_cast<float>(g.opacity);
  s.source_index = source_index;
  return s;
}

std::vector<std::optional<Splat2D>> project_scene(const Scene& scene, const Camera& cam) {
  cam.validate();
  std::vector<std::optional<Splat2D>> out(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    out[i] = project_gaussian(scene.gaussians[i], cam, static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace rowsplat
