// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/scene_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "splat PLY I/O assumes a little-endian host");

namespace rowsplat {

int Gaussian3D::sh_degree() const {
  switch (sh.size()) {
    case 1: return 0;
    case 4: return 1;
    case 9: return 2;
    case 16: return 3;
    default: return -1;
  }
}

void Gaussian3D::validate(std::size_t index) const {
  const auto where = [index](const char* what) {
    return DataError(std::string(what) + " at element " + std::to_string(index));
  };
  if (std::abs(rotation.norm() - 1.0f) > 1e-4f) {
    throw where("quaternion norm deviates from 1 by more than 1e-4");
  }
  if (!(scale.array() > 0.0).all()) {
    throw where("non-positive scale");
  }
  if (!(opacity > 0.0 && opacity < 1.0)) {
    throw where("opacity outside (0,1)");
  }
  if (sh_degree() < 0) {
    throw where("sh coefficient count not in {1,4,9,16}");
  }
}

Eigen::Matrix3f quaternion_to_rotation(const Eigen::Vector4f& q) {
  const float w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3f r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Eigen::Vector4f normalize_quaternion(const Eigen::Vector4f& q) {
  const double norm = q.cast<double>().norm();
  if (norm == 0.0) {
    throw DataError("zero quaternion cannot be normalized");
  }
  if (std::abs(norm - 1.0) <= 1e-6) {
    return q;  // idempotent: keeps load/write cycles byte-stable
  }
  return (q.cast<double>() / norm).cast<float>();
}

void Camera::validate() const {
  if (width <= 0 || height <= 0) {
    throw DataError("camera: width/height must be positive");
  }
  if (!(near_z > 0.0f) || !(far_z > 0.0f)) {
    throw DataError("camera: near/far must be positive");
  }
  if (!(near_z < far_z)) {
    throw DataError("camera: near must be less than far");
  }
  const Eigen::Matrix3f r = rotation();
  if ((r.transpose() * r - Eigen::Matrix3f::Identity()).norm() > 1e-4f) {
    throw DataError("camera: world_to_view rotation block is not orthonormal");
  }
  const Eigen::RowVector4f bottom = world_to_view.row(3);
  if ((bottom - Eigen::RowVector4f(0, 0, 0, 1)).norm() > 1e-5f) {
    throw DataError("camera: world_to_view bottom row must be [0,0,0,1]");
  }
}

namespace {

constexpr int kRestCoeffs = 45;  // degree-3 layout: 15 coefficients x 3 channels

std::vector<std::string> expected_properties(bool with_normals) {
  std::vector<std::string> p = {"x", "y", "z"};
  if (with_normals) {
    p.insert(p.end(), {"nx", "ny", "nz"});
  }
  p.insert(p.end(), {"f_dc_0", "f_dc_1", "f_dc_2"});
  for (int i = 0; i < kRestCoeffs; ++i) {
    p.push_back("f_rest_" + std::to_string(i));
  }
  p.push_back("opacity");
  p.insert(p.end(), {"scale_0", "scale_1", "scale_2"});
  p.insert(p.end(), {"rot_0", "rot_1", "rot_2", "rot_3"});
  return p;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

Scene load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scene file: " + path);
  }

  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw FormatError("not a PLY file: " + path);
  }
  if (!std::getline(in, line) || line != "format binary_little_endian 1.0") {
    throw FormatError("PLY format must be binary_little_endian 1.0");
  }

  std::size_t count = 0;
  bool saw_element = false;
  std::vector<std::string> properties;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      break;
    }
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "comment") {
      continue;
    }
    if (keyword == "element") {
      std::string name;
      ls >> name >> count;
      if (name != "vertex" || saw_element) {
        throw FormatError("expected a single 'element vertex' declaration");
      }
      saw_element = true;
      continue;
    }
    if (keyword == "property") {
      std::string type, name;
      ls >> type >> name;
      if (type != "float") {
        throw FormatError("property " + name + " must be float");
      }
      properties.push_back(name);
      continue;
    }
    throw FormatError("unsupported header line: " + line);
  }
  if (!saw_element) {
    throw FormatError("missing 'element vertex' declaration");
  }

  const bool with_normals =
      properties.size() > 3 && properties[3] == "nx";
  const std::vector<std::string> expected = expected_properties(with_normals);
  for (std::size_t i = 0; i < std::min(expected.size(), properties.size()); ++i) {
    if (properties[i] != expected[i]) {
      throw FormatError("unexpected property " + properties[i] + " (expected " +
                        expected[i] + ")");
    }
  }
  if (properties.size() < expected.size()) {
    throw FormatError("missing property " + expected[properties.size()]);
  }
  if (properties.size() > expected.size()) {
    throw FormatError("unexpected property " + properties[expected.size()]);
  }

  const std::size_t floats_per_element = expected.size();
  std::vector<float> data(count * floats_per_element);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(float)) {
    throw FormatError("truncated PLY payload: " + path);
  }

  Scene scene;
  scene.gaussians.resize(count);
  const std::size_t base_off = with_normals ? 6 : 3;
  for (std::size_t i = 0; i < count; ++i) {
    const float* v = data.data() + i * floats_per_element;
    for (std::size_t k = 0; k < floats_per_element; ++k) {
      if (!std::isfinite(v[k])) {
        throw DataError("non-finite value in property " + expected[k] +
                        " at element " + std::to_string(i));
      }
    }
    Gaussian3D& g = scene.gaussians[i];
    g.mean = Eigen::Vector3f(v[0], v[1], v[2]);

    const float* dc = v + base_off;
    const float* rest = dc + 3;
    g.sh.resize(16);
    g.sh[0] = Eigen::Vector3f(dc[0], dc[1], dc[2]);
    for (int k = 1; k < 16; ++k) {
      // f_rest is channel-major: 15 R coefficients, then G, then B.
      g.sh[k] = Eigen::Vector3f(rest[0 * 15 + (k - 1)], rest[1 * 15 + (k - 1)],
                                rest[2 * 15 + (k - 1)]);
    }

    const float* tail = rest + kRestCoeffs;
    g.opacity = logistic(static_cast<double>(tail[0]));
    g.scale = Eigen::Vector3d(std::exp(static_cast<double>(tail[1])),
                              std::exp(static_cast<double>(tail[2])),
                              std::exp(static_cast<double>(tail[3])));
    g.rotation = normalize_quaternion(Eigen::Vector4f(tail[4], tail[5], tail[6], tail[7]));
    g.validate(i);
  }
  return scene;
}

void write_ply(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open scene file for writing: " + path);
  }

  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << scene.size() << "\n";
  for (const std::string& name : expected_properties(false)) {
    out << "property float " << name << "\n";
  }
  out << "end_header\n";

  const std::size_t floats_per_element = expected_properties(false).size();
  std::vector<float> row(floats_per_element);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const Gaussian3D& g = scene.gaussians[i];
    g.validate(i);
    float* v = row.data();
    v[0] = g.mean[0];
    v[1] = g.mean[1];
    v[2] = g.mean[2];
    float* dc = v + 3;
    float* rest = dc + 3;
    std::fill(rest, rest + kRestCoeffs, 0.0f);  // lower degrees are zero-padded
    dc[0] = g.sh.empty() ? 0.0f : g.sh[0][0];
    dc[1] = g.sh.empty() ? 0.0f : g.sh[0][1];
    dc[2] = g.sh.empty() ? 0.0f : g.sh[0][2];
    for (std::size_t k = 1; k < g.sh.size(); ++k) {
      rest[0 * 15 + (k - 1)] = g.sh[k][0];
      rest[1 * 15 + (k - 1)] = g.sh[k][1];
      rest[2 * 15 + (k - 1)] = g.sh[k][2];
    }
    float* tail = rest + kRestCoeffs;
    tail[0] = static_cast<float>(logit(g.opacity));
    tail[1] = static_cast<float>(std::log(g.scale[0]));
    tail[2] = static_cast<float>(std::log(g.scale[1]));
    tail[3] = static_cast<float>(std::log(g.scale[2]));
    const Eigen::Vector4f q = normalize_quaternion(g.rotation);
    tail[4] = q[0];
    tail[5] = q[1];
    tail[6] = q[2];
    tail[7] = q[3];
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) {
    throw IoError("short write: " + path);
  }
}

namespace {

// Deterministic uniform sampling independent of the standard library's
// distribution implementations.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Shoemake's uniform random rotation.
  Eigen::Vector4f unit_quaternion() {
    const double u1 = uniform(), u2 = uniform(), u3 = uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double t2 = 2.0 * M_PI * u2, t3 = 2.0 * M_PI * u3;
    return Eigen::Vector4f(static_cast<float>(b * std::cos(t3)),
                           static_cast<float>(a * std::sin(t2)),
                           static_cast<float>(a * std::cos(t2)),
                           static_cast<float>(b * std::sin(t3)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Scene synthetic_scene(const SyntheticConfig& config) {
  if ((config.extent_min.array() > config.extent_max.array()).any()) {
    throw DataError("synthetic_scene: extent min exceeds max");
  }
  if (config.scale_min > config.scale_max || config.scale_min <= 0.0) {
    throw DataError("synthetic_scene: invalid scale range");
  }
  if (config.opacity_min > config.opacity_max || config.opacity_min <= 0.0 ||
      config.opacity_max >= 1.0) {
    throw DataError("synthetic_scene: opacity range must lie inside (0,1)");
  }
  if (config.sh_degree < 0 || config.sh_degree > 3) {
    throw DataError("synthetic_scene: sh degree must be in 0..3");
  }
  if (config.max_anisotropy < 1.0) {
    throw DataError("synthetic_scene: max_anisotropy must be >= 1");
  }

  Sampler rng(config.seed);
  Scene scene;
  scene.gaussians.resize(config.count);
  const int sh_count = (config.sh_degree + 1) * (config.sh_degree + 1);
  for (Gaussian3D& g : scene.gaussians) {
    for (int axis = 0; axis < 3; ++axis) {
      g.mean[axis] = static_cast<float>(
          rng.uniform(config.extent_min[axis], config.extent_max[axis]));
    }
    const double base = rng.log_uniform(config.scale_min, config.scale_max);
    const double ratio = rng.log_uniform(1.0, config.max_anisotropy);
    const double spread = std::sqrt(ratio);
    g.scale = Eigen::Vector3d(base * spread, base / spread,
                              base * std::exp(rng.uniform(-std::log(spread), std::log(spread))));
    g.rotation = normalize_quaternion(rng.unit_quaternion());
    g.opacity = rng.uniform(config.opacity_min, config.opacity_max);
    g.sh.resize(sh_count);
    g.sh[0] = Eigen::Vector3f(static_cast<float>(rng.uniform(-0.6, 1.5)),
                              static_cast<float>(rng.uniform(-0.6, 1.5)),
                              static_cast<float>(rng.uniform(-0.6, 1.5)));
    for (int k = 1; k < sh_count; ++k) {
      g.sh[k] = Eigen::Vector3f(static_cast<float>(rng.uniform(-0.08, 0.08)),
                                static_cast<float>(rng.uniform(-0.08, 0.08)),
                                static_cast<float>(rng.uniform(-0.08, 0.08)));
    }
  }
  return scene;
}

Camera load_camera(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open camera file: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("camera JSON parse error: ") + e.what());
  }

  const auto require = [&doc](const char* field) -> const nlohmann::json& {
    if (!doc.contains(field)) {
      throw FormatError(std::string("camera JSON missing field ") + field);
    }
    return doc.at(field);
  };

  Camera cam;
  const nlohmann::json& w2v = require("world_to_view");
  if (!w2v.is_array() || w2v.size() != 16) {
    throw FormatError("camera JSON field world_to_view must be 16 numbers");
  }
  for (int i = 0; i < 16; ++i) {
    cam.world_to_view(i / 4, i % 4) = w2v.at(i).get<float>();
  }
  try {
    cam.fx = require("fx").get<float>();
    cam.fy = require("fy").get<float>();
    cam.cx = require("cx").get<float>();
    cam.cy = require("cy").get<float>();
    cam.width = require("width").get<int>();
    cam.height = require("height").get<int>();
    cam.near_z = require("near").get<float>();
    cam.far_z = require("far").get<float>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("camera JSON field has wrong type: ") + e.what());
  }
  cam.validate();
  return cam;
}

void save_camera(const Camera& camera, const std::string& path) {
  nlohmann::json doc;
  std::vector<float> w2v(16);
  for (int i = 0; i < 16; ++i) {
    w2v[static_cast<std::size_t>(i)] = camera.world_to_view(i / 4, i % 4);
  }
  doc["world_to_view"] = w2v;
  doc["fx"] = camera.fx;
  doc["fy"] = camera.fy;
  doc["cx"] = camera.cx;
  doc["cy"] = camera.cy;
  doc["width"] = camera.width;
  doc["height"] = camera.height;
  doc["near"] = camera.near_z;
  doc["far"] = camera.far_z;
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open camera file for writing: " + path);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace rowsplat
