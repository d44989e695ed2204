// Copyright 2026 The labelfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LABELFUSE_GEOMETRY_H_
#define LABELFUSE_GEOMETRY_H_

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace labelfuse {

inline constexpr double kDefaultVisibilityTolerance = 0.05;  // meters
inline constexpr double kMinProjectionDepth = 1e-6;

struct Intrinsics {
  double fx = 0;
  double fy = 0;
  double cx = 0;
  double cy = 0;
  int width = 0;
  int height = 0;

  void Validate() const;
  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

// Rigid camera-to-world transform.
class Pose {
 public:
  Pose() = default;
  // Throws unless `rotation` is orthonormal with determinant +1 (1e-6).
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);
  static Pose Identity() { return Pose(); }
  static Pose FromMatrix(const Eigen::Matrix4d& camera_to_world);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Matrix4d Matrix() const;

  Eigen::Vector3d ToWorld(const Eigen::Vector3d& p_camera) const {
    return rotation_ * p_camera + translation_;
  }
  Eigen::Vector3d ToCamera(const Eigen::Vector3d& p_world) const {
    return rotation_.transpose() * (p_world - translation_);
  }
  // `motion` applied after this pose.
  Pose Compose(const Pose& motion) const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

// Depth in meters; 0 marks an invalid pixel.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

  void Validate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

struct Frame {
  int index = 0;
  Intrinsics intrinsics;
  Pose pose;
  DepthMap depth;

  void Validate() const;
};

struct Projection {
  double u = 0;
  double v = 0;
  double z = 0;
};

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Nearest pixel to a continuous image coordinate.
inline int RoundToPixel(double coordinate) {
  return static_cast<int>(std::floor(coordinate + 0.5));
}

std::optional<Projection> Project(const Eigen::Vector3d& point,
                                  const Intrinsics& intrinsics,
                                  const Pose& pose);
inline std::optional<Projection> Project(const Eigen::Vector3d& point,
                                         const Frame& frame) {
  return Project(point, frame.intrinsics, frame.pose);
}

Eigen::Vector3d Unproject(double u, double v, double depth,
                          const Intrinsics& intrinsics, const Pose& pose);
inline Eigen::Vector3d Unproject(double u, double v, double depth,
                                 const Frame& frame) {
  return Unproject(u, v, depth, frame.intrinsics, frame.pose);
}

// Pixel that sees `point` when the frame's depth agrees with the projected
// depth within `tolerance`.
std::optional<Pixel> Visible(const Eigen::Vector3d& point, const Frame& frame,
                             double tolerance = kDefaultVisibilityTolerance);

}  // namespace labelfuse

#endif  // LABELFUSE_GEOMETRY_H_
