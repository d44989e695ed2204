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

#include "labelfuse/geometry.h"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "labelfuse/error.h"

namespace labelfuse {

void Intrinsics::Validate() const {
  if (!(fx > 0) || !(fy > 0)) {
    throw InvalidArgument("focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image size must be positive");
  }
  if (!(cx >= 0 && cx < width && cy >= 0 && cy < height)) {
    throw InvalidArgument("principal point lies outside the image");
  }
}

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  constexpr double kTol = 1e-6;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("pose contains non-finite values");
  }
  const double ortho =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (ortho > kTol || std::abs(rotation.determinant() - 1.0) > kTol) {
    throw InvalidArgument("pose rotation is not a proper rotation");
  }
}

Pose Pose::FromMatrix(const Eigen::Matrix4d& m) {
  constexpr double kTol = 1e-6;
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() >
      kTol) {
    throw InvalidArgument("pose matrix last row must be 0 0 0 1");
  }
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Eigen::Matrix4d Pose::Matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::Compose(const Pose& motion) const {
  Pose out;
  out.rotation_ = motion.rotation_ * rotation_;
  out.translation_ = motion.rotation_ * translation_ + motion.translation_;
  return out;
}

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw InvalidArgument("depth map dimensions must be non-negative");
  }
  values_.assign(static_cast<std::size_t>(width) * height, 0.0f);
}

void DepthMap::Validate() const {
  for (float d : values_) {
    if (!std::isfinite(d) || d < 0) {
      throw InvalidArgument("depth values must be finite and non-negative");
    }
  }
}

void Frame::Validate() const {
  intrinsics.Validate();
  if (depth.width() != intrinsics.width ||
      depth.height() != intrinsics.height) {
    throw InvalidArgument("frame " + std::to_string(index) +
                          ": depth resolution does not match intrinsics");
  }
}

std::optional<Projection> Project(const Eigen::Vector3d& point,
                                  const Intrinsics& intrinsics,
                                  const Pose& pose) {
  const Eigen::Vector3d p = pose.ToCamera(point);
  if (!(p.z() > kMinProjectionDepth)) return std::nullopt;
  const double u = intrinsics.fx * p.x() / p.z() + intrinsics.cx;
  const double v = intrinsics.fy * p.y() / p.z() + intrinsics.cy;
  const int ui = RoundToPixel(u);
  const int vi = RoundToPixel(v);
  if (ui < 0 || ui >= intrinsics.width || vi < 0 || vi >= intrinsics.height) {
    return std::nullopt;
  }
  return Projection{u, v, p.z()};
}

Eigen::Vector3d Unproject(double u, double v, double depth,
                          const Intrinsics& intrinsics, const Pose& pose) {
  if (!(depth > 0)) throw InvalidArgument("unproject needs positive depth");
  const Eigen::Vector3d p((u - intrinsics.cx) * depth / intrinsics.fx,
                          (v - intrinsics.cy) * depth / intrinsics.fy, depth);
  return pose.ToWorld(p);
}

std::optional<Pixel> Visible(const Eigen::Vector3d& point, const Frame& frame,
                             double tolerance) {
  if (!(tolerance > 0)) {
    throw InvalidArgument("visibility tolerance must be positive");
  }
  const auto proj = Project(point, frame);
  if (!proj) return std::nullopt;
  const Pixel px{RoundToPixel(proj->u), RoundToPixel(proj->v)};
  const float depth = frame.depth.at(px.x, px.y);
  if (depth <= 0) return std::nullopt;
  if (std::abs(proj->z - static_cast<double>(depth)) > tolerance) {
    return std::nullopt;
  }
  return px;
}

}  // namespace labelfuse
