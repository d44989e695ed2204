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

#ifndef LABELFUSE_SCENEGEN_H_
#define LABELFUSE_SCENEGEN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "labelfuse/fusion3d.h"
#include "labelfuse/geometry.h"
#include "labelfuse/label_map.h"
#include "labelfuse/label_space.h"

namespace labelfuse {

// Axis-aligned infinite plane or axis-aligned box carrying one class.
struct Primitive {
  enum class Kind { kPlane, kBox };

  Kind kind = Kind::kPlane;
  int axis = 2;         // plane normal axis
  double offset = 0;    // plane position along `axis`
  Eigen::Vector3d min = Eigen::Vector3d::Zero();  // box corners
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
  ClassId class_id = 0;
  std::string space_id;

  static Primitive Plane(int axis, double offset, ClassId class_id,
                         std::string space_id);
  static Primitive Box(const Eigen::Vector3d& min, const Eigen::Vector3d& max,
                       ClassId class_id, std::string space_id);
};

// Cameras on a horizontal circle, all looking at `look_at`.
struct OrbitTrajectory {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
  double height = 1.5;
  int frame_count = 20;
  Eigen::Vector3d look_at = Eigen::Vector3d::Zero();
  double phase = 0;  // radians added to every frame's angle

  Pose PoseAt(double angle) const;
  double AngleOf(int frame) const;
};

struct SceneSpec {
  Eigen::Vector3d room_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d room_max = Eigen::Vector3d::Ones();
  std::vector<Primitive> primitives;
  std::optional<OrbitTrajectory> orbit;
  std::vector<Pose> poses;  // used when `orbit` is empty
  Intrinsics intrinsics;
  std::string space_id;
  ClassId unknown = kUnknownLabel;
  std::uint64_t seed = 0;
  double point_density = 400;  // GT samples per square meter
  // A GT sample counts as observed only from views whose ray meets its
  // surface at most this far from the normal.
  double max_incidence_deg = 75;

  void Validate() const;
  std::vector<Pose> TrajectoryPoses() const;
};

struct RayHit {
  double t = 0;
  int primitive = -1;
};

// Nearest intersection with t > t_min; ties go to the lower primitive index.
std::optional<RayHit> IntersectScene(std::span<const Primitive> primitives,
                                     const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& direction,
                                     double t_min = 1e-9);

struct RenderedView {
  Frame frame;
  LabelMap labels;
  std::vector<std::int16_t> primitive_ids;  // per pixel, -1 for no hit
};

// Exact depth/label render from one pose.
RenderedView RenderView(const SceneSpec& spec, const Pose& pose, int index);

struct SceneRender {
  std::vector<RenderedView> views;
  // Surface samples observed by at least one view, with exact labels.
  LabeledPointCloud gt_cloud;
  std::vector<int> gt_primitive;  // primitive of each GT point

  std::vector<Frame> Frames() const;
  std::vector<LabelMap> Labels() const;
};

SceneRender RenderScene(const SceneSpec& spec);

// Room used by the tests, the acceptance suite and `synth`: a 6 x 5 x 3 m
// room (floor, ceiling, four walls) furnished with five boxes, seen from a
// 20-view inward-looking orbit at 640x480. Class ids are looked up by synkey
// in `space`.
SceneSpec DefaultRoomScene(const LabelSpace& space, std::uint64_t seed = 0,
                           int frame_count = 20);

struct NoiseModel {
  double flip_rate = 0;
  std::optional<std::string> coarsen_to;
  std::uint64_t seed = 0;
};

// Optional coarsening (first correspondence), then independent per-pixel
// flips to a uniformly drawn different class of the output space.
LabelMap SimulatePredictor(const LabelMap& gt_map, const NoiseModel& noise,
                           const MappingTable& table);

struct OracleVote {
  ClassId class_id = 0;
  std::uint32_t weight = 0;
  std::int32_t direct_priority = -1;
};

// Reference weighted-majority tally for tests: highest total weight wins if
// it reaches `threshold`; ties prefer the highest direct priority, then the
// smallest id.
ClassId TallyOracle(std::span<const OracleVote> votes, std::uint32_t threshold,
                    ClassId unknown = kUnknownLabel);

}  // namespace labelfuse

#endif  // LABELFUSE_SCENEGEN_H_
