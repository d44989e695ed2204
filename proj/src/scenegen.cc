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

#include "labelfuse/scenegen.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Geometry>

#include "labelfuse/error.h"
#include "labelfuse/rng.h"

namespace labelfuse {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> IntersectPlane(const Primitive& p,
                                     const Eigen::Vector3d& o,
                                     const Eigen::Vector3d& d, double t_min) {
  const double denom = d[p.axis];
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = (p.offset - o[p.axis]) / denom;
  if (!(t > t_min)) return std::nullopt;
  return t;
}

// Slab test. From inside the box the exit face is reported.
std::optional<double> IntersectBox(const Primitive& p,
                                   const Eigen::Vector3d& o,
                                   const Eigen::Vector3d& d, double t_min) {
  double t_near = -kInf;
  double t_far = kInf;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < p.min[a] || o[a] > p.max[a]) return std::nullopt;
      continue;
    }
    double t0 = (p.min[a] - o[a]) / d[a];
    double t1 = (p.max[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near > t_min) return t_near;
  if (t_far > t_min) return t_far;
  return std::nullopt;
}

// Uniform samples on an axis-aligned rectangle lying in plane `axis = at`.
void SampleRect(int axis, double at, const Eigen::Vector3d& lo,
                const Eigen::Vector3d& hi, double density, Rng& rng,
                std::vector<Eigen::Vector3d>& out) {
  const int a = (axis + 1) % 3;
  const int b = (axis + 2) % 3;
  const double area = (hi[a] - lo[a]) * (hi[b] - lo[b]);
  const auto n = static_cast<std::size_t>(std::llround(area * density));
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d p;
    p[axis] = at;
    p[a] = UniformRange(rng, lo[a], hi[a]);
    p[b] = UniformRange(rng, lo[b], hi[b]);
    out.push_back(p);
  }
}

Eigen::Vector3d CameraRay(const Intrinsics& k, double u, double v) {
  return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

}  // namespace

Primitive Primitive::Plane(int axis, double offset, ClassId class_id,
                           std::string space_id) {
  Primitive p;
  p.kind = Kind::kPlane;
  p.axis = axis;
  p.offset = offset;
  p.class_id = class_id;
  p.space_id = std::move(space_id);
  return p;
}

Primitive Primitive::Box(const Eigen::Vector3d& min, const Eigen::Vector3d& max,
                         ClassId class_id, std::string space_id) {
  Primitive p;
  p.kind = Kind::kBox;
  p.min = min;
  p.max = max;
  p.class_id = class_id;
  p.space_id = std::move(space_id);
  return p;
}

double OrbitTrajectory::AngleOf(int frame) const {
  return phase + 2.0 * std::numbers::pi * frame / frame_count;
}

Pose OrbitTrajectory::PoseAt(double angle) const {
  const Eigen::Vector3d position(center.x() + radius * std::cos(angle),
                                 center.y() + radius * std::sin(angle),
                                 height);
  const Eigen::Vector3d forward = (look_at - position).normalized();
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d right_raw = forward.cross(up);
  if (right_raw.norm() < 1e-9) {
    throw InvalidArgument("orbit camera looks straight up or down");
  }
  const Eigen::Vector3d right = right_raw.normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(r, position);
}

void SceneSpec::Validate() const {
  if (primitives.empty()) throw InvalidArgument("scene has no primitives");
  intrinsics.Validate();
  if (!((room_max - room_min).array() > 0).all()) {
    throw InvalidArgument("room extents must be positive");
  }
  for (const Primitive& p : primitives) {
    if (p.space_id != space_id) {
      throw InvalidArgument("primitive labeled in '" + p.space_id +
                            "' but the scene uses '" + space_id + "'");
    }
    if (p.class_id == unknown) {
      throw InvalidArgument("primitive carries the unknown label");
    }
    if (p.kind == Primitive::Kind::kPlane) {
      if (p.axis < 0 || p.axis > 2) throw InvalidArgument("bad plane axis");
    } else if (!((p.max - p.min).array() > 0).all()) {
      throw InvalidArgument("box primitive has non-positive extent");
    }
  }
  if (orbit) {
    if (orbit->frame_count < 1) throw InvalidArgument("frame count must be >= 1");
  } else if (poses.empty()) {
    throw InvalidArgument("scene has no camera poses");
  }
  if (!(point_density >= 0)) throw InvalidArgument("negative point density");
  if (!(max_incidence_deg > 0 && max_incidence_deg <= 90)) {
    throw InvalidArgument("max incidence angle must lie in (0, 90] degrees");
  }
}

std::vector<Pose> SceneSpec::TrajectoryPoses() const {
  if (!orbit) return poses;
  std::vector<Pose> out;
  for (int i = 0; i < orbit->frame_count; ++i) {
    out.push_back(orbit->PoseAt(orbit->AngleOf(i)));
  }
  return out;
}

std::optional<RayHit> IntersectScene(std::span<const Primitive> primitives,
                                     const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& direction,
                                     double t_min) {
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const Primitive& p = primitives[i];
    const auto t = p.kind == Primitive::Kind::kPlane
                       ? IntersectPlane(p, origin, direction, t_min)
                       : IntersectBox(p, origin, direction, t_min);
    if (t && (!best || *t < best->t)) {
      best = RayHit{*t, static_cast<int>(i)};
    }
  }
  return best;
}

RenderedView RenderView(const SceneSpec& spec, const Pose& pose, int index) {
  const Intrinsics& k = spec.intrinsics;
  RenderedView view;
  view.frame.index = index;
  view.frame.intrinsics = k;
  view.frame.pose = pose;
  view.frame.depth = DepthMap(k.width, k.height);
  view.labels = LabelMap(k.width, k.height, spec.space_id, spec.unknown);
  view.primitive_ids.assign(static_cast<std::size_t>(k.width) * k.height, -1);
  const Eigen::Vector3d origin = pose.translation();
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      // Camera-space z of the ray is 1, so the hit parameter is the depth.
      const Eigen::Vector3d dir = pose.rotation() * CameraRay(k, x, y);
      const auto hit = IntersectScene(spec.primitives, origin, dir);
      if (!hit) continue;
      view.frame.depth.at(x, y) = static_cast<float>(hit->t);
      view.labels.at(x, y) = spec.primitives[hit->primitive].class_id;
      view.primitive_ids[static_cast<std::size_t>(y) * k.width + x] =
          static_cast<std::int16_t>(hit->primitive);
    }
  }
  return view;
}

std::vector<Frame> SceneRender::Frames() const {
  std::vector<Frame> frames;
  for (const RenderedView& v : views) frames.push_back(v.frame);
  return frames;
}

std::vector<LabelMap> SceneRender::Labels() const {
  std::vector<LabelMap> labels;
  for (const RenderedView& v : views) labels.push_back(v.labels);
  return labels;
}

SceneRender RenderScene(const SceneSpec& spec) {
  spec.Validate();
  SceneRender out;
  const std::vector<Pose> poses = spec.TrajectoryPoses();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out.views.push_back(RenderView(spec, poses[i], static_cast<int>(i)));
  }

  Rng rng(DeriveSeed(spec.seed, 0x5eed));
  std::vector<Eigen::Vector3d> samples;
  std::vector<int> owner;
  std::vector<int> face_axis;
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const Primitive& p = spec.primitives[i];
    if (p.kind == Primitive::Kind::kPlane) {
      SampleRect(p.axis, p.offset, spec.room_min, spec.room_max,
                 spec.point_density, rng, samples);
      face_axis.resize(samples.size(), p.axis);
    } else {
      for (int axis = 0; axis < 3; ++axis) {
        SampleRect(axis, p.min[axis], p.min, p.max, spec.point_density, rng,
                   samples);
        SampleRect(axis, p.max[axis], p.min, p.max, spec.point_density, rng,
                   samples);
        face_axis.resize(samples.size(), axis);
      }
    }
    owner.resize(samples.size(), static_cast<int>(i));
  }

  // Keep samples some view actually observes: the camera ray through the
  // sample must hit it first, at no more than the grazing limit.
  const double min_cos =
      std::cos(spec.max_incidence_deg * std::numbers::pi / 180.0);
  out.gt_cloud.space_id = spec.space_id;
  out.gt_cloud.unknown = spec.unknown;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Eigen::Vector3d& p = samples[s];
    bool observed = false;
    for (const Pose& pose : poses) {
      if (!Project(p, spec.intrinsics, pose)) continue;
      const Eigen::Vector3d to = p - pose.translation();
      const double dist = to.norm();
      const Eigen::Vector3d dir = to / dist;
      if (std::abs(dir[face_axis[s]]) < min_cos) continue;
      const auto hit = IntersectScene(spec.primitives, pose.translation(), dir);
      if (hit && std::abs(hit->t - dist) <= 1e-6 * std::max(1.0, dist)) {
        observed = true;
        break;
      }
    }
    if (!observed) continue;
    out.gt_cloud.points.push_back(p);
    out.gt_cloud.labels.push_back(spec.primitives[owner[s]].class_id);
    out.gt_primitive.push_back(owner[s]);
  }
  return out;
}

SceneSpec DefaultRoomScene(const LabelSpace& space, std::uint64_t seed,
                           int frame_count) {
  auto id = [&](std::string_view synkey) {
    const auto c = space.FindByName(synkey);
    if (!c) {
      throw InvalidArgument("space '" + space.id() + "' has no class '" +
                            std::string(synkey) + "'");
    }
    return *c;
  };
  SceneSpec spec;
  spec.space_id = space.id();
  spec.unknown = space.unknown();
  spec.seed = seed;
  spec.room_min = {0, 0, 0};
  spec.room_max = {6, 5, 3};
  const std::string& s = space.id();
  const ClassId wall = id("wall.n.01");
  spec.primitives = {
      Primitive::Plane(2, 0.0, id("floor.n.01"), s),
      Primitive::Plane(2, 3.0, id("ceiling.n.01"), s),
      Primitive::Plane(0, 0.0, wall, s),
      Primitive::Plane(0, 6.0, wall, s),
      Primitive::Plane(1, 0.0, wall, s),
      Primitive::Plane(1, 5.0, wall, s),
      Primitive::Box({0.0, 0.0, 0.0}, {2.0, 1.6, 0.6}, id("bed.n.01"), s),
      Primitive::Box({5.2, 0.3, 0.0}, {5.75, 1.5, 1.8}, id("cabinet.n.01"), s),
      Primitive::Box({2.6, 3.0, 0.0}, {3.8, 3.8, 0.75}, id("table.n.02"), s),
      Primitive::Box({3.9, 3.9, 0.0}, {5.7, 4.75, 0.8}, id("sofa.n.01"), s),
      Primitive::Box({0.8, 3.4, 0.0}, {1.4, 4.0, 0.45}, id("box.n.01"), s),
      Primitive::Box({1.5, 4.88, 0.0}, {2.4, 5.0, 2.1}, id("door.n.01"), s),
  };
  OrbitTrajectory orbit;
  orbit.center = {3.0, 2.5, 0.0};
  orbit.radius = 2.0;
  orbit.height = 1.8;
  orbit.frame_count = frame_count;
  orbit.look_at = {3.0, 2.5, 0.6};
  spec.orbit = orbit;
  spec.intrinsics = {300.0, 300.0, 319.5, 239.5, 640, 480};
  return spec;
}

LabelMap SimulatePredictor(const LabelMap& gt_map, const NoiseModel& noise,
                           const MappingTable& table) {
  if (!(noise.flip_rate >= 0 && noise.flip_rate <= 1)) {
    throw InvalidArgument("flip rate must lie in [0, 1]");
  }
  LabelMap out =
      noise.coarsen_to
          ? TranslateMap(gt_map, table, *noise.coarsen_to,
                         ManyPolicy::kFirstCorrespondence)
          : gt_map;
  if (noise.flip_rate == 0) return out;
  const LabelSpace& space = table.space(out.space_id());
  std::vector<ClassId> pool;
  for (const ClassDef& c : space.classes()) pool.push_back(c.id);
  if (pool.size() < 2) return out;
  Rng rng(noise.seed);
  for (ClassId& v : out.values()) {
    if (v == out.unknown()) continue;
    if (UniformUnit(rng) >= noise.flip_rate) continue;
    // Draw from the pool minus the current class.
    const auto pick = UniformBelow(rng, pool.size() - 1);
    ClassId replacement = pool[pick];
    if (replacement == v) replacement = pool.back();
    v = replacement;
  }
  return out;
}

ClassId TallyOracle(std::span<const OracleVote> votes, std::uint32_t threshold,
                    ClassId unknown) {
  std::map<ClassId, std::uint64_t> total;
  std::map<ClassId, std::int32_t> priority;
  for (const OracleVote& v : votes) {
    total[v.class_id] += v.weight;
    if (!priority.count(v.class_id)) priority[v.class_id] = -1;
    priority[v.class_id] = std::max(priority[v.class_id], v.direct_priority);
  }
  std::uint64_t best_weight = 0;
  for (const auto& [c, w] : total) best_weight = std::max(best_weight, w);
  if (total.empty() || best_weight < threshold) return unknown;
  std::int32_t best_priority = -1;
  for (const auto& [c, w] : total) {
    if (w == best_weight) best_priority = std::max(best_priority, priority[c]);
  }
  // std::map iterates in ascending id order: the first match is the smallest.
  for (const auto& [c, w] : total) {
    if (w == best_weight && priority[c] == best_priority) return c;
  }
  return unknown;
}

}  // namespace labelfuse
