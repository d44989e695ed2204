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

#include "labelfuse/fusion3d.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "labelfuse/error.h"

namespace labelfuse {
namespace {

void CheckResolution(const Frame& frame, const LabelMap& labels) {
  if (labels.width() != frame.intrinsics.width ||
      labels.height() != frame.intrinsics.height ||
      frame.depth.width() != frame.intrinsics.width ||
      frame.depth.height() != frame.intrinsics.height) {
    throw InvalidArgument("frame " + std::to_string(frame.index) +
                          ": label map resolution does not match the frame");
  }
}

}  // namespace

PointVoteAccumulator::PointVoteAccumulator(
    std::span<const Eigen::Vector3d> points, std::string space_id,
    ClassId unknown, LiftOptions options)
    : points_(points.begin(), points.end()),
      space_id_(std::move(space_id)),
      unknown_(unknown),
      options_(options),
      histograms_(points.size()) {
  if (options_.occlusion_check && !(options_.tolerance > 0)) {
    throw InvalidArgument("visibility tolerance must be positive");
  }
}

void PointVoteAccumulator::AddFrame(const Frame& frame,
                                    const LabelMap& labels) {
  CheckResolution(frame, labels);
  if (labels.space_id() != space_id_) {
    throw InvalidArgument("frame " + std::to_string(frame.index) +
                          " labels are in '" + labels.space_id() +
                          "', expected '" + space_id_ + "'");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    Pixel px;
    if (options_.occlusion_check) {
      const auto hit = Visible(points_[i], frame, options_.tolerance);
      if (!hit) continue;
      px = *hit;
    } else {
      const auto proj = Project(points_[i], frame);
      if (!proj) continue;
      px = {RoundToPixel(proj->u), RoundToPixel(proj->v)};
    }
    const ClassId label = labels.at(px.x, px.y);
    if (label != unknown_) histograms_[i].Add(label);
  }
}

void PointVoteAccumulator::Merge(const PointVoteAccumulator& other) {
  if (other.points_.size() != points_.size() ||
      other.space_id_ != space_id_) {
    throw InvalidArgument("cannot merge accumulators over different clouds");
  }
  for (std::size_t i = 0; i < histograms_.size(); ++i) {
    histograms_[i].Merge(other.histograms_[i]);
  }
}

LabeledPointCloud PointVoteAccumulator::Finish() const {
  LabeledPointCloud cloud;
  cloud.points = points_;
  cloud.space_id = space_id_;
  cloud.unknown = unknown_;
  cloud.labels.reserve(points_.size());
  for (const ClassHistogram& h : histograms_) {
    cloud.labels.push_back(h.ArgMax(unknown_));
  }
  if (options_.keep_histograms) cloud.histograms = histograms_;
  return cloud;
}

LabeledPointCloud LiftPoints(std::span<const Eigen::Vector3d> points,
                             std::span<const Frame> frames,
                             std::span<const LabelMap> labels,
                             const LiftOptions& options) {
  if (frames.size() != labels.size()) {
    throw InvalidArgument("need exactly one label map per frame");
  }
  if (frames.empty()) throw InvalidArgument("no frames to lift from");
  PointVoteAccumulator acc(points, labels.front().space_id(),
                           labels.front().unknown(), options);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    acc.AddFrame(frames[f], labels[f]);
  }
  return acc.Finish();
}

SemanticVoxelGrid::SemanticVoxelGrid(double voxel_size,
                                     const Eigen::Vector3d& origin,
                                     std::string space_id, ClassId unknown)
    : voxel_size_(voxel_size),
      origin_(origin),
      space_id_(std::move(space_id)),
      unknown_(unknown) {
  if (!(voxel_size > 0) || !std::isfinite(voxel_size)) {
    throw InvalidArgument("voxel size must be positive");
  }
  if (!origin.allFinite()) throw InvalidArgument("voxel origin not finite");
}

VoxelKey SemanticVoxelGrid::KeyOf(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d q = (p - origin_) / voxel_size_;
  return {static_cast<std::int32_t>(std::floor(q.x())),
          static_cast<std::int32_t>(std::floor(q.y())),
          static_cast<std::int32_t>(std::floor(q.z()))};
}

void SemanticVoxelGrid::Add(const VoxelKey& key, ClassId class_id,
                            std::uint32_t count) {
  if (count == 0) return;
  cells_[key].Add(class_id, count);
}

const ClassHistogram* SemanticVoxelGrid::Find(const VoxelKey& key) const {
  const auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

bool SemanticVoxelGrid::SameLayout(const SemanticVoxelGrid& other) const {
  return voxel_size_ == other.voxel_size_ && origin_ == other.origin_;
}

void SemanticVoxelGrid::MergeFrom(const SemanticVoxelGrid& other) {
  if (!SameLayout(other)) {
    throw InvalidArgument("cannot merge voxel grids with different size/origin");
  }
  if (other.space_id_ != space_id_) {
    throw InvalidArgument("cannot merge voxel grids of different spaces");
  }
  for (const auto& [key, hist] : other.cells_) cells_[key].Merge(hist);
}

std::optional<Eigen::Vector3d> MinLabeledPoint(const Frame& frame,
                                               const LabelMap& labels) {
  CheckResolution(frame, labels);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::Vector3d lo(kInf, kInf, kInf);
  bool any = false;
  for (int y = 0; y < frame.depth.height(); ++y) {
    for (int x = 0; x < frame.depth.width(); ++x) {
      const float d = frame.depth.at(x, y);
      if (d <= 0 || labels.at(x, y) == labels.unknown()) continue;
      lo = lo.cwiseMin(Unproject(x, y, d, frame));
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return lo;
}

Eigen::Vector3d FieldOriginFromMin(const std::optional<Eigen::Vector3d>& lo,
                                   double voxel_size) {
  if (!lo) return Eigen::Vector3d::Zero();
  return *lo - Eigen::Vector3d::Constant(0.5 * voxel_size);
}

Eigen::Vector3d ComputeFieldOrigin(std::span<const Frame> frames,
                                   std::span<const LabelMap> labels,
                                   double voxel_size) {
  if (frames.size() != labels.size()) {
    throw InvalidArgument("need exactly one label map per frame");
  }
  std::optional<Eigen::Vector3d> lo;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto m = MinLabeledPoint(frames[f], labels[f]);
    if (m) lo = lo ? lo->cwiseMin(*m) : *m;
  }
  return FieldOriginFromMin(lo, voxel_size);
}

void IntegrateFrame(SemanticVoxelGrid& grid, const Frame& frame,
                    const LabelMap& labels) {
  CheckResolution(frame, labels);
  if (labels.space_id() != grid.space_id()) {
    throw InvalidArgument("label space does not match the voxel grid");
  }
  for (int y = 0; y < frame.depth.height(); ++y) {
    for (int x = 0; x < frame.depth.width(); ++x) {
      const float d = frame.depth.at(x, y);
      const ClassId label = labels.at(x, y);
      if (d <= 0 || label == labels.unknown()) continue;
      grid.Add(grid.KeyOf(Unproject(x, y, d, frame)), label);
    }
  }
}

SemanticVoxelGrid BuildVoxelField(std::span<const Frame> frames,
                                  std::span<const LabelMap> labels,
                                  double voxel_size,
                                  std::optional<Eigen::Vector3d> origin) {
  if (frames.size() != labels.size()) {
    throw InvalidArgument("need exactly one label map per frame");
  }
  if (!(voxel_size > 0)) throw InvalidArgument("voxel size must be positive");
  const Eigen::Vector3d o =
      origin ? *origin : ComputeFieldOrigin(frames, labels, voxel_size);
  const std::string space = labels.empty() ? "" : labels.front().space_id();
  const ClassId unknown =
      labels.empty() ? kUnknownLabel : labels.front().unknown();
  SemanticVoxelGrid grid(voxel_size, o, space, unknown);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    IntegrateFrame(grid, frames[f], labels[f]);
  }
  return grid;
}

SemanticVoxelGrid Merge(const SemanticVoxelGrid& a,
                        const SemanticVoxelGrid& b) {
  SemanticVoxelGrid out = a;
  out.MergeFrom(b);
  return out;
}

LabelMap RenderLabels(const SemanticVoxelGrid& grid, const Frame& frame) {
  LabelMap out(frame.intrinsics.width, frame.intrinsics.height,
               grid.space_id(), grid.unknown());
  for (int y = 0; y < frame.depth.height(); ++y) {
    for (int x = 0; x < frame.depth.width(); ++x) {
      const float d = frame.depth.at(x, y);
      if (d <= 0) continue;
      const ClassHistogram* h =
          grid.Find(grid.KeyOf(Unproject(x, y, d, frame)));
      if (h != nullptr) out.at(x, y) = h->ArgMax(grid.unknown());
    }
  }
  return out;
}

std::string DumpVoxelGrid(const SemanticVoxelGrid& grid) {
  std::vector<const SemanticVoxelGrid::CellMap::value_type*> cells;
  cells.reserve(grid.size());
  for (const auto& cell : grid.cells()) cells.push_back(&cell);
  std::sort(cells.begin(), cells.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  std::ostringstream out;
  for (const auto* cell : cells) {
    out << cell->first.x << ' ' << cell->first.y << ' ' << cell->first.z << ' ';
    bool first = true;
    for (const auto& bin : cell->second.bins()) {
      if (!first) out << ',';
      out << bin.class_id << ':' << bin.count;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace labelfuse
