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

#ifndef LABELFUSE_FUSION3D_H_
#define LABELFUSE_FUSION3D_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "labelfuse/geometry.h"
#include "labelfuse/histogram.h"
#include "labelfuse/label_map.h"

namespace labelfuse {

inline constexpr double kDefaultVoxelSize = 0.05;  // meters

struct LabeledPointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<ClassId> labels;
  std::string space_id;
  ClassId unknown = kUnknownLabel;
  // Per-point vote histograms; empty unless requested.
  std::vector<ClassHistogram> histograms;
};

struct LiftOptions {
  double tolerance = kDefaultVisibilityTolerance;
  // When false every in-bounds projection votes, occluded or not.
  bool occlusion_check = true;
  bool keep_histograms = false;
};

// Mergeable per-point vote tally. Frames can be added in any order and
// partial accumulators combined with Merge.
class PointVoteAccumulator {
 public:
  PointVoteAccumulator(std::span<const Eigen::Vector3d> points,
                       std::string space_id, ClassId unknown,
                       LiftOptions options = {});

  void AddFrame(const Frame& frame, const LabelMap& labels);
  void Merge(const PointVoteAccumulator& other);
  // Majority label per point; ties go to the smallest class id.
  LabeledPointCloud Finish() const;

  std::span<const ClassHistogram> histograms() const { return histograms_; }

 private:
  std::vector<Eigen::Vector3d> points_;
  std::string space_id_;
  ClassId unknown_;
  LiftOptions options_;
  std::vector<ClassHistogram> histograms_;
};

LabeledPointCloud LiftPoints(std::span<const Eigen::Vector3d> points,
                             std::span<const Frame> frames,
                             std::span<const LabelMap> labels,
                             const LiftOptions& options = {});

struct VoxelKey {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.y);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.z);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// Sparse voxel -> class histogram map; a deterministic semantic field that
// can be rendered into any calibrated view.
class SemanticVoxelGrid {
 public:
  using CellMap = std::unordered_map<VoxelKey, ClassHistogram, VoxelKeyHash>;

  SemanticVoxelGrid(double voxel_size, const Eigen::Vector3d& origin,
                    std::string space_id, ClassId unknown = kUnknownLabel);

  double voxel_size() const { return voxel_size_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  const std::string& space_id() const { return space_id_; }
  ClassId unknown() const { return unknown_; }
  std::size_t size() const { return cells_.size(); }
  const CellMap& cells() const { return cells_; }

  VoxelKey KeyOf(const Eigen::Vector3d& p) const;
  void Add(const VoxelKey& key, ClassId class_id, std::uint32_t count = 1);
  const ClassHistogram* Find(const VoxelKey& key) const;
  // Cellwise histogram addition; throws on mismatched size or origin.
  void MergeFrom(const SemanticVoxelGrid& other);

  bool SameLayout(const SemanticVoxelGrid& other) const;
  friend bool operator==(const SemanticVoxelGrid& a,
                         const SemanticVoxelGrid& b) {
    return a.SameLayout(b) && a.space_id_ == b.space_id_ &&
           a.cells_ == b.cells_;
  }

 private:
  double voxel_size_;
  Eigen::Vector3d origin_;
  std::string space_id_;
  ClassId unknown_;
  CellMap cells_;
};

// Componentwise minimum of all labeled, valid-depth pixels, shifted down by
// half a voxel so surfaces on the minimum never sit on a cell boundary.
// Componentwise minimum over the unprojected labeled pixels of one frame.
std::optional<Eigen::Vector3d> MinLabeledPoint(const Frame& frame,
                                               const LabelMap& labels);
// Half a voxel below `lo`, or zero when nothing was labeled.
Eigen::Vector3d FieldOriginFromMin(const std::optional<Eigen::Vector3d>& lo,
                                   double voxel_size);
Eigen::Vector3d ComputeFieldOrigin(std::span<const Frame> frames,
                                   std::span<const LabelMap> labels,
                                   double voxel_size);

SemanticVoxelGrid BuildVoxelField(
    std::span<const Frame> frames, std::span<const LabelMap> labels,
    double voxel_size = kDefaultVoxelSize,
    std::optional<Eigen::Vector3d> origin = std::nullopt);

// Adds one frame's labeled pixels to an existing grid.
void IntegrateFrame(SemanticVoxelGrid& grid, const Frame& frame,
                    const LabelMap& labels);

SemanticVoxelGrid Merge(const SemanticVoxelGrid& a, const SemanticVoxelGrid& b);

LabelMap RenderLabels(const SemanticVoxelGrid& grid, const Frame& frame);

// One line per cell, `ix iy iz class:count,...`, sorted by key.
std::string DumpVoxelGrid(const SemanticVoxelGrid& grid);

}  // namespace labelfuse

#endif  // LABELFUSE_FUSION3D_H_
