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

#ifndef LABELFUSE_PIPELINE_H_
#define LABELFUSE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelfuse/config.h"
#include "labelfuse/fusion3d.h"
#include "labelfuse/geometry.h"
#include "labelfuse/label_space.h"
#include "labelfuse/metrics.h"
#include "labelfuse/scenegen.h"

namespace labelfuse {

// ScanNet-style per-frame layout:
//   intrinsics.txt, poses/<frame>.txt, depth/<frame>.png,
//   gt_label/<frame>.png, <stream dir>/<frame>.png, gt.ply, scene.json
class Dataset {
 public:
  static Dataset Open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const Intrinsics& intrinsics() const { return intrinsics_; }
  // Frames that have a pose file, ascending.
  const std::vector<int>& frames() const { return frames_; }

  std::filesystem::path Path(std::string_view relative) const;
  std::filesystem::path PosePath(int frame) const;
  std::filesystem::path DepthPath(int frame) const;
  std::filesystem::path GtLabelPath(int frame) const;

  Frame LoadFrame(int frame) const;

 private:
  std::filesystem::path root_;
  Intrinsics intrinsics_;
  std::vector<int> frames_;
};

struct RunOptions {
  int threads = 1;
  bool verbose = false;
};

// Frames every stream provides; throws IoError naming the first stream that
// lacks a frame another stream has.
std::vector<int> ConsensusFrames(const PipelineConfig& config,
                                 const std::filesystem::path& dataset_root);

// Writes <consensus_dir>/<frame>.png for every stream frame. The output
// directory is replaced atomically.
std::vector<int> RunConsensus(const PipelineConfig& config,
                              const MappingTable& table,
                              const RunOptions& options);

struct LiftRunOptions {
  bool occlusion_check = true;
  // Defaults to <dataset>/<lift_output> when empty.
  std::filesystem::path output;
};

LabeledPointCloud RunLift(const PipelineConfig& config,
                          const MappingTable& table, const RunOptions& options,
                          const LiftRunOptions& lift = {});

struct RenderRunOptions {
  // Frames to render into; every posed frame when empty.
  std::vector<int> frames;
  std::optional<std::filesystem::path> voxel_dump;
};

SemanticVoxelGrid BuildFieldFromConsensus(const PipelineConfig& config,
                                          const MappingTable& table,
                                          const Dataset& dataset,
                                          const RunOptions& options);

std::vector<int> RunRender(const PipelineConfig& config,
                           const MappingTable& table, const RunOptions& options,
                           const RenderRunOptions& render = {});

// Point-wise evaluation of two PLY files with labels, matched by index.
EvalReport EvalPlyFiles(const std::filesystem::path& pred,
                        std::string_view pred_space,
                        const std::filesystem::path& gt,
                        std::string_view gt_space, const MappingTable& table);

// Pixel-wise evaluation over frames present in `pred_dir` (or `frames` when
// given); each must exist in `gt_dir`.
EvalReport EvalLabelDirs(const std::filesystem::path& pred_dir,
                         std::string_view pred_space,
                         const std::filesystem::path& gt_dir,
                         std::string_view gt_space, const MappingTable& table,
                         std::span<const int> frames,
                         const RunOptions& options);

struct SynthOptions {
  std::uint64_t seed = 0;
  int frames = 20;
  int held_out = 1;
  double flip_rate = 0;
  double point_density = 400;
};

// Renders the default room and writes a complete dataset: GT renders, one
// simulated prediction directory per configured stream, gt.ply and a
// scene.json echo. The directory is replaced atomically.
void WriteSynthDataset(const std::filesystem::path& out,
                       const PipelineConfig& config, const MappingTable& table,
                       const SynthOptions& synth, const RunOptions& options);

// Seed of the simulated predictor for one stream and frame.
std::uint64_t PredictorSeed(std::uint64_t seed, std::size_t stream, int frame);

}  // namespace labelfuse

#endif  // LABELFUSE_PIPELINE_H_
