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

#ifndef LABELFUSE_CONFIG_H_
#define LABELFUSE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labelfuse/consensus.h"
#include "labelfuse/label_space.h"

namespace labelfuse {

struct StreamSpec {
  std::string name;
  std::string space;
  std::string dir;  // relative to the dataset root unless absolute
  std::uint32_t weight = 1;
  std::uint32_t priority = 0;
};

// Declarative pipeline settings. Relative paths in the file resolve against
// the directory holding the file.
struct PipelineConfig {
  std::filesystem::path dataset;
  std::filesystem::path mapping;
  std::string target_space = std::string(kCanonicalSpace);
  std::uint32_t min_votes = 1;
  double visibility_tolerance = 0.05;
  double voxel_size = 0.05;
  int threads = 0;  // 0 picks the hardware concurrency
  std::vector<StreamSpec> streams;

  std::string consensus_dir = "consensus";
  std::string render_dir = "render";
  std::string lift_output = "labeled.ply";
  std::string point_cloud = "gt.ply";
  std::optional<std::filesystem::path> palette;

  std::uint64_t TotalWeight() const;
  // Checks value invariants; throws ConfigError.
  void Validate() const;
  // Checks streams against the table's spaces; throws ConfigError.
  void ValidateAgainst(const MappingTable& table) const;
  ConsensusConfig ToConsensusConfig() const;
};

PipelineConfig ParseConfig(std::string_view text,
                           const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");
PipelineConfig LoadConfig(const std::filesystem::path& path);

// The built-in defaults used when no config file is given: the paper's
// automatic setting of four model streams at weight 2, 4 votes required.
PipelineConfig DefaultConfig();

// Command-line value first, then LABELFUSE_THREADS, then the config value;
// 0 resolves to the hardware concurrency.
int ResolveThreads(int config_threads, std::optional<int> cli_threads);

}  // namespace labelfuse

#endif  // LABELFUSE_CONFIG_H_
