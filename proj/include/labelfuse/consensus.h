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

#ifndef LABELFUSE_CONSENSUS_H_
#define LABELFUSE_CONSENSUS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "labelfuse/label_map.h"
#include "labelfuse/label_space.h"

namespace labelfuse {

// A source of per-frame predictions in one label space. Flip test-time
// augmentation is modelled as a weight of 2 on a single merged map.
struct PredictorStream {
  std::string name;
  std::string space_id;
  std::uint32_t weight = 1;
  // Higher priority wins ties between classes it voted for unambiguously.
  std::uint32_t priority = 0;
  std::filesystem::path dir;
  // Returns the stream's map for a frame, or nullopt if it has none.
  std::function<std::optional<LabelMap>(int frame_index)> frames;
};

struct ConsensusConfig {
  std::string target_space;
  std::uint32_t min_votes = 1;
  std::vector<PredictorStream> streams;

  std::uint64_t TotalWeight() const;
  // Throws ConfigError when an invariant is violated.
  void Validate(const MappingTable& table) const;
};

struct Vote {
  ClassId class_id = 0;
  // Highest priority among streams that voted for this class through a
  // One correspondence; -1 if none did.
  std::int32_t direct_priority = -1;
  std::uint32_t weight = 0;
};

using PixelVotes = boost::container::small_vector<Vote, 6>;

// Adds `weight` for `class_id`; a non-negative `direct_priority` raises the
// class's direct-vote record.
void AddVote(PixelVotes& votes, ClassId class_id, std::uint32_t weight,
             std::int32_t direct_priority);

// Winner among `votes`, or `unknown` if its weight is below `min_votes`.
ClassId ResolvePixel(std::span<const Vote> votes, std::uint32_t min_votes,
                     ClassId unknown);

// Per-pixel weighted vote accumulator in a target label space.
class VoteGrid {
 public:
  VoteGrid(int width, int height, std::string target_space, ClassId unknown);
  VoteGrid(int width, int height, const LabelSpace& target)
      : VoteGrid(width, height, target.id(), target.unknown()) {}

  int width() const { return width_; }
  int height() const { return height_; }
  const std::string& target_space() const { return target_space_; }
  ClassId unknown() const { return unknown_; }

  std::span<const Vote> votes(int x, int y) const {
    const PixelVotes& v = pixels_[static_cast<std::size_t>(y) * width_ + x];
    return {v.data(), v.size()};
  }
  PixelVotes& mutable_votes(int x, int y) {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint32_t WeightOf(int x, int y, ClassId class_id) const;

 private:
  int width_;
  int height_;
  std::string target_space_;
  ClassId unknown_;
  std::vector<PixelVotes> pixels_;
};

// Casts one prediction's votes: One(c) adds `weight` to c and records
// `priority`; Many(cs) adds the full `weight` to every c without a record.
void CastVotes(VoteGrid& grid, const LabelMap& prediction,
               const MappingTable& table, std::uint32_t weight,
               std::uint32_t priority);

LabelMap Resolve(const VoteGrid& grid, std::uint32_t min_votes);

// One stream's prediction for the frame being fused.
struct StreamFrame {
  const LabelMap* map = nullptr;
  std::uint32_t weight = 1;
  std::uint32_t priority = 0;
};

// Fused per-pixel consensus. Same result as CastVotes over every input
// followed by Resolve, without materialising a VoteGrid.
LabelMap ConsensusFrame(std::span<const StreamFrame> inputs,
                        std::string_view target_space, std::uint32_t min_votes,
                        const MappingTable& table);

LabelMap ConsensusFrame(int frame_index, const ConsensusConfig& config,
                        const MappingTable& table);

}  // namespace labelfuse

#endif  // LABELFUSE_CONSENSUS_H_
