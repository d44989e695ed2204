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

#include "labelfuse/consensus.h"

#include <algorithm>

#include "labelfuse/error.h"

namespace labelfuse {
namespace {

std::string PixelText(int x, int y) {
  return "(" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

[[noreturn]] void ThrowInvalidClass(const LabelMap& map, int x, int y) {
  throw InvalidArgument("pixel " + PixelText(x, y) + " of a '" +
                        map.space_id() + "' map holds undeclared class " +
                        std::to_string(map.at(x, y)));
}

}  // namespace

std::uint64_t ConsensusConfig::TotalWeight() const {
  std::uint64_t total = 0;
  for (const PredictorStream& s : streams) total += s.weight;
  return total;
}

void ConsensusConfig::Validate(const MappingTable& table) const {
  if (!table.HasSpace(target_space)) {
    throw ConfigError("target space '" + target_space +
                      "' is not in the mapping table");
  }
  if (streams.empty()) throw ConfigError("no predictor streams configured");
  for (const PredictorStream& s : streams) {
    if (s.weight < 1) {
      throw ConfigError("stream '" + s.name + "' must have weight >= 1");
    }
    if (!table.HasSpace(s.space_id)) {
      throw ConfigError("stream '" + s.name + "' uses unknown space '" +
                        s.space_id + "'");
    }
  }
  if (min_votes < 1) throw ConfigError("min_votes must be >= 1");
  if (min_votes > TotalWeight()) {
    throw ConfigError("min_votes " + std::to_string(min_votes) +
                      " exceeds the total stream weight " +
                      std::to_string(TotalWeight()));
  }
}

void AddVote(PixelVotes& votes, ClassId class_id, std::uint32_t weight,
             std::int32_t direct_priority) {
  for (Vote& v : votes) {
    if (v.class_id == class_id) {
      v.weight += weight;
      v.direct_priority = std::max(v.direct_priority, direct_priority);
      return;
    }
  }
  votes.push_back(Vote{class_id, direct_priority, weight});
}

ClassId ResolvePixel(std::span<const Vote> votes, std::uint32_t min_votes,
                     ClassId unknown) {
  const Vote* best = nullptr;
  for (const Vote& v : votes) {
    if (best == nullptr || v.weight > best->weight ||
        (v.weight == best->weight &&
         (v.direct_priority > best->direct_priority ||
          (v.direct_priority == best->direct_priority &&
           v.class_id < best->class_id)))) {
      best = &v;
    }
  }
  if (best == nullptr || best->weight < min_votes) return unknown;
  return best->class_id;
}

VoteGrid::VoteGrid(int width, int height, std::string target_space,
                   ClassId unknown)
    : width_(width),
      height_(height),
      target_space_(std::move(target_space)),
      unknown_(unknown) {
  if (width < 0 || height < 0) {
    throw InvalidArgument("vote grid dimensions must be non-negative");
  }
  pixels_.resize(static_cast<std::size_t>(width) * height);
}

std::uint32_t VoteGrid::WeightOf(int x, int y, ClassId class_id) const {
  for (const Vote& v : votes(x, y)) {
    if (v.class_id == class_id) return v.weight;
  }
  return 0;
}

void CastVotes(VoteGrid& grid, const LabelMap& prediction,
               const MappingTable& table, std::uint32_t weight,
               std::uint32_t priority) {
  if (prediction.width() != grid.width() ||
      prediction.height() != grid.height()) {
    throw InvalidArgument(
        "prediction is " + std::to_string(prediction.width()) + "x" +
        std::to_string(prediction.height()) + " but the vote grid is " +
        std::to_string(grid.width()) + "x" + std::to_string(grid.height()));
  }
  const Translator t =
      table.MakeTranslator(prediction.space_id(), grid.target_space());
  const auto direct = static_cast<std::int32_t>(priority);
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const ClassId src = prediction.at(x, y);
      if (src == t.src_unknown()) continue;
      if (!t.IsValid(src)) ThrowInvalidClass(prediction, x, y);
      const auto targets = t.Targets(src);
      PixelVotes& votes = grid.mutable_votes(x, y);
      const std::int32_t record = targets.size() == 1 ? direct : -1;
      for (ClassId c : targets) AddVote(votes, c, weight, record);
    }
  }
}

LabelMap Resolve(const VoteGrid& grid, std::uint32_t min_votes) {
  LabelMap out(grid.width(), grid.height(), grid.target_space(),
               grid.unknown());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      out.at(x, y) = ResolvePixel(grid.votes(x, y), min_votes, grid.unknown());
    }
  }
  return out;
}

LabelMap ConsensusFrame(std::span<const StreamFrame> inputs,
                        std::string_view target_space, std::uint32_t min_votes,
                        const MappingTable& table) {
  const LabelSpace& target = table.space(target_space);
  if (inputs.empty()) return target.MakeLabelMap(0, 0);
  const int width = inputs.front().map->width();
  const int height = inputs.front().map->height();
  std::vector<Translator> translators;
  translators.reserve(inputs.size());
  for (const StreamFrame& in : inputs) {
    if (in.map->width() != width || in.map->height() != height) {
      throw InvalidArgument("stream predictions differ in resolution");
    }
    translators.push_back(
        table.MakeTranslator(in.map->space_id(), target.id()));
  }
  LabelMap out = target.MakeLabelMap(width, height);
  PixelVotes votes;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (std::size_t i = 0; i < n; ++i) {
    votes.clear();
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const Translator& t = translators[s];
      const ClassId src = inputs[s].map->values()[i];
      if (src == t.src_unknown()) continue;
      if (!t.IsValid(src)) {
        ThrowInvalidClass(*inputs[s].map, static_cast<int>(i % width),
                          static_cast<int>(i / width));
      }
      const auto targets = t.Targets(src);
      const std::int32_t record =
          targets.size() == 1 ? static_cast<std::int32_t>(inputs[s].priority)
                              : -1;
      for (ClassId c : targets) AddVote(votes, c, inputs[s].weight, record);
    }
    out.values()[i] =
        ResolvePixel(std::span<const Vote>(votes.data(), votes.size()),
                     min_votes, target.unknown());
  }
  return out;
}

LabelMap ConsensusFrame(int frame_index, const ConsensusConfig& config,
                        const MappingTable& table) {
  std::vector<LabelMap> maps;
  maps.reserve(config.streams.size());
  for (const PredictorStream& s : config.streams) {
    std::optional<LabelMap> map =
        s.frames ? s.frames(frame_index) : std::nullopt;
    if (!map) {
      throw IoError("stream '" + s.name + "' has no prediction for frame " +
                    std::to_string(frame_index));
    }
    if (map->space_id() != s.space_id) {
      throw InvalidArgument("stream '" + s.name + "' delivered a '" +
                            map->space_id() + "' map, expected '" +
                            s.space_id + "'");
    }
    maps.push_back(std::move(*map));
  }
  std::vector<StreamFrame> inputs;
  for (std::size_t s = 0; s < maps.size(); ++s) {
    inputs.push_back(
        {&maps[s], config.streams[s].weight, config.streams[s].priority});
  }
  return ConsensusFrame(inputs, config.target_space, config.min_votes, table);
}

}  // namespace labelfuse
