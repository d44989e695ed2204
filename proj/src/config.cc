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

#include "labelfuse/config.h"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include "labelfuse/error.h"
#include "labelfuse/text_util.h"

namespace labelfuse {
namespace fs = std::filesystem;

namespace {

fs::path Resolve(const fs::path& base, std::string_view value) {
  fs::path p{std::string(value)};
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::uint32_t ParseCount(std::string_view value, const std::string& where) {
  const auto v = ParseUnsigned(value);
  if (!v || *v > UINT32_MAX) {
    throw ConfigError(where + ": expected a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return static_cast<std::uint32_t>(*v);
}

double ParseMeters(std::string_view value, const std::string& where) {
  const auto v = ParseDouble(value);
  if (!v) {
    throw ConfigError(where + ": expected a number, got '" +
                      std::string(value) + "'");
  }
  return *v;
}

}  // namespace

std::uint64_t PipelineConfig::TotalWeight() const {
  std::uint64_t total = 0;
  for (const StreamSpec& s : streams) total += s.weight;
  return total;
}

void PipelineConfig::Validate() const {
  if (streams.empty()) throw ConfigError("config defines no [stream] sections");
  std::set<std::string> names;
  for (const StreamSpec& s : streams) {
    if (s.name.empty()) throw ConfigError("stream without a name");
    if (!names.insert(s.name).second) {
      throw ConfigError("duplicate stream name '" + s.name + "'");
    }
    if (s.space.empty()) {
      throw ConfigError("stream '" + s.name + "' has no space");
    }
    if (s.dir.empty()) throw ConfigError("stream '" + s.name + "' has no dir");
    if (s.weight == 0) {
      throw ConfigError("stream '" + s.name + "' has weight 0");
    }
  }
  if (min_votes == 0) throw ConfigError("min_votes must be positive");
  if (min_votes > TotalWeight()) {
    throw ConfigError("min_votes " + std::to_string(min_votes) +
                      " exceeds the total stream weight " +
                      std::to_string(TotalWeight()));
  }
  if (!(visibility_tolerance > 0)) {
    throw ConfigError("visibility_tolerance must be positive");
  }
  if (!(voxel_size > 0)) throw ConfigError("voxel_size must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  for (const std::string* d : {&consensus_dir, &render_dir, &lift_output}) {
    if (d->empty()) throw ConfigError("output paths must not be empty");
  }
}

void PipelineConfig::ValidateAgainst(const MappingTable& table) const {
  Validate();
  ToConsensusConfig().Validate(table);
}

ConsensusConfig PipelineConfig::ToConsensusConfig() const {
  ConsensusConfig c;
  c.target_space = target_space;
  c.min_votes = min_votes;
  for (const StreamSpec& s : streams) {
    PredictorStream p;
    p.name = s.name;
    p.space_id = s.space;
    p.weight = s.weight;
    p.priority = s.priority;
    p.dir = s.dir;
    c.streams.push_back(std::move(p));
  }
  return c;
}

PipelineConfig ParseConfig(std::string_view text, const fs::path& base_dir,
                           const std::string& source) {
  PipelineConfig config;
  StreamSpec* stream = nullptr;
  std::set<std::string> seen_global;
  std::set<std::string> seen_stream;
  std::size_t line_no = 0;
  for (std::string_view raw : SplitLines(text)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section");
      const std::string_view section = Trim(line.substr(1, line.size() - 2));
      if (section != "stream") {
        throw ConfigError(where + ": unknown section [" +
                          std::string(section) + "]");
      }
      config.streams.emplace_back();
      stream = &config.streams.back();
      seen_stream.clear();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (stream != nullptr) {
      if (!seen_stream.insert(key).second) {
        throw ConfigError(where + ": duplicate key '" + key + "'");
      }
      if (key == "name") {
        stream->name = std::string(value);
      } else if (key == "space") {
        stream->space = std::string(value);
      } else if (key == "dir") {
        stream->dir = std::string(value);
      } else if (key == "weight") {
        stream->weight = ParseCount(value, where);
      } else if (key == "priority") {
        stream->priority = ParseCount(value, where);
      } else {
        throw ConfigError(where + ": unknown stream key '" + key + "'");
      }
      continue;
    }
    if (!seen_global.insert(key).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    if (key == "dataset") {
      config.dataset = Resolve(base_dir, value);
    } else if (key == "mapping") {
      config.mapping = Resolve(base_dir, value);
    } else if (key == "target_space") {
      config.target_space = std::string(value);
    } else if (key == "min_votes") {
      config.min_votes = ParseCount(value, where);
    } else if (key == "visibility_tolerance") {
      config.visibility_tolerance = ParseMeters(value, where);
    } else if (key == "voxel_size") {
      config.voxel_size = ParseMeters(value, where);
    } else if (key == "threads") {
      const auto v = ParseUnsigned(value);
      if (!v || *v > 4096) throw ConfigError(where + ": bad thread count");
      config.threads = static_cast<int>(*v);
    } else if (key == "consensus_dir") {
      config.consensus_dir = std::string(value);
    } else if (key == "render_dir") {
      config.render_dir = std::string(value);
    } else if (key == "lift_output") {
      config.lift_output = std::string(value);
    } else if (key == "point_cloud") {
      config.point_cloud = std::string(value);
    } else if (key == "palette") {
      config.palette = Resolve(base_dir, value);
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  return config;
}

PipelineConfig LoadConfig(const fs::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return ParseConfig(text, path.parent_path(), path.string());
}

PipelineConfig DefaultConfig() {
  PipelineConfig c;
  c.min_votes = 4;
  c.streams = {
      {"mask3d", "scannet", "pred_mask3d", 2, 4},
      {"ovseg", "wordnet", "pred_ovseg", 2, 3},
      {"internimage", "ade20k", "pred_internimage", 2, 2},
      {"cmx", "nyu40", "pred_cmx", 2, 1},
  };
  return c;
}

int ResolveThreads(int config_threads, std::optional<int> cli_threads) {
  int n = config_threads;
  if (const char* env = std::getenv("LABELFUSE_THREADS");
      env != nullptr && *env != '\0') {
    const auto v = ParseUnsigned(Trim(env));
    if (!v || *v > 4096) {
      throw ConfigError("LABELFUSE_THREADS must be a non-negative integer");
    }
    n = static_cast<int>(*v);
  }
  if (cli_threads) {
    if (*cli_threads < 0) throw ConfigError("--threads must be >= 0");
    n = *cli_threads;
  }
  if (n == 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  return n;
}

}  // namespace labelfuse
