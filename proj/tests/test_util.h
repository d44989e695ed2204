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

#ifndef LABELFUSE_TESTS_TEST_UTIL_H_
#define LABELFUSE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <array>
#include <atomic>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include <unistd.h>

#include "labelfuse/geometry.h"
#include "labelfuse/label_space.h"
#include "labelfuse/scenegen.h"

namespace labelfuse::testing {

inline const MappingTable& ShippedTable() {
  static const MappingTable table =
      MappingTable::Load(std::filesystem::path(LABELFUSE_DATA_DIR) /
                         "mapping.csv");
  return table;
}

// Space with classes 1..n named c1..cn.
inline LabelSpace NumberedSpace(const std::string& id, int n) {
  std::vector<ClassDef> classes;
  for (int i = 1; i <= n; ++i) {
    classes.push_back({static_cast<ClassId>(i), "c" + std::to_string(i), {}});
  }
  return LabelSpace(id, std::move(classes));
}

// Uniform random rotation with a translation inside a 10 m cube.
inline Pose RandomPose(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  std::uniform_real_distribution<double> t(-5.0, 5.0);
  return Pose(q.toRotationMatrix(), Eigen::Vector3d(t(rng), t(rng), t(rng)));
}

// Random many-to-many table over a target space "t" and source spaces
// "s0".."s<n-1>", each with at most `max_classes` classes.
inline MappingTable RandomTable(std::mt19937& rng, int source_spaces,
                                int max_classes) {
  std::uniform_int_distribution<int> count(2, max_classes);
  std::vector<LabelSpace> spaces{NumberedSpace("t", count(rng))};
  for (int s = 0; s < source_spaces; ++s) {
    spaces.push_back(NumberedSpace("s" + std::to_string(s), count(rng)));
  }
  std::uniform_int_distribution<int> row_count(1, 7);
  std::bernoulli_distribution member(0.3);
  std::vector<MappingRow> rows;
  const int n = row_count(rng);
  for (int r = 0; r < n; ++r) {
    MappingRow row;
    row.canonical_id = static_cast<std::uint32_t>(r + 1);
    row.synkey = "r" + std::to_string(r + 1);
    for (const LabelSpace& space : spaces) {
      std::vector<ClassId> ids;
      for (const ClassDef& c : space.classes()) {
        if (member(rng)) ids.push_back(c.id);
      }
      std::shuffle(ids.begin(), ids.end(), rng);
      row.ids.push_back(std::move(ids));
    }
    rows.push_back(std::move(row));
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return MappingTable(std::move(spaces), std::move(rows));
}

// Target ids of (space, class) gathered by scanning every row.
inline std::vector<ClassId> RowScanTargets(const MappingTable& table,
                                           const std::string& space,
                                           ClassId class_id,
                                           const std::string& target) {
  std::vector<ClassId> ids;
  if (class_id == table.space(space).unknown()) return ids;
  const std::size_t si = table.SpaceIndex(space);
  const std::size_t ti = table.SpaceIndex(target);
  std::vector<const MappingRow*> rows;
  for (const MappingRow& r : table.rows()) {
    if (std::count(r.ids[si].begin(), r.ids[si].end(), class_id)) {
      rows.push_back(&r);
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const MappingRow* a, const MappingRow* b) {
              return a->canonical_id < b->canonical_id;
            });
  for (const MappingRow* r : rows) {
    for (ClassId id : r->ids[ti]) {
      if (!std::count(ids.begin(), ids.end(), id)) ids.push_back(id);
    }
  }
  return ids;
}

struct OracleCounts {
  std::map<ClassId, std::array<std::uint64_t, 3>> per_class;  // tp, fp, fn
  std::uint64_t samples = 0;
  std::uint64_t correct = 0;
  std::uint64_t ignored = 0;
};

// Per-sample tally of the evaluation rules, one sample at a time.
inline OracleCounts BruteForceCounts(const MappingTable& table,
                                     const std::vector<ClassId>& pred,
                                     const std::string& pred_space,
                                     const std::vector<ClassId>& gt,
                                     const std::string& gt_space) {
  OracleCounts out;
  const ClassId gt_unknown = table.space(gt_space).unknown();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (gt[i] == gt_unknown) {
      ++out.ignored;
      continue;
    }
    ++out.samples;
    const auto set = RowScanTargets(table, pred_space, pred[i], gt_space);
    bool hit = false;
    for (ClassId c : set) hit = hit || c == gt[i];
    if (hit) {
      ++out.per_class[gt[i]][0];
      ++out.correct;
    } else {
      ++out.per_class[gt[i]][2];
      for (ClassId c : set) ++out.per_class[c][1];
    }
  }
  return out;
}

struct OracleInput {
  std::string space_id;
  ClassId class_id = 0;
  std::uint32_t weight = 1;
  std::uint32_t priority = 0;
};

// Brute-force per-pixel consensus: scans the rows directly for every stream
// and hands the resulting vote list to the tally oracle.
inline ClassId OracleConsensus(const MappingTable& table,
                               const std::vector<OracleInput>& inputs,
                               const std::string& target,
                               std::uint32_t min_votes) {
  std::vector<OracleVote> votes;
  for (const OracleInput& in : inputs) {
    const auto ids = RowScanTargets(table, in.space_id, in.class_id, target);
    for (ClassId id : ids) {
      votes.push_back({id, in.weight,
                       ids.size() == 1 ? static_cast<std::int32_t>(in.priority)
                                       : -1});
    }
  }
  return TallyOracle(votes, min_votes, table.space(target).unknown());
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("labelfuse_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace labelfuse::testing

#endif  // LABELFUSE_TESTS_TEST_UTIL_H_
