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

#ifndef LABELFUSE_METRICS_H_
#define LABELFUSE_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "labelfuse/fusion3d.h"
#include "labelfuse/label_map.h"
#include "labelfuse/label_space.h"

namespace labelfuse {

// Per-class TP/FP/FN counters with the ambiguous-correspondence rule:
// a prediction whose correspondence set contains the true class is a TP,
// otherwise every class in the set receives an FP.
class ConfusionMatrix {
 public:
  struct Counts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    friend bool operator==(const Counts&, const Counts&) = default;
  };

  explicit ConfusionMatrix(const LabelSpace& space);

  const std::string& space_id() const { return space_id_; }
  ClassId unknown() const { return unknown_; }
  const Counts& counts(ClassId class_id) const { return counts_.at(class_id); }
  std::span<const Counts> all_counts() const { return counts_; }

  std::uint64_t total_samples() const { return total_samples_; }
  std::uint64_t total_correct() const { return total_correct_; }
  std::uint64_t ignored_samples() const { return ignored_samples_; }
  // FPs beyond one per missed sample, produced by ambiguous predictions.
  std::uint64_t extra_fp() const { return extra_fp_; }

  // Counterwise addition; the parallel-reduction contract.
  void Merge(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;

 private:
  friend void Accumulate(ConfusionMatrix&, std::span<const ClassId>,
                         std::string_view, std::span<const ClassId>,
                         const MappingTable&);

  std::string space_id_;
  ClassId unknown_;
  std::vector<Counts> counts_;  // indexed by class id
  std::uint64_t total_samples_ = 0;
  std::uint64_t total_correct_ = 0;
  std::uint64_t ignored_samples_ = 0;
  std::uint64_t extra_fp_ = 0;
};

// `predictions` are ids in `pred_space`; `ground_truth` ids in the matrix's
// space. Ground truth equal to the unknown label is ignored.
void Accumulate(ConfusionMatrix& cm, std::span<const ClassId> predictions,
                std::string_view pred_space,
                std::span<const ClassId> ground_truth,
                const MappingTable& table);

void Accumulate(ConfusionMatrix& cm, const LabelMap& prediction,
                const LabelMap& ground_truth, const MappingTable& table);

struct ClassRow {
  ClassId class_id = 0;
  std::string name;
  double iou = 0;
  double acc = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct EvalReport {
  std::string space_id;
  double miou = 0;
  double macc = 0;
  double tacc = 0;
  // Classes with TP+FP+FN > 0, sorted by id; only these enter the means.
  std::vector<ClassRow> rows;
  std::size_t evaluated_classes = 0;
  std::uint64_t samples = 0;
  std::uint64_t ignored_samples = 0;
  std::uint64_t extra_fp = 0;
};

EvalReport Report(const ConfusionMatrix& cm, const MappingTable& table);

// Point-by-point evaluation; `gt` must be labeled in `target_space`.
EvalReport EvalPointCloud(const LabeledPointCloud& pred,
                          const LabeledPointCloud& gt,
                          const MappingTable& table,
                          std::string_view target_space);

// mIoU/mAcc/tAcc header rows then one row per class.
std::string FormatReportText(const EvalReport& report);
// `class_id,name,iou,acc,tp,fp,fn`
std::string FormatReportCsv(const EvalReport& report);
// `miou=... macc=... tacc=...`
std::string FormatReportSummary(const EvalReport& report);

}  // namespace labelfuse

#endif  // LABELFUSE_METRICS_H_
