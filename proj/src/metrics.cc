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

#include "labelfuse/metrics.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "labelfuse/error.h"

namespace labelfuse {

ConfusionMatrix::ConfusionMatrix(const LabelSpace& space)
    : space_id_(space.id()),
      unknown_(space.unknown()),
      counts_(static_cast<std::size_t>(space.max_id()) + 1) {}

void ConfusionMatrix::Merge(const ConfusionMatrix& other) {
  if (other.space_id_ != space_id_ || other.counts_.size() != counts_.size()) {
    throw InvalidArgument("cannot merge confusion matrices of different spaces");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i].tp += other.counts_[i].tp;
    counts_[i].fp += other.counts_[i].fp;
    counts_[i].fn += other.counts_[i].fn;
  }
  total_samples_ += other.total_samples_;
  total_correct_ += other.total_correct_;
  ignored_samples_ += other.ignored_samples_;
  extra_fp_ += other.extra_fp_;
}

void Accumulate(ConfusionMatrix& cm, std::span<const ClassId> predictions,
                std::string_view pred_space,
                std::span<const ClassId> ground_truth,
                const MappingTable& table) {
  if (predictions.size() != ground_truth.size()) {
    throw InvalidArgument("prediction and ground truth sizes differ (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(ground_truth.size()) + ")");
  }
  const Translator t = table.MakeTranslator(pred_space, cm.space_id_);
  const LabelSpace& gt_space = table.space(cm.space_id_);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const ClassId gt = ground_truth[i];
    if (gt == cm.unknown_) {
      ++cm.ignored_samples_;
      continue;
    }
    if (!gt_space.Contains(gt)) {
      throw InvalidArgument("ground truth sample " + std::to_string(i) +
                            " holds undeclared class " + std::to_string(gt));
    }
    const ClassId pred = predictions[i];
    if (!t.IsValid(pred)) {
      throw InvalidArgument("prediction sample " + std::to_string(i) +
                            " holds undeclared class " + std::to_string(pred));
    }
    ++cm.total_samples_;
    const auto candidates = t.Targets(pred);
    if (std::find(candidates.begin(), candidates.end(), gt) !=
        candidates.end()) {
      ++cm.counts_[gt].tp;
      ++cm.total_correct_;
      continue;
    }
    ++cm.counts_[gt].fn;
    for (ClassId c : candidates) ++cm.counts_[c].fp;
    if (candidates.size() > 1) cm.extra_fp_ += candidates.size() - 1;
  }
}

void Accumulate(ConfusionMatrix& cm, const LabelMap& prediction,
                const LabelMap& ground_truth, const MappingTable& table) {
  if (!prediction.SameShape(ground_truth)) {
    throw InvalidArgument("prediction and ground truth maps differ in shape");
  }
  if (ground_truth.space_id() != cm.space_id()) {
    throw InvalidArgument("ground truth is in '" + ground_truth.space_id() +
                          "', expected '" + cm.space_id() + "'");
  }
  Accumulate(cm, prediction.values(), prediction.space_id(),
             ground_truth.values(), table);
}

EvalReport Report(const ConfusionMatrix& cm, const MappingTable& table) {
  const LabelSpace& space = table.space(cm.space_id());
  EvalReport report;
  report.space_id = cm.space_id();
  report.samples = cm.total_samples();
  report.ignored_samples = cm.ignored_samples();
  report.extra_fp = cm.extra_fp();
  double iou_sum = 0;
  double acc_sum = 0;
  const auto counts = cm.all_counts();
  for (std::size_t id = 0; id < counts.size(); ++id) {
    const auto& c = counts[id];
    const std::uint64_t denom = c.tp + c.fp + c.fn;
    if (denom == 0) continue;
    ClassRow row;
    row.class_id = static_cast<ClassId>(id);
    const ClassDef* def = space.Find(row.class_id);
    row.name = def ? def->name : std::to_string(id);
    row.tp = c.tp;
    row.fp = c.fp;
    row.fn = c.fn;
    row.iou = static_cast<double>(c.tp) / static_cast<double>(denom);
    row.acc = c.tp + c.fn == 0
                  ? 0.0
                  : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    iou_sum += row.iou;
    acc_sum += row.acc;
    report.rows.push_back(std::move(row));
  }
  report.evaluated_classes = report.rows.size();
  if (!report.rows.empty()) {
    report.miou = iou_sum / static_cast<double>(report.rows.size());
    report.macc = acc_sum / static_cast<double>(report.rows.size());
  }
  report.tacc = cm.total_samples() == 0
                    ? 0.0
                    : static_cast<double>(cm.total_correct()) /
                          static_cast<double>(cm.total_samples());
  return report;
}

EvalReport EvalPointCloud(const LabeledPointCloud& pred,
                          const LabeledPointCloud& gt,
                          const MappingTable& table,
                          std::string_view target_space) {
  if (pred.labels.size() != gt.labels.size()) {
    throw InvalidArgument("point count mismatch: " +
                          std::to_string(pred.labels.size()) + " predicted vs " +
                          std::to_string(gt.labels.size()) + " ground truth");
  }
  if (gt.space_id != target_space) {
    throw InvalidArgument("ground truth cloud is in '" + gt.space_id +
                          "', expected '" + std::string(target_space) + "'");
  }
  ConfusionMatrix cm(table.space(target_space));
  Accumulate(cm, pred.labels, pred.space_id, gt.labels, table);
  return Report(cm, table);
}

namespace {

std::string Fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string FormatReportText(const EvalReport& report) {
  std::size_t name_width = 14;
  for (const ClassRow& row : report.rows) {
    name_width = std::max(name_width, row.name.size() + 1);
  }
  auto pad = [&](const std::string& s) {
    return s + std::string(name_width - std::min(name_width, s.size()), ' ');
  };
  std::ostringstream out;
  out << pad("mIoU") << ' ' << Fixed(report.miou) << '\n'
      << pad("mAcc") << ' ' << Fixed(report.macc) << '\n'
      << pad("tAcc") << ' ' << Fixed(report.tacc) << '\n'
      << std::string(name_width + 46, '-') << '\n';
  char line[128];
  std::snprintf(line, sizeof(line), " %6s %6s %10s %10s %10s", "IoU", "Acc",
                "TP", "FP", "FN");
  out << pad("class") << line << '\n';
  for (const ClassRow& row : report.rows) {
    std::snprintf(line, sizeof(line), " %6.3f %6.3f %10llu %10llu %10llu",
                  row.iou, row.acc, static_cast<unsigned long long>(row.tp),
                  static_cast<unsigned long long>(row.fp),
                  static_cast<unsigned long long>(row.fn));
    out << pad(row.name) << line << '\n';
  }
  out << "classes=" << report.evaluated_classes
      << " samples=" << report.samples
      << " ignored=" << report.ignored_samples
      << " extra_fp=" << report.extra_fp << '\n';
  return out.str();
}

std::string FormatReportCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "class_id,name,iou,acc,tp,fp,fn\n";
  for (const ClassRow& row : report.rows) {
    std::string name = row.name;
    if (name.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      name = quoted + "\"";
    }
    out << row.class_id << ',' << name << ',' << Fixed(row.iou, 6) << ','
        << Fixed(row.acc, 6) << ',' << row.tp << ',' << row.fp << ','
        << row.fn << '\n';
  }
  return out.str();
}

std::string FormatReportSummary(const EvalReport& report) {
  return "miou=" + Fixed(report.miou, 6) + " macc=" + Fixed(report.macc, 6) +
         " tacc=" + Fixed(report.tacc, 6);
}

}  // namespace labelfuse
