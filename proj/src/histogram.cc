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

#include "labelfuse/histogram.h"

#include <algorithm>

namespace labelfuse {

void ClassHistogram::Add(ClassId class_id, std::uint32_t count) {
  auto it = std::lower_bound(
      bins_.begin(), bins_.end(), class_id,
      [](const Bin& b, ClassId id) { return b.class_id < id; });
  if (it != bins_.end() && it->class_id == class_id) {
    it->count += count;
  } else {
    bins_.insert(it, Bin{class_id, count});
  }
}

void ClassHistogram::Merge(const ClassHistogram& other) {
  for (const Bin& b : other.bins_) Add(b.class_id, b.count);
}

ClassId ClassHistogram::ArgMax(ClassId unknown) const {
  const Bin* best = nullptr;
  for (const Bin& b : bins_) {
    // Bins are sorted, so strict > keeps the smallest id among ties.
    if (best == nullptr || b.count > best->count) best = &b;
  }
  return best ? best->class_id : unknown;
}

std::uint64_t ClassHistogram::Total() const {
  std::uint64_t total = 0;
  for (const Bin& b : bins_) total += b.count;
  return total;
}

std::uint32_t ClassHistogram::CountOf(ClassId class_id) const {
  for (const Bin& b : bins_) {
    if (b.class_id == class_id) return b.count;
  }
  return 0;
}

}  // namespace labelfuse
