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

#ifndef LABELFUSE_HISTOGRAM_H_
#define LABELFUSE_HISTOGRAM_H_

#include <cstdint>
#include <span>
#include <utility>

#include <boost/container/small_vector.hpp>

#include "labelfuse/label_map.h"

namespace labelfuse {

// Sparse class -> count histogram kept sorted by class id.
class ClassHistogram {
 public:
  struct Bin {
    ClassId class_id = 0;
    std::uint32_t count = 0;
    friend bool operator==(const Bin&, const Bin&) = default;
  };

  void Add(ClassId class_id, std::uint32_t count = 1);
  void Merge(const ClassHistogram& other);

  // Class with the largest count, smallest id on ties; `unknown` if empty.
  ClassId ArgMax(ClassId unknown) const;
  std::uint64_t Total() const;
  std::uint32_t CountOf(ClassId class_id) const;
  bool empty() const { return bins_.empty(); }
  std::span<const Bin> bins() const { return {bins_.data(), bins_.size()}; }

  friend bool operator==(const ClassHistogram& a, const ClassHistogram& b) {
    return a.bins_ == b.bins_;
  }

 private:
  boost::container::small_vector<Bin, 3> bins_;
};

}  // namespace labelfuse

#endif  // LABELFUSE_HISTOGRAM_H_
