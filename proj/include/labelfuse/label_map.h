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

#ifndef LABELFUSE_LABEL_MAP_H_
#define LABELFUSE_LABEL_MAP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace labelfuse {

using ClassId = std::uint16_t;

// Unknown sentinel for spaces whose class ids start at 1.
inline constexpr ClassId kUnknownLabel = 0;
// Unknown sentinel for spaces that use 0 as a real class (zero-based ids).
inline constexpr ClassId kUnknownZeroBased = 0xFFFF;

// Dense H x W grid of class ids in one label space.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, std::string space_id,
           ClassId unknown = kUnknownLabel);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  const std::string& space_id() const { return space_id_; }
  ClassId unknown() const { return unknown_; }

  ClassId at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  ClassId& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const ClassId> values() const { return values_; }
  std::span<ClassId> values() { return values_; }

  bool SameShape(const LabelMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  void Fill(ClassId value);

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::string space_id_;
  ClassId unknown_ = kUnknownLabel;
  std::vector<ClassId> values_;
};

}  // namespace labelfuse

#endif  // LABELFUSE_LABEL_MAP_H_
