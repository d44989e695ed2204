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

#include "labelfuse/label_map.h"

#include <algorithm>

#include "labelfuse/error.h"

namespace labelfuse {

LabelMap::LabelMap(int width, int height, std::string space_id, ClassId unknown)
    : width_(width),
      height_(height),
      space_id_(std::move(space_id)),
      unknown_(unknown) {
  if (width < 0 || height < 0) {
    throw InvalidArgument("label map dimensions must be non-negative");
  }
  values_.assign(static_cast<std::size_t>(width) * height, unknown);
}

void LabelMap::Fill(ClassId value) {
  std::fill(values_.begin(), values_.end(), value);
}

}  // namespace labelfuse
