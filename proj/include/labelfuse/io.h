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

#ifndef LABELFUSE_IO_H_
#define LABELFUSE_IO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "labelfuse/fusion3d.h"
#include "labelfuse/geometry.h"
#include "labelfuse/label_map.h"
#include "labelfuse/label_space.h"

namespace labelfuse {

// 16-bit grayscale PNG. Encoder settings are fixed so output bytes depend
// only on the pixel values.
struct Gray16Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

std::vector<std::uint8_t> EncodePng16(const Gray16Image& image);
Gray16Image DecodePng16(std::span<const std::uint8_t> bytes,
                        const std::string& source = "<memory>");
Gray16Image ReadPng16(const std::filesystem::path& path);
void WritePng16(const std::filesystem::path& path, const Gray16Image& image);

// Label maps: pixel value = class id. Values are checked against `space`.
LabelMap ReadLabelPng(const std::filesystem::path& path,
                      const LabelSpace& space);
void WriteLabelPng(const std::filesystem::path& path, const LabelMap& map);

// Depth: millimeters, 0 = invalid.
DepthMap ReadDepthPng(const std::filesystem::path& path);
void WriteDepthPng(const std::filesystem::path& path, const DepthMap& depth);

// 4 rows x 4 whitespace-separated numbers, camera-to-world, row-major.
Pose ReadPose(const std::filesystem::path& path);
void WritePose(const std::filesystem::path& path, const Pose& pose);

// Single line `fx fy cx cy width height`.
Intrinsics ReadIntrinsics(const std::filesystem::path& path);
void WriteIntrinsics(const std::filesystem::path& path, const Intrinsics& k);

struct PlyCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<ClassId> labels;  // empty when the file has no label property
};

// Reads vertex x/y/z (float or double) and an optional integer `label`
// property from ASCII or binary little-endian PLY.
PlyCloud ReadPly(const std::filesystem::path& path);
PlyCloud ParsePly(std::string_view bytes, const std::string& source);

// Binary little-endian PLY with float x,y,z and ushort label.
void WriteLabeledPly(const std::filesystem::path& path,
                     const LabeledPointCloud& cloud);

using Rgb = std::array<std::uint8_t, 3>;
using Palette = std::map<ClassId, Rgb>;

// `class_id,r,g,b` lines; `#` comments and a header line are allowed.
Palette ReadPalette(const std::filesystem::path& path);
// Deterministic fallback colour for classes missing from a palette.
Rgb DefaultColor(ClassId class_id);
// Binary PLY with x,y,z, ushort label and uchar red/green/blue.
void WriteColoredPly(const std::filesystem::path& path,
                     const LabeledPointCloud& cloud, const Palette& palette);

// Writes `bytes` to a temporary sibling and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view bytes);

// Builds a directory under a temporary name and swaps it into place on
// Commit(). Without Commit() the staging directory is removed and any
// previous contents of the target survive untouched.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& path() const { return staging_; }
  const std::filesystem::path& target() const { return target_; }
  void Commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

// `<dir>/<frame:06d><ext>`
std::filesystem::path FramePath(const std::filesystem::path& dir, int frame,
                                std::string_view ext);
// Sorted frame indices of files named `<digits><ext>` in `dir`.
std::vector<int> ListFrames(const std::filesystem::path& dir,
                            std::string_view ext);

}  // namespace labelfuse

#endif  // LABELFUSE_IO_H_
