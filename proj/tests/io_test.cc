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

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "labelfuse/error.h"
#include "labelfuse/io.h"
#include "test_util.h"

namespace labelfuse {
namespace {

namespace fs = std::filesystem;
using testing::ShippedTable;
using testing::TempDir;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

TEST(PngTest, RoundTripAndDeterminism) {
  std::mt19937 rng(1);
  Gray16Image img{37, 21, {}};
  for (int i = 0; i < img.width * img.height; ++i) {
    img.pixels.push_back(static_cast<std::uint16_t>(rng()));
  }
  const auto bytes = EncodePng16(img);
  EXPECT_EQ(bytes, EncodePng16(img));
  const Gray16Image back = DecodePng16(bytes);
  EXPECT_EQ(back.width, 37);
  EXPECT_EQ(back.height, 21);
  EXPECT_EQ(back.pixels, img.pixels);
  EXPECT_THROW(DecodePng16(std::vector<std::uint8_t>{1, 2, 3}), Error);
}

TEST(PngTest, LabelMapRoundTripValidatesIds) {
  TempDir dir;
  const LabelSpace& nyu = ShippedTable().space("nyu40");
  LabelMap m = nyu.MakeLabelMap(5, 4);
  m.at(1, 2) = 40;
  m.at(4, 3) = 7;
  WriteLabelPng(dir / "a.png", m);
  EXPECT_EQ(ReadLabelPng(dir / "a.png", nyu), m);
  m.at(0, 0) = 41;
  WriteLabelPng(dir / "b.png", m);
  EXPECT_THROW(ReadLabelPng(dir / "b.png", nyu), Error);

  const LabelSpace& ade = ShippedTable().space("ade20k");
  LabelMap a = ade.MakeLabelMap(3, 3);
  a.at(0, 0) = 0;
  WriteLabelPng(dir / "c.png", a);
  const LabelMap ab = ReadLabelPng(dir / "c.png", ade);
  EXPECT_EQ(ab.at(0, 0), 0);
  EXPECT_EQ(ab.at(1, 1), kUnknownZeroBased);
}

TEST(PngTest, DepthIsStoredInMillimetres) {
  TempDir dir;
  DepthMap d(3, 2);
  d.at(0, 0) = 1.2344f;
  d.at(1, 0) = 0.0f;
  d.at(2, 1) = 70.0f;  // clamps
  WriteDepthPng(dir / "d.png", d);
  const DepthMap back = ReadDepthPng(dir / "d.png");
  EXPECT_FLOAT_EQ(back.at(0, 0), 1.234f);
  EXPECT_EQ(back.at(1, 0), 0.0f);
  EXPECT_FLOAT_EQ(back.at(2, 1), 65.535f);
  EXPECT_THROW(ReadDepthPng(dir / "missing.png"), Error);
}

TEST(CameraFileTest, PoseAndIntrinsicsRoundTrip) {
  TempDir dir;
  std::mt19937 rng(2);
  const Pose p = testing::RandomPose(rng);
  WritePose(dir / "p.txt", p);
  const Pose q = ReadPose(dir / "p.txt");
  EXPECT_EQ(p.rotation(), q.rotation());
  EXPECT_EQ(p.translation(), q.translation());

  const Intrinsics k{525.5, 524.25, 319.5, 239.5, 640, 480};
  WriteIntrinsics(dir / "k.txt", k);
  EXPECT_EQ(ReadIntrinsics(dir / "k.txt"), k);

  Spit(dir / "bad.txt", "1 0 0 0\n0 1 0 0\n0 0 1 0\n");
  EXPECT_THROW(ReadPose(dir / "bad.txt"), Error);
  Spit(dir / "badk.txt", "525 525 319.5\n");
  EXPECT_THROW(ReadIntrinsics(dir / "badk.txt"), Error);
}

TEST(PlyTest, AsciiWithExtraProperties) {
  const std::string text =
      "ply\nformat ascii 1.0\ncomment hi\n"
      "element vertex 2\nproperty double x\nproperty double y\n"
      "property double z\nproperty uchar red\nproperty ushort label\n"
      "element face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n"
      "1.5 2 3 255 7\n-1 0 0.25 0 0\n3 0 1 1\n";
  const PlyCloud c = ParsePly(text, "t.ply");
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[0], Eigen::Vector3d(1.5, 2, 3));
  EXPECT_EQ(c.points[1], Eigen::Vector3d(-1, 0, 0.25));
  EXPECT_EQ(c.labels, (std::vector<ClassId>{7, 0}));
}

TEST(PlyTest, BinaryLittleEndianFloat) {
  std::string bytes =
      "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
      "property float x\nproperty float y\nproperty float z\n"
      "property int flags\nend_header\n";
  const float v[2][3] = {{0.5f, 1.0f, -2.0f}, {3.0f, 4.0f, 5.0f}};
  for (const auto& row : v) {
    bytes.append(reinterpret_cast<const char*>(row), sizeof(row));
    const std::int32_t flags = 9;
    bytes.append(reinterpret_cast<const char*>(&flags), sizeof(flags));
  }
  const PlyCloud c = ParsePly(bytes, "b.ply");
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[1], Eigen::Vector3d(3, 4, 5));
  EXPECT_TRUE(c.labels.empty());
}

TEST(PlyTest, RejectsBadInput) {
  EXPECT_THROW(ParsePly("not a ply", "x"), Error);
  EXPECT_THROW(ParsePly("ply\nformat binary_big_endian 1.0\nelement vertex 0\n"
                        "property float x\nproperty float y\nproperty float z\n"
                        "end_header\n",
                        "x"),
               Error);
  EXPECT_THROW(ParsePly("ply\nformat ascii 1.0\nelement vertex 2\n"
                        "property float x\nproperty float y\nproperty float z\n"
                        "end_header\n1 2 3\n",
                        "x"),
               Error);
  EXPECT_THROW(ParsePly("ply\nformat ascii 1.0\nelement vertex 1\n"
                        "property float x\nproperty float y\nend_header\n1 2\n",
                        "x"),
               Error);
}

TEST(PlyTest, LabeledWriterRoundTripsAndIsDeterministic) {
  TempDir dir;
  LabeledPointCloud cloud;
  cloud.space_id = "wordnet";
  cloud.points = {{0.125, 1.5, -2.0}, {3.0, 0.0, 1.0}};
  cloud.labels = {7, 65535};
  WriteLabeledPly(dir / "a.ply", cloud);
  WriteLabeledPly(dir / "b.ply", cloud);
  EXPECT_EQ(Slurp(dir / "a.ply"), Slurp(dir / "b.ply"));
  const PlyCloud back = ReadPly(dir / "a.ply");
  EXPECT_EQ(back.points, cloud.points);
  EXPECT_EQ(back.labels, cloud.labels);
  EXPECT_NE(Slurp(dir / "a.ply").find("property ushort label"),
            std::string::npos);
}

TEST(PlyTest, ColoredWriterUsesPalette) {
  TempDir dir;
  Spit(dir / "pal.csv", "class_id,r,g,b\n7,10,20,30\n");
  const Palette pal = ReadPalette(dir / "pal.csv");
  ASSERT_EQ(pal.size(), 1u);
  EXPECT_EQ(pal.at(7), (Rgb{10, 20, 30}));
  LabeledPointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  cloud.labels = {7, 0, 8};
  WriteColoredPly(dir / "c.ply", cloud, pal);
  const std::string text = Slurp(dir / "c.ply");
  EXPECT_NE(text.find("property uchar red"), std::string::npos);
  EXPECT_EQ(ReadPly(dir / "c.ply").labels, cloud.labels);
  EXPECT_EQ(DefaultColor(8), DefaultColor(8));
}

TEST(PaletteTest, ShippedPaletteCoversWordnet) {
  const Palette pal =
      ReadPalette(fs::path(LABELFUSE_DATA_DIR) / "palette.csv");
  for (const ClassDef& c : ShippedTable().space("wordnet").classes()) {
    EXPECT_TRUE(pal.count(c.id)) << c.id;
  }
}

TEST(AtomicWriteTest, FileReplacedWholeAndNoTempLeft) {
  TempDir dir;
  WriteFileAtomic(dir / "f.txt", "one");
  WriteFileAtomic(dir / "f.txt", "two");
  EXPECT_EQ(Slurp(dir / "f.txt"), "two");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
  WriteFileAtomic(dir / "nested" / "g.txt", "x");
  EXPECT_EQ(Slurp(dir / "nested" / "g.txt"), "x");
  EXPECT_THROW(WriteFileAtomic(dir / "f.txt" / "below" / "h.txt", "x"), Error);
}

TEST(StagedDirectoryTest, CommitSwapsAndAbortLeavesTargetIntact) {
  TempDir dir;
  const fs::path target = dir / "out";
  {
    StagedDirectory stage(target);
    WriteFileAtomic(stage.path() / "a.txt", "first");
    EXPECT_FALSE(fs::exists(target));
    stage.Commit();
  }
  EXPECT_EQ(Slurp(target / "a.txt"), "first");
  {
    StagedDirectory stage(target);
    WriteFileAtomic(stage.path() / "b.txt", "partial");
    // Destroyed without commit, as on an error path.
  }
  EXPECT_TRUE(fs::exists(target / "a.txt"));
  EXPECT_FALSE(fs::exists(target / "b.txt"));
  {
    StagedDirectory stage(target);
    WriteFileAtomic(stage.path() / "c.txt", "second");
    stage.Commit();
  }
  EXPECT_FALSE(fs::exists(target / "a.txt"));
  EXPECT_EQ(Slurp(target / "c.txt"), "second");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
}

TEST(FrameFilesTest, PathsAndListing) {
  TempDir dir;
  EXPECT_EQ(FramePath(dir.path(), 12, ".png").filename(), "000012.png");
  Spit(FramePath(dir.path(), 3, ".png"), "");
  Spit(FramePath(dir.path(), 1, ".png"), "");
  Spit(dir / "notes.txt", "");
  Spit(dir / "x.png", "");
  EXPECT_EQ(ListFrames(dir.path(), ".png"), (std::vector<int>{1, 3}));
  EXPECT_THROW(ListFrames(dir / "missing", ".png"), Error);
}

}  // namespace
}  // namespace labelfuse
