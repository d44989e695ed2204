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

#include <algorithm>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "labelfuse/error.h"
#include "labelfuse/fusion3d.h"
#include "labelfuse/scenegen.h"
#include "test_util.h"

namespace labelfuse {
namespace {

using testing::ShippedTable;

const Intrinsics kSmall{20, 20, 7.5, 5.5, 16, 12};

Frame FlatFrame(int index, float depth, const Intrinsics& k = kSmall) {
  Frame f;
  f.index = index;
  f.intrinsics = k;
  f.depth = DepthMap(k.width, k.height);
  for (float& d : f.depth.values()) d = depth;
  return f;
}

const SceneRender& Room() {
  static const SceneRender render =
      RenderScene(DefaultRoomScene(ShippedTable().space("wordnet")));
  return render;
}

double PointAccuracy(const LabeledPointCloud& got, const LabeledPointCloud& gt) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    correct += got.labels[i] == gt.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(gt.labels.size());
}

TEST(LiftPointsTest, MajorityOfThreeFrames) {
  const std::vector<Frame> frames{FlatFrame(0, 2), FlatFrame(1, 2),
                                  FlatFrame(2, 2)};
  std::vector<LabelMap> labels;
  for (ClassId c : {2, 2, 8}) {  // chair, chair, table
    LabelMap m(16, 12, "wordnet");
    m.Fill(c);
    labels.push_back(m);
  }
  const std::vector<Eigen::Vector3d> pts{{0, 0, 2}, {0, 0, 5}};
  const LabeledPointCloud out = LiftPoints(pts, frames, labels);
  EXPECT_EQ(out.labels[0], 2);
  EXPECT_EQ(out.labels[1], kUnknownLabel);  // occluded in every frame
  EXPECT_EQ(out.space_id, "wordnet");

  LiftOptions no_occlusion;
  no_occlusion.occlusion_check = false;
  no_occlusion.keep_histograms = true;
  const LabeledPointCloud all = LiftPoints(pts, frames, labels, no_occlusion);
  EXPECT_EQ(all.labels[1], 2);
  ASSERT_EQ(all.histograms.size(), 2u);
  EXPECT_EQ(all.histograms[1].CountOf(8), 1u);
}

TEST(LiftPointsTest, TiesGoToSmallestIdAndUnknownIsIgnored) {
  const std::vector<Frame> frames{FlatFrame(0, 2), FlatFrame(1, 2),
                                  FlatFrame(2, 2)};
  std::vector<LabelMap> labels;
  for (ClassId c : {9, 4, 0}) {
    LabelMap m(16, 12, "wordnet");
    m.Fill(c);
    labels.push_back(m);
  }
  const std::vector<Eigen::Vector3d> pts{{0, 0, 2}};
  EXPECT_EQ(LiftPoints(pts, frames, labels).labels[0], 4);
}

TEST(LiftPointsTest, ResolutionMismatchIsAnError) {
  const std::vector<Frame> frames{FlatFrame(0, 2)};
  const std::vector<LabelMap> labels{LabelMap(8, 8, "wordnet")};
  const std::vector<Eigen::Vector3d> pts{{0, 0, 2}};
  EXPECT_THROW(LiftPoints(pts, frames, labels), Error);
}

TEST(LiftPointsTest, MatchesTallyOracleOnRandomVoteSets) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> frame_count(1, 9);
  std::uniform_int_distribution<int> cls(0, 5);
  std::bernoulli_distribution occluded(0.25);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = frame_count(rng);
    std::vector<Frame> frames;
    std::vector<LabelMap> labels;
    for (int f = 0; f < n; ++f) {
      Frame fr = FlatFrame(f, 2);
      LabelMap m(16, 12, "s");
      for (ClassId& v : m.values()) v = static_cast<ClassId>(cls(rng));
      for (float& d : fr.depth.values()) {
        if (occluded(rng)) d = 1.0f;
      }
      frames.push_back(std::move(fr));
      labels.push_back(std::move(m));
    }
    std::vector<Eigen::Vector3d> pts;
    std::vector<Pixel> pix;
    for (int y = 0; y < 12; y += 3) {
      for (int x = 0; x < 16; x += 3) {
        pts.push_back(Unproject(x, y, 2.0, kSmall, Pose::Identity()));
        pix.push_back({x, y});
      }
    }
    const LabeledPointCloud out = LiftPoints(pts, frames, labels);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::vector<OracleVote> votes;
      for (int f = 0; f < n; ++f) {
        if (frames[f].depth.at(pix[p].x, pix[p].y) != 2.0f) continue;
        const ClassId c = labels[f].at(pix[p].x, pix[p].y);
        if (c != kUnknownLabel) votes.push_back({c, 1, -1});
      }
      ASSERT_EQ(out.labels[p], TallyOracle(votes, 1)) << "trial " << trial;
    }
  }
}

TEST(LiftPointsTest, NoiselessRoomRecoversGroundTruth) {
  const SceneRender& room = Room();
  const auto frames = room.Frames();
  const auto labels = room.Labels();
  const LabeledPointCloud out =
      LiftPoints(room.gt_cloud.points, frames, labels);
  EXPECT_GE(PointAccuracy(out, room.gt_cloud), 0.999);
}

TEST(LiftPointsTest, NoisyRoomAndFrameOrderInvariance) {
  const SceneRender& room = Room();
  std::vector<Frame> frames = room.Frames();
  std::vector<LabelMap> labels;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    labels.push_back(SimulatePredictor(
        room.views[i].labels, NoiseModel{0.3, std::nullopt, 100 + i},
        ShippedTable()));
  }
  const LabeledPointCloud base =
      LiftPoints(room.gt_cloud.points, frames, labels);
  EXPECT_GE(PointAccuracy(base, room.gt_cloud), 0.99);

  std::vector<std::size_t> order(frames.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Frame> f2;
  std::vector<LabelMap> l2;
  for (std::size_t i : order) {
    f2.push_back(frames[i]);
    l2.push_back(labels[i]);
  }
  EXPECT_EQ(LiftPoints(room.gt_cloud.points, f2, l2).labels, base.labels);
}

TEST(PointVoteAccumulatorTest, MergeOfSplitsEqualsWhole) {
  const SceneRender& room = Room();
  const auto frames = room.Frames();
  const auto labels = room.Labels();
  const auto& pts = room.gt_cloud.points;
  PointVoteAccumulator whole(pts, "wordnet", kUnknownLabel);
  PointVoteAccumulator a(pts, "wordnet", kUnknownLabel);
  PointVoteAccumulator b(pts, "wordnet", kUnknownLabel);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    whole.AddFrame(frames[i], labels[i]);
    (i < 7 ? a : b).AddFrame(frames[i], labels[i]);
  }
  b.Merge(a);
  ASSERT_EQ(whole.histograms().size(), b.histograms().size());
  EXPECT_TRUE(std::equal(whole.histograms().begin(), whole.histograms().end(),
                         b.histograms().begin()));
  EXPECT_EQ(whole.Finish().labels, b.Finish().labels);
}

TEST(VoxelFieldTest, SingleLabeledPixelGivesOneCell) {
  Frame f = FlatFrame(0, 0);
  f.depth.at(3, 4) = 1.5f;
  LabelMap m(16, 12, "wordnet");
  m.Fill(5);
  const std::vector<Frame> frames{f};
  const std::vector<LabelMap> labels{m};
  const SemanticVoxelGrid g = BuildVoxelField(frames, labels, 0.05);
  ASSERT_EQ(g.size(), 1u);
  const ClassHistogram& h = g.cells().begin()->second;
  ASSERT_EQ(h.bins().size(), 1u);
  EXPECT_EQ(h.bins()[0], (ClassHistogram::Bin{5, 1}));

  const LabelMap r = RenderLabels(g, f);
  EXPECT_EQ(r.at(3, 4), 5);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      if (x != 3 || y != 4) EXPECT_EQ(r.at(x, y), kUnknownLabel);
    }
  }
  EXPECT_EQ(DumpVoxelGrid(g).back(), '\n');
}

TEST(VoxelFieldTest, EmptyGridRendersUnknown) {
  const SemanticVoxelGrid g(0.05, Eigen::Vector3d::Zero(), "ade20k",
                            kUnknownZeroBased);
  const LabelMap r = RenderLabels(g, FlatFrame(0, 2));
  for (ClassId v : r.values()) EXPECT_EQ(v, kUnknownZeroBased);
  EXPECT_EQ(DumpVoxelGrid(g), "");
}

TEST(VoxelFieldTest, KeyIsFloorOfOffset) {
  const SemanticVoxelGrid g(0.1, Eigen::Vector3d(-1, 0, 0.5), "s");
  EXPECT_EQ(g.KeyOf({-1, 0, 0.5}), (VoxelKey{0, 0, 0}));
  EXPECT_EQ(g.KeyOf({-1.05, 0.25, 0.45}), (VoxelKey{-1, 2, -1}));
  EXPECT_THROW(SemanticVoxelGrid(0, Eigen::Vector3d::Zero(), "s"), Error);
}

TEST(VoxelFieldTest, MergeOfHalvesEqualsWhole) {
  const SceneRender& room = Room();
  const auto frames = room.Frames();
  const auto labels = room.Labels();
  const Eigen::Vector3d origin = ComputeFieldOrigin(frames, labels, 0.05);
  const SemanticVoxelGrid whole = BuildVoxelField(frames, labels, 0.05, origin);
  const std::span<const Frame> fs(frames);
  const std::span<const LabelMap> ls(labels);
  const SemanticVoxelGrid a =
      BuildVoxelField(fs.first(10), ls.first(10), 0.05, origin);
  const SemanticVoxelGrid b =
      BuildVoxelField(fs.subspan(10), ls.subspan(10), 0.05, origin);
  EXPECT_TRUE(Merge(a, b) == whole);
  EXPECT_TRUE(Merge(b, a) == whole);
  EXPECT_EQ(ComputeFieldOrigin(fs.first(10), ls.first(10), 0.05),
            ComputeFieldOrigin(fs.first(10), ls.first(10), 0.05));
}

TEST(VoxelFieldTest, FrameOrderDoesNotMatter) {
  const SceneRender& room = Room();
  auto frames = room.Frames();
  auto labels = room.Labels();
  const SemanticVoxelGrid base = BuildVoxelField(frames, labels, 0.05);
  std::reverse(frames.begin(), frames.end());
  std::reverse(labels.begin(), labels.end());
  EXPECT_TRUE(BuildVoxelField(frames, labels, 0.05) == base);
}

TEST(VoxelFieldTest, RefinementNeverLosesCells) {
  const SceneRender& room = Room();
  const auto frames = room.Frames();
  const auto labels = room.Labels();
  const Eigen::Vector3d origin(-0.5, -0.5, -0.5);
  std::size_t prev = 0;
  for (double size : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const std::size_t n = BuildVoxelField(frames, labels, size, origin).size();
    EXPECT_GE(n, prev) << size;
    prev = n;
  }
}

SemanticVoxelGrid RandomGrid(std::mt19937& rng) {
  SemanticVoxelGrid g(0.1, Eigen::Vector3d::Zero(), "s");
  std::uniform_int_distribution<int> coord(-2, 2);
  std::uniform_int_distribution<int> cls(1, 4);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> n(0, 12);
  const int cells = n(rng);
  for (int i = 0; i < cells; ++i) {
    g.Add({coord(rng), coord(rng), coord(rng)}, static_cast<ClassId>(cls(rng)),
          static_cast<std::uint32_t>(count(rng)));
  }
  return g;
}

TEST(VoxelMergeTest, CommutativeMonoid) {
  std::mt19937 rng(12);
  const SemanticVoxelGrid empty(0.1, Eigen::Vector3d::Zero(), "s");
  for (int trial = 0; trial < 300; ++trial) {
    const SemanticVoxelGrid a = RandomGrid(rng);
    const SemanticVoxelGrid b = RandomGrid(rng);
    const SemanticVoxelGrid c = RandomGrid(rng);
    EXPECT_TRUE(Merge(a, empty) == a);
    EXPECT_TRUE(Merge(empty, a) == a);
    EXPECT_TRUE(Merge(a, b) == Merge(b, a));
    EXPECT_TRUE(Merge(Merge(a, b), c) == Merge(a, Merge(b, c)));
    const SemanticVoxelGrid ab = Merge(a, b);
    for (int x = -2; x <= 2; ++x) {
      for (int y = -2; y <= 2; ++y) {
        for (int z = -2; z <= 2; ++z) {
          for (ClassId k = 1; k <= 4; ++k) {
            auto count = [&](const SemanticVoxelGrid& g) -> std::uint32_t {
              const ClassHistogram* h = g.Find({x, y, z});
              return h ? h->CountOf(k) : 0;
            };
            ASSERT_EQ(count(ab), count(a) + count(b));
          }
        }
      }
    }
  }
}

TEST(VoxelMergeTest, MismatchedLayoutThrows) {
  const SemanticVoxelGrid a(0.1, Eigen::Vector3d::Zero(), "s");
  const SemanticVoxelGrid b(0.2, Eigen::Vector3d::Zero(), "s");
  const SemanticVoxelGrid c(0.1, Eigen::Vector3d::Ones(), "s");
  EXPECT_THROW(Merge(a, b), Error);
  EXPECT_THROW(Merge(a, c), Error);
}

TEST(VoxelFieldTest, HeldOutRenderMatchesGroundTruth) {
  const SceneRender& room = Room();
  const auto frames = room.Frames();
  const auto labels = room.Labels();
  const SemanticVoxelGrid g = BuildVoxelField(frames, labels, 0.05);
  SceneSpec spec = DefaultRoomScene(ShippedTable().space("wordnet"));
  const Pose pose = spec.orbit->PoseAt(spec.orbit->AngleOf(0) +
                                       std::numbers::pi / 20);
  const RenderedView held = RenderView(spec, pose, 20);
  const LabelMap r = RenderLabels(g, held.frame);
  std::size_t valid = 0, match = 0;
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      if (held.frame.depth.at(x, y) <= 0) continue;
      ++valid;
      match += r.at(x, y) == held.labels.at(x, y);
    }
  }
  ASSERT_GT(valid, 0u);
  EXPECT_GE(static_cast<double>(match) / valid, 0.98);
}

}  // namespace
}  // namespace labelfuse
