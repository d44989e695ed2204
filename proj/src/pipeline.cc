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

#include "labelfuse/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "json.hpp"
#include "labelfuse/consensus.h"
#include "labelfuse/error.h"
#include "labelfuse/io.h"
#include "labelfuse/parallel.h"
#include "labelfuse/rng.h"

namespace labelfuse {
namespace fs = std::filesystem;

namespace {

void Log(const RunOptions& options, const std::string& message) {
  if (options.verbose) std::fprintf(stderr, "labelfuse: %s\n", message.c_str());
}

fs::path Under(const fs::path& root, std::string_view relative) {
  fs::path p{std::string(relative)};
  return p.is_absolute() ? p : root / p;
}

std::string FrameName(int frame) { return FramePath("", frame, ".png").string(); }

std::vector<int> RequireFrames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("missing directory " + dir.string());
  return ListFrames(dir, ".png");
}

}  // namespace

Dataset Dataset::Open(const fs::path& root) {
  if (root.empty()) throw ConfigError("no dataset directory configured");
  if (!fs::is_directory(root)) {
    throw IoError("dataset directory " + root.string() + " does not exist");
  }
  Dataset d;
  d.root_ = root;
  d.intrinsics_ = ReadIntrinsics(root / "intrinsics.txt");
  const fs::path poses = root / "poses";
  if (fs::is_directory(poses)) d.frames_ = ListFrames(poses, ".txt");
  return d;
}

fs::path Dataset::Path(std::string_view relative) const {
  return Under(root_, relative);
}

fs::path Dataset::PosePath(int frame) const {
  return FramePath(root_ / "poses", frame, ".txt");
}

fs::path Dataset::DepthPath(int frame) const {
  return FramePath(root_ / "depth", frame, ".png");
}

fs::path Dataset::GtLabelPath(int frame) const {
  return FramePath(root_ / "gt_label", frame, ".png");
}

Frame Dataset::LoadFrame(int frame) const {
  Frame f;
  f.index = frame;
  f.intrinsics = intrinsics_;
  f.pose = ReadPose(PosePath(frame));
  f.depth = ReadDepthPng(DepthPath(frame));
  if (f.depth.width() != intrinsics_.width ||
      f.depth.height() != intrinsics_.height) {
    throw IoError(DepthPath(frame).string() + ": depth is " +
                  std::to_string(f.depth.width()) + "x" +
                  std::to_string(f.depth.height()) + ", intrinsics say " +
                  std::to_string(intrinsics_.width) + "x" +
                  std::to_string(intrinsics_.height));
  }
  return f;
}

std::vector<int> ConsensusFrames(const PipelineConfig& config,
                                 const fs::path& dataset_root) {
  std::vector<std::vector<int>> per_stream;
  std::set<int> all;
  for (const StreamSpec& s : config.streams) {
    per_stream.push_back(RequireFrames(Under(dataset_root, s.dir)));
    all.insert(per_stream.back().begin(), per_stream.back().end());
  }
  for (std::size_t i = 0; i < per_stream.size(); ++i) {
    const std::set<int> have(per_stream[i].begin(), per_stream[i].end());
    for (int f : all) {
      if (!have.contains(f)) {
        throw IoError("stream '" + config.streams[i].name + "' has no frame " +
                      FrameName(f) + " in " +
                      Under(dataset_root, config.streams[i].dir).string());
      }
    }
  }
  return {all.begin(), all.end()};
}

std::vector<int> RunConsensus(const PipelineConfig& config,
                              const MappingTable& table,
                              const RunOptions& options) {
  config.ValidateAgainst(table);
  if (!fs::is_directory(config.dataset)) {
    throw IoError("dataset directory " + config.dataset.string() +
                  " does not exist");
  }
  const std::vector<int> frames = ConsensusFrames(config, config.dataset);
  Log(options, "consensus over " + std::to_string(frames.size()) +
                   " frames, " + std::to_string(config.streams.size()) +
                   " streams");
  std::vector<const LabelSpace*> spaces;
  for (const StreamSpec& s : config.streams) spaces.push_back(&table.space(s.space));

  StagedDirectory staged(Under(config.dataset, config.consensus_dir));
  ParallelFor(frames.size(), options.threads, [&](std::size_t i) {
    std::vector<LabelMap> maps;
    maps.reserve(config.streams.size());
    for (std::size_t s = 0; s < config.streams.size(); ++s) {
      maps.push_back(ReadLabelPng(
          FramePath(Under(config.dataset, config.streams[s].dir), frames[i],
                    ".png"),
          *spaces[s]));
    }
    std::vector<StreamFrame> inputs;
    for (std::size_t s = 0; s < maps.size(); ++s) {
      inputs.push_back(
          {&maps[s], config.streams[s].weight, config.streams[s].priority});
    }
    const LabelMap out =
        ConsensusFrame(inputs, config.target_space, config.min_votes, table);
    WriteLabelPng(FramePath(staged.path(), frames[i], ".png"), out);
  });
  staged.Commit();
  return frames;
}

LabeledPointCloud RunLift(const PipelineConfig& config,
                          const MappingTable& table, const RunOptions& options,
                          const LiftRunOptions& lift) {
  config.Validate();
  const LabelSpace& target = table.space(config.target_space);
  const Dataset dataset = Dataset::Open(config.dataset);
  const PlyCloud input = ReadPly(dataset.Path(config.point_cloud));
  const fs::path labels_dir = dataset.Path(config.consensus_dir);
  const std::vector<int> frames = RequireFrames(labels_dir);
  Log(options, "lifting " + std::to_string(frames.size()) + " frames onto " +
                   std::to_string(input.points.size()) + " points");

  LiftOptions lift_options;
  lift_options.tolerance = config.visibility_tolerance;
  lift_options.occlusion_check = lift.occlusion_check;
  PointVoteAccumulator acc = ParallelReduce<PointVoteAccumulator>(
      frames.size(), options.threads,
      [&] {
        return PointVoteAccumulator(input.points, target.id(), target.unknown(),
                                    lift_options);
      },
      [&](PointVoteAccumulator& a, std::size_t i) {
        const Frame frame = dataset.LoadFrame(frames[i]);
        a.AddFrame(frame,
                   ReadLabelPng(FramePath(labels_dir, frames[i], ".png"), target));
      },
      [](PointVoteAccumulator& a, const PointVoteAccumulator& b) { a.Merge(b); });
  LabeledPointCloud cloud = acc.Finish();

  const fs::path out =
      lift.output.empty() ? dataset.Path(config.lift_output) : lift.output;
  WriteLabeledPly(out, cloud);
  if (config.palette) {
    fs::path colored = out;
    colored.replace_filename(out.stem().string() + "_color.ply");
    WriteColoredPly(colored, cloud, ReadPalette(*config.palette));
  }
  return cloud;
}

SemanticVoxelGrid BuildFieldFromConsensus(const PipelineConfig& config,
                                          const MappingTable& table,
                                          const Dataset& dataset,
                                          const RunOptions& options) {
  const LabelSpace& target = table.space(config.target_space);
  const fs::path labels_dir = dataset.Path(config.consensus_dir);
  const std::vector<int> frames = RequireFrames(labels_dir);
  auto load = [&](std::size_t i) {
    return std::pair<Frame, LabelMap>(
        dataset.LoadFrame(frames[i]),
        ReadLabelPng(FramePath(labels_dir, frames[i], ".png"), target));
  };
  using MaybePoint = std::optional<Eigen::Vector3d>;
  const MaybePoint lo = ParallelReduce<MaybePoint>(
      frames.size(), options.threads, [] { return MaybePoint(); },
      [&](MaybePoint& m, std::size_t i) {
        const auto [frame, labels] = load(i);
        const MaybePoint p = MinLabeledPoint(frame, labels);
        if (p) m = m ? m->cwiseMin(*p) : *p;
      },
      [](MaybePoint& a, const MaybePoint& b) {
        if (b) a = a ? a->cwiseMin(*b) : *b;
      });
  const Eigen::Vector3d origin = FieldOriginFromMin(lo, config.voxel_size);
  return ParallelReduce<SemanticVoxelGrid>(
      frames.size(), options.threads,
      [&] {
        return SemanticVoxelGrid(config.voxel_size, origin, target.id(),
                                 target.unknown());
      },
      [&](SemanticVoxelGrid& g, std::size_t i) {
        const auto [frame, labels] = load(i);
        IntegrateFrame(g, frame, labels);
      },
      [](SemanticVoxelGrid& a, const SemanticVoxelGrid& b) { a.MergeFrom(b); });
}

std::vector<int> RunRender(const PipelineConfig& config,
                           const MappingTable& table, const RunOptions& options,
                           const RenderRunOptions& render) {
  config.Validate();
  const Dataset dataset = Dataset::Open(config.dataset);
  const SemanticVoxelGrid grid =
      BuildFieldFromConsensus(config, table, dataset, options);
  Log(options, "voxel field has " + std::to_string(grid.size()) + " cells");
  const std::vector<int> frames =
      render.frames.empty() ? dataset.frames() : render.frames;
  StagedDirectory staged(dataset.Path(config.render_dir));
  ParallelFor(frames.size(), options.threads, [&](std::size_t i) {
    const Frame frame = dataset.LoadFrame(frames[i]);
    WriteLabelPng(FramePath(staged.path(), frames[i], ".png"),
                  RenderLabels(grid, frame));
  });
  if (render.voxel_dump) WriteFileAtomic(*render.voxel_dump, DumpVoxelGrid(grid));
  staged.Commit();
  return frames;
}

namespace {

LabeledPointCloud ReadLabeledCloud(const fs::path& path,
                                   const LabelSpace& space) {
  PlyCloud ply = ReadPly(path);
  if (ply.labels.size() != ply.points.size()) {
    throw ParseError(path.string() + ": no per-vertex label property");
  }
  for (std::size_t i = 0; i < ply.labels.size(); ++i) {
    const ClassId c = ply.labels[i];
    if (c != space.unknown() && !space.Contains(c)) {
      throw ParseError(path.string() + ": vertex " + std::to_string(i) +
                       " has label " + std::to_string(c) +
                       " outside space '" + space.id() + "'");
    }
  }
  LabeledPointCloud cloud;
  cloud.points = std::move(ply.points);
  cloud.labels = std::move(ply.labels);
  cloud.space_id = space.id();
  cloud.unknown = space.unknown();
  return cloud;
}

}  // namespace

EvalReport EvalPlyFiles(const fs::path& pred, std::string_view pred_space,
                        const fs::path& gt, std::string_view gt_space,
                        const MappingTable& table) {
  const LabeledPointCloud p = ReadLabeledCloud(pred, table.space(pred_space));
  const LabeledPointCloud g = ReadLabeledCloud(gt, table.space(gt_space));
  if (p.points.size() != g.points.size()) {
    throw IoError("point clouds differ in size: " +
                  std::to_string(p.points.size()) + " vs " +
                  std::to_string(g.points.size()));
  }
  return EvalPointCloud(p, g, table, gt_space);
}

EvalReport EvalLabelDirs(const fs::path& pred_dir, std::string_view pred_space,
                         const fs::path& gt_dir, std::string_view gt_space,
                         const MappingTable& table, std::span<const int> frames,
                         const RunOptions& options) {
  const LabelSpace& ps = table.space(pred_space);
  const LabelSpace& gs = table.space(gt_space);
  const std::vector<int> list = frames.empty()
                                    ? RequireFrames(pred_dir)
                                    : std::vector<int>(frames.begin(), frames.end());
  const ConfusionMatrix cm = ParallelReduce<ConfusionMatrix>(
      list.size(), options.threads, [&] { return ConfusionMatrix(gs); },
      [&](ConfusionMatrix& m, std::size_t i) {
        const LabelMap p = ReadLabelPng(FramePath(pred_dir, list[i], ".png"), ps);
        const LabelMap g = ReadLabelPng(FramePath(gt_dir, list[i], ".png"), gs);
        Accumulate(m, p, g, table);
      },
      [](ConfusionMatrix& a, const ConfusionMatrix& b) { a.Merge(b); });
  return Report(cm, table);
}

std::uint64_t PredictorSeed(std::uint64_t seed, std::size_t stream,
                            int frame) {
  return DeriveSeed(DeriveSeed(seed, stream + 1),
                    static_cast<std::uint64_t>(frame));
}

namespace {

nlohmann::ordered_json Vec(const Eigen::Vector3d& v) {
  return {v.x(), v.y(), v.z()};
}

nlohmann::ordered_json SceneJson(const SceneSpec& spec,
                                 const SynthOptions& synth,
                                 const PipelineConfig& config,
                                 const LabelSpace& space) {
  nlohmann::ordered_json j;
  j["seed"] = synth.seed;
  j["frames"] = synth.frames;
  j["held_out"] = synth.held_out;
  j["flip_rate"] = synth.flip_rate;
  j["point_density"] = spec.point_density;
  j["max_incidence_deg"] = spec.max_incidence_deg;
  j["space"] = spec.space_id;
  j["room"] = {{"min", Vec(spec.room_min)}, {"max", Vec(spec.room_max)}};
  auto& prims = j["primitives"] = nlohmann::ordered_json::array();
  for (const Primitive& p : spec.primitives) {
    nlohmann::ordered_json e;
    const ClassDef* c = space.Find(p.class_id);
    if (p.kind == Primitive::Kind::kPlane) {
      e["kind"] = "plane";
      e["axis"] = p.axis;
      e["offset"] = p.offset;
    } else {
      e["kind"] = "box";
      e["min"] = Vec(p.min);
      e["max"] = Vec(p.max);
    }
    e["class_id"] = p.class_id;
    e["class"] = c != nullptr ? c->name : "";
    prims.push_back(std::move(e));
  }
  const OrbitTrajectory& o = *spec.orbit;
  j["orbit"] = {{"center", Vec(o.center)},   {"radius", o.radius},
                {"height", o.height},        {"look_at", Vec(o.look_at)},
                {"frame_count", o.frame_count}, {"phase", o.phase}};
  const Intrinsics& k = spec.intrinsics;
  j["intrinsics"] = {{"fx", k.fx},       {"fy", k.fy},         {"cx", k.cx},
                     {"cy", k.cy},       {"width", k.width}, {"height", k.height}};
  auto& streams = j["streams"] = nlohmann::ordered_json::array();
  for (const StreamSpec& s : config.streams) {
    streams.push_back({{"name", s.name}, {"space", s.space}, {"dir", s.dir}});
  }
  return j;
}

}  // namespace

void WriteSynthDataset(const fs::path& out, const PipelineConfig& config,
                       const MappingTable& table, const SynthOptions& synth,
                       const RunOptions& options) {
  config.Validate();
  if (synth.frames < 1) throw InvalidArgument("synth needs at least one frame");
  if (synth.held_out < 0) throw InvalidArgument("held-out count is negative");
  for (const StreamSpec& s : config.streams) {
    if (fs::path(s.dir).is_absolute()) {
      throw ConfigError("stream '" + s.name +
                        "' must use a dataset-relative dir for synth");
    }
    table.space(s.space);
  }
  if (fs::exists(out) && !fs::is_empty(out) &&
      !fs::exists(out / "scene.json")) {
    throw IoError("refusing to replace " + out.string() +
                  ": not empty and not a synthetic dataset");
  }
  const LabelSpace& canonical = table.space(kCanonicalSpace);
  const LabelSpace& target = table.space(config.target_space);

  SceneSpec spec = DefaultRoomScene(canonical, synth.seed, synth.frames);
  spec.point_density = synth.point_density;
  Log(options, "rendering " + std::to_string(synth.frames) + " views");
  SceneRender scene = RenderScene(spec);
  const OrbitTrajectory& orbit = *spec.orbit;
  std::vector<RenderedView> held(static_cast<std::size_t>(synth.held_out));
  ParallelFor(held.size(), options.threads, [&](std::size_t i) {
    const double angle = orbit.AngleOf(static_cast<int>(i)) +
                         std::numbers::pi / synth.frames;
    held[i] = RenderView(spec, orbit.PoseAt(angle),
                         synth.frames + static_cast<int>(i));
  });

  auto to_target = [&](const LabelMap& m) {
    return target.id() == m.space_id()
               ? m
               : TranslateMap(m, table, target.id(),
                              ManyPolicy::kFirstCorrespondence);
  };

  StagedDirectory staged(out);
  const fs::path root = staged.path();
  WriteIntrinsics(root / "intrinsics.txt", spec.intrinsics);
  std::vector<const RenderedView*> views;
  for (const RenderedView& v : scene.views) views.push_back(&v);
  for (const RenderedView& v : held) views.push_back(&v);
  ParallelFor(views.size(), options.threads, [&](std::size_t i) {
    const RenderedView& v = *views[i];
    const int f = v.frame.index;
    WritePose(FramePath(root / "poses", f, ".txt"), v.frame.pose);
    WriteDepthPng(FramePath(root / "depth", f, ".png"), v.frame.depth);
    WriteLabelPng(FramePath(root / "gt_label", f, ".png"), to_target(v.labels));
    if (f >= synth.frames) return;
    for (std::size_t s = 0; s < config.streams.size(); ++s) {
      const StreamSpec& stream = config.streams[s];
      NoiseModel noise;
      noise.flip_rate = synth.flip_rate;
      if (stream.space != canonical.id()) noise.coarsen_to = stream.space;
      noise.seed = PredictorSeed(synth.seed, s, f);
      WriteLabelPng(FramePath(root / stream.dir, f, ".png"),
                    SimulatePredictor(v.labels, noise, table));
    }
  });

  LabeledPointCloud gt = scene.gt_cloud;
  if (target.id() != gt.space_id) {
    const Translator t = table.MakeTranslator(gt.space_id, target.id());
    for (ClassId& c : gt.labels) {
      const auto targets = t.Targets(c);
      c = targets.empty() ? target.unknown() : targets.front();
    }
    gt.space_id = target.id();
    gt.unknown = target.unknown();
  }
  WriteLabeledPly(Under(root, config.point_cloud), gt);
  WriteFileAtomic(root / "scene.json",
                  SceneJson(spec, synth, config, canonical).dump(2) + "\n");
  staged.Commit();
  Log(options, "wrote " + out.string());
}

}  // namespace labelfuse
