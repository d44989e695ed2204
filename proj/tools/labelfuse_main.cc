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

// labelfuse: consensus labeling of RGB-D trajectories from heterogeneous
// segmentation predictions.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "labelfuse/config.h"
#include "labelfuse/error.h"
#include "labelfuse/io.h"
#include "labelfuse/label_space.h"
#include "labelfuse/metrics.h"
#include "labelfuse/pipeline.h"
#include "labelfuse/text_util.h"

namespace fs = std::filesystem;
using namespace labelfuse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGate = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

struct Globals {
  std::string config;
  std::optional<int> threads;
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string dataset;
  std::string mapping;
};

int ExitCodeOf(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
      return kExitIo;
  }
  return kExitIo;
}

PipelineConfig LoadPipelineConfig(const Globals& g) {
  PipelineConfig c = g.config.empty() ? DefaultConfig() : LoadConfig(g.config);
  if (!g.dataset.empty()) c.dataset = g.dataset;
  if (!g.mapping.empty()) c.mapping = g.mapping;
  if (c.mapping.empty()) c.mapping = LABELFUSE_DEFAULT_MAPPING;
  return c;
}

MappingTable LoadTable(const fs::path& path) {
  if (!fs::exists(path)) {
    throw IoError("mapping table " + path.string() + " does not exist");
  }
  return MappingTable::Load(path);
}

RunOptions Options(const Globals& g, const PipelineConfig& c) {
  return {ResolveThreads(c.threads, g.threads), g.verbose};
}

std::vector<int> ParseFrameList(const std::string& text) {
  std::vector<int> frames;
  if (text.empty()) return frames;
  for (std::string_view tok : Split(text, ',')) {
    const auto v = ParseUnsigned(Trim(tok));
    if (!v || *v > INT32_MAX) {
      throw ConfigError("bad frame index '" + std::string(tok) + "'");
    }
    frames.push_back(static_cast<int>(*v));
  }
  return frames;
}

int CmdValidateMapping(const Globals& g, bool strict) {
  const PipelineConfig c = LoadPipelineConfig(g);
  const MappingTable table = LoadTable(c.mapping);
  const ValidationReport report = Validate(table);
  std::cout << report.ToString(table);
  std::cout << "ok: " << table.rows().size() << " concepts across "
            << table.spaces().size() << " spaces\n";
  const bool warnings =
      !report.uncovered.empty() || !report.missing_synkey.empty();
  return strict && warnings ? kExitGate : kExitOk;
}

struct MapArgs {
  std::string from;
  std::string to;
  std::string input;
  std::string output;
  bool fail_on_many = false;
};

int CmdMap(const Globals& g, const MapArgs& a) {
  const PipelineConfig c = LoadPipelineConfig(g);
  const MappingTable table = LoadTable(c.mapping);
  const LabelSpace& src = table.space(a.from);
  table.space(a.to);
  const ManyPolicy policy = a.fail_on_many ? ManyPolicy::kFailOnMany
                                           : ManyPolicy::kFirstCorrespondence;
  if (!fs::is_directory(a.input)) {
    WriteLabelPng(a.output,
                  TranslateMap(ReadLabelPng(a.input, src), table, a.to, policy));
    return kExitOk;
  }
  const std::vector<int> frames = ListFrames(a.input, ".png");
  StagedDirectory staged(a.output);
  for (int f : frames) {
    WriteLabelPng(FramePath(staged.path(), f, ".png"),
                  TranslateMap(ReadLabelPng(FramePath(a.input, f, ".png"), src),
                               table, a.to, policy));
  }
  staged.Commit();
  if (g.verbose) std::cerr << "mapped " << frames.size() << " frames\n";
  return kExitOk;
}

int CmdConsensus(const Globals& g) {
  const PipelineConfig c = LoadPipelineConfig(g);
  c.Validate();
  const MappingTable table = LoadTable(c.mapping);
  const auto frames = RunConsensus(c, table, Options(g, c));
  std::cout << "consensus: " << frames.size() << " frames -> "
            << (c.dataset / c.consensus_dir).string() << "\n";
  return kExitOk;
}

int CmdLift(const Globals& g, bool no_occlusion, const std::string& output) {
  const PipelineConfig c = LoadPipelineConfig(g);
  c.Validate();
  const MappingTable table = LoadTable(c.mapping);
  LiftRunOptions lift;
  lift.occlusion_check = !no_occlusion;
  lift.output = output;
  const LabeledPointCloud cloud = RunLift(c, table, Options(g, c), lift);
  std::size_t labeled = 0;
  for (ClassId l : cloud.labels) labeled += l != cloud.unknown;
  std::cout << "lift: " << labeled << "/" << cloud.labels.size()
            << " points labeled\n";
  return kExitOk;
}

int CmdRender(const Globals& g, const std::string& frames,
              const std::string& dump) {
  const PipelineConfig c = LoadPipelineConfig(g);
  c.Validate();
  const MappingTable table = LoadTable(c.mapping);
  RenderRunOptions r;
  r.frames = ParseFrameList(frames);
  if (!dump.empty()) r.voxel_dump = dump;
  const auto done = RunRender(c, table, Options(g, c), r);
  std::cout << "render: " << done.size() << " frames -> "
            << (c.dataset / c.render_dir).string() << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string pred_space;
  std::string gt_space;
  std::string frames;
  std::string format = "text";
  std::optional<double> min_miou;
  std::optional<double> min_tacc;
};

int CmdEval(const Globals& g, const EvalArgs& a) {
  const PipelineConfig c = LoadPipelineConfig(g);
  c.Validate();
  const MappingTable table = LoadTable(c.mapping);
  const std::string pred_space =
      a.pred_space.empty() ? c.target_space : a.pred_space;
  const std::string gt_space = a.gt_space.empty() ? c.target_space : a.gt_space;
  const fs::path pred = a.pred.empty() ? c.dataset / c.lift_output
                                       : fs::path(a.pred);
  const fs::path gt = a.gt.empty() ? c.dataset / c.point_cloud : fs::path(a.gt);
  EvalReport report;
  if (fs::is_directory(pred)) {
    const std::vector<int> frames = ParseFrameList(a.frames);
    report = EvalLabelDirs(pred, pred_space, gt, gt_space, table, frames,
                           Options(g, c));
  } else {
    report = EvalPlyFiles(pred, pred_space, gt, gt_space, table);
  }
  if (a.format == "csv") {
    std::cout << FormatReportCsv(report);
  } else if (a.format == "summary") {
    std::cout << FormatReportSummary(report) << "\n";
  } else {
    std::cout << FormatReportText(report);
  }
  bool pass = true;
  if (a.min_miou && report.miou < *a.min_miou) pass = false;
  if (a.min_tacc && report.tacc < *a.min_tacc) pass = false;
  if (!pass) {
    std::cerr << "quality gate failed: " << FormatReportSummary(report) << "\n";
    return kExitGate;
  }
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  int frames = 20;
  int held_out = 1;
  double flip_rate = 0;
  double density = 400;
};

int CmdSynth(const Globals& g, const SynthArgs& a) {
  const PipelineConfig c = LoadPipelineConfig(g);
  c.Validate();
  const MappingTable table = LoadTable(c.mapping);
  SynthOptions s;
  s.seed = g.seed;
  s.frames = a.frames;
  s.held_out = a.held_out;
  s.flip_rate = a.flip_rate;
  s.point_density = a.density;
  WriteSynthDataset(a.out, c, table, s, Options(g, c));
  std::cout << "synth: " << a.frames << "+" << a.held_out << " views -> "
            << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"labelfuse: multi-model consensus labels for RGB-D scans"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline config file");
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = all cores; overrides LABELFUSE_THREADS)");
  app.add_option("--seed", g.seed, "Seed for synthetic data");
  app.add_flag("--verbose", g.verbose, "Progress messages on stderr");
  app.add_option("--dataset", g.dataset, "Dataset root (overrides config)");
  app.add_option("--mapping", g.mapping, "Mapping table CSV (overrides config)");

  bool strict = false;
  auto* validate = app.add_subcommand("validate-mapping",
                                      "Load and check the mapping table");
  validate->add_flag("--strict", strict, "Treat coverage warnings as failures");

  MapArgs map_args;
  auto* map = app.add_subcommand("map", "Translate label maps between spaces");
  map->add_option("--from", map_args.from, "Source space")->required();
  map->add_option("--to", map_args.to, "Target space")->required();
  map->add_option("--input", map_args.input, "Label PNG or frame directory")
      ->required();
  map->add_option("--output", map_args.output, "Output PNG or directory")
      ->required();
  map->add_flag("--fail-on-many", map_args.fail_on_many,
                "Fail on ambiguous correspondences instead of taking the first");

  auto* consensus =
      app.add_subcommand("consensus", "Per-frame weighted vote of all streams");

  bool no_occlusion = false;
  std::string lift_output;
  auto* lift = app.add_subcommand("lift", "Majority-vote labels onto points");
  lift->add_flag("--no-occlusion-check", no_occlusion,
                 "Let every in-view projection vote");
  lift->add_option("--output", lift_output, "Labeled PLY path");

  std::string render_frames;
  std::string voxel_dump;
  auto* render = app.add_subcommand(
      "render", "Build the voxel field and render labels into frames");
  render->add_option("--frames", render_frames,
                     "Comma-separated frame indices (default: all posed)");
  render->add_option("--dump-voxels", voxel_dump, "Write the voxel grid text");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "mIoU/mAcc/tAcc against ground truth");
  eval->add_option("--pred", eval_args.pred, "Predicted PLY or label directory");
  eval->add_option("--gt", eval_args.gt, "Ground-truth PLY or label directory");
  eval->add_option("--pred-space", eval_args.pred_space);
  eval->add_option("--gt-space", eval_args.gt_space);
  eval->add_option("--frames", eval_args.frames,
                   "Comma-separated frames for directory evaluation");
  eval->add_option("--format", eval_args.format)
      ->check(CLI::IsMember({"text", "csv", "summary"}));
  eval->add_option("--min-miou", eval_args.min_miou, "Quality gate");
  eval->add_option("--min-tacc", eval_args.min_tacc, "Quality gate");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--out", synth_args.out, "Output directory")->required();
  synth->add_option("--frames", synth_args.frames, "Orbit views");
  synth->add_option("--held-out", synth_args.held_out,
                    "Extra views without predictions");
  synth->add_option("--flip-rate", synth_args.flip_rate,
                    "Per-pixel label noise of every stream");
  synth->add_option("--density", synth_args.density,
                    "GT points per square meter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (validate->parsed()) return CmdValidateMapping(g, strict);
    if (map->parsed()) return CmdMap(g, map_args);
    if (consensus->parsed()) return CmdConsensus(g);
    if (lift->parsed()) return CmdLift(g, no_occlusion, lift_output);
    if (render->parsed()) return CmdRender(g, render_frames, voxel_dump);
    if (eval->parsed()) return CmdEval(g, eval_args);
    if (synth->parsed()) return CmdSynth(g, synth_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeOf(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
