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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "labelfuse/io.h"
#include "test_util.h"

namespace labelfuse {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(LABELFUSE_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), n);
  }
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Config() {
  return "--config " + (fs::path(LABELFUSE_CONFIG_DIR) / "automatic.cfg").string();
}

std::string Mapping() {
  return (fs::path(LABELFUSE_DATA_DIR) / "mapping.csv").string();
}

TEST(CliTest, ValidateShippedMapping) {
  const RunResult r = RunCli("validate-mapping --mapping " + Mapping());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ok: 187 concepts"), std::string::npos) << r.out;
}

TEST(CliTest, ValidateDuplicateIdAndStrict) {
  TempDir dir;
  fs::create_directories(dir / "spaces");
  std::ofstream(dir / "spaces" / "wordnet.tsv") << "1\ta.n.01\n2\tb.n.01\n";
  std::ofstream(dir / "spaces" / "nyu40.tsv") << "1\twall\n2\tfloor\n";
  std::ofstream(dir / "dup.csv")
      << "canonical_id,synkey,wordnet,nyu40\n1,a.n.01,1,1\n1,b.n.01,2,2\n";
  EXPECT_EQ(RunCli("validate-mapping --mapping " + (dir / "dup.csv").string()).code, 2);

  std::ofstream(dir / "gap.csv")
      << "canonical_id,synkey,wordnet,nyu40\n1,a.n.01,1,1\n";
  const std::string gap = (dir / "gap.csv").string();
  EXPECT_EQ(RunCli("validate-mapping --mapping " + gap).code, 0);
  EXPECT_EQ(RunCli("validate-mapping --strict --mapping " + gap).code, 1);
  EXPECT_EQ(RunCli("validate-mapping --mapping " + (dir / "none.csv").string()).code,
            2);
}

TEST(CliTest, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(RunCli("frobnicate").code, 3);
  EXPECT_EQ(RunCli("synth").code, 3);
  EXPECT_EQ(RunCli("--config /nonexistent.cfg consensus").code, 3);
}

class CliPipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    ds_ = new std::string((dir_->path() / "ds").string());
    synth_ = RunCli(Config() + " --seed 7 synth --out " + *ds_ +
                 " --frames 8 --density 150");
  }
  static void TearDownTestSuite() {
    delete ds_;
    delete dir_;
  }
  std::string Args() const { return Config() + " --dataset " + *ds_; }

  static TempDir* dir_;
  static std::string* ds_;
  static RunResult synth_;
};

TempDir* CliPipelineTest::dir_ = nullptr;
std::string* CliPipelineTest::ds_ = nullptr;
RunResult CliPipelineTest::synth_;

TEST_F(CliPipelineTest, EndToEnd) {
  ASSERT_EQ(synth_.code, 0) << synth_.out;
  ASSERT_EQ(RunCli(Args() + " consensus").code, 0);
  const std::string ds = *ds_;
  RunResult r = RunCli(Args() + " eval --pred " + ds + "/consensus --gt " + ds +
                    "/gt_label --frames 0,1,2,3,4,5,6,7 --format summary");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "miou=1.000000 macc=1.000000 tacc=1.000000\n");

  ASSERT_EQ(RunCli(Args() + " lift").code, 0);
  r = RunCli(Args() + " eval --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("class_id,name,iou,acc,tp,fp,fn\n", 0), 0u) << r.out;
  r = RunCli(Args() + " eval --format text");
  EXPECT_EQ(r.out.rfind("mIoU", 0), 0u);
  EXPECT_EQ(RunCli(Args() + " eval --min-tacc 0.99").code, 0);
  EXPECT_EQ(RunCli(Args() + " eval --min-miou 1.01").code, 1);

  ASSERT_EQ(RunCli(Args() + " render --frames 8").code, 0);
  r = RunCli(Args() + " eval --pred " + ds + "/render --gt " + ds +
          "/gt_label --frames 8 --min-tacc 0.95 --format summary");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(CliPipelineTest, ThresholdAboveTotalWeightExitsThree) {
  ASSERT_EQ(synth_.code, 0);
  TempDir dir;
  std::ifstream in(fs::path(LABELFUSE_CONFIG_DIR) / "automatic.cfg");
  std::stringstream text;
  text << in.rdbuf();
  std::string cfg = text.str();
  cfg.replace(cfg.find("min_votes = 4"), 13, "min_votes = 9");
  cfg.replace(cfg.find("../data/mapping.csv"), 19, Mapping());
  std::ofstream(dir / "c.cfg") << cfg;
  EXPECT_EQ(RunCli("--config " + (dir / "c.cfg").string() + " --dataset " + *ds_ +
                " consensus")
                .code,
            3);
}

TEST_F(CliPipelineTest, MissingInputsExitTwo) {
  TempDir empty;
  EXPECT_EQ(RunCli(Config() + " --dataset " + empty.path().string() + " consensus").code,
            2);
  EXPECT_EQ(RunCli(Args() + " eval --pred /nonexistent.ply").code, 2);
}

TEST_F(CliPipelineTest, MapTranslatesFiles) {
  ASSERT_EQ(synth_.code, 0);
  TempDir out;
  const std::string in = (fs::path(*ds_) / "pred_cmx" / "000000.png").string();
  const std::string to = (out / "ade.png").string();
  EXPECT_EQ(RunCli("--mapping " + Mapping() + " map --from nyu40 --to ade20k --input " +
                in + " --output " + to)
                .code,
            0);
  EXPECT_TRUE(fs::exists(to));
  EXPECT_EQ(RunCli("--mapping " + Mapping() + " map --from nyu40 --to coco --input " +
                in + " --output " + to)
                .code,
            2);
}

}  // namespace
}  // namespace labelfuse
