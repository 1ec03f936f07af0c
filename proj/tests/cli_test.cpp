// Copyright 2026 The Semianchor Authors. All Rights Reserved.
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "semianchor/cli.hpp"
#include "semianchor/text_io.hpp"

namespace semianchor {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "semianchor");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semianchor_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  const CliRun r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
  EXPECT_EQ(run({"eval", "--detections", "x"}).code, 2);
  EXPECT_EQ(run({"prop1", "--K", "3"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, Prop1) {
  const CliRun ok = run({"prop1", "--K", "3", "--C", "2"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("K=3 C=2 gamma=0.25"), std::string::npos);
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const CliRun bad = run({"prop1", "--K", "3", "--C", "2", "--gamma", "0.5"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("counterexample"), std::string::npos);
}

TEST(Cli, CheckGrad) {
  const CliRun r = run({"check-grad", "--points", "10"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Cli, StatsOnSyntheticScenes) {
  const CliRun r = run({"stats", "--synthetic", "5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("images 5"), std::string::npos);
}

TEST(Cli, BadConfigValueExitsOne) {
  const fs::path dir = scratch("badcfg");
  write_file_atomic((dir / "run.cfg").string(), "steps = -4\n");
  const CliRun r = run({"train-toy", "--config", (dir / "run.cfg").string(), "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("steps"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, TrainInferEvalPipeline) {
  const fs::path dir = scratch("pipeline");
  const CliRun t = run({"train-toy", "--steps", "60", "--set", "num_train_images=8", "--set",
                        "num_test_images=4", "--K", "9", "--out-dir", dir.string(), "--dump-heads"});
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"config.txt", "loss.log", "checkpoint.txt", "eval.txt", "detections.txt",
                        "test_annotations.json", "heads.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string dets = (dir / "detections.txt").string();
  const std::string anns = (dir / "test_annotations.json").string();
  const CliRun e = run({"eval", "--detections", dets, "--annotations", anns, "--out", (dir / "eval2.txt").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(read_file((dir / "eval2.txt").string()), read_file((dir / "eval.txt").string()));

  const CliRun i = run({"infer", "--heads", (dir / "heads.txt").string(), "--annotations", anns, "--out",
                        (dir / "infer.txt").string()});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_EQ(read_file((dir / "infer.txt").string()), read_file(dets));

  const CliRun a = run({"assign", "--annotations", anns, "--config", (dir / "config.txt").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("L ", 0), 0u);
  EXPECT_NE(a.out.find("\nA "), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, BinaryRuns) {
  const std::string cmd = std::string(SEMIANCHOR_CLI_PATH) + " prop1 --K 2 --C 2 > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}

}  // namespace
}  // namespace semianchor
