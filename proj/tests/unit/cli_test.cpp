// Copyright 2026 The isnad Authors
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

#include <fstream>

#include "isnad/corpus.hpp"
#include "oracles.hpp"

namespace isnad {
namespace {

using testing::run_command;

std::string cli() { return std::string(ISNAD_CLI_PATH); }

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, ExitCodes) {
  testing::TempDir dir;
  EXPECT_EQ(run_command(cli() + " 2>/dev/null").status, 2);
  EXPECT_EQ(run_command(cli() + " frobnicate 2>/dev/null").status, 2);
  {
    std::ofstream(dir / "bad.json") << R"({"manifest": "m.json", "colour": "blue"})";
  }
  EXPECT_EQ(run_command(cli() + " --config " + q(dir / "bad.json") + " run 2>/dev/null").status, 2);
  EXPECT_EQ(run_command(cli() + " eval report --in " + q(dir / "absent.jsonl") + " 2>/dev/null").status, 3);
  {
    std::ofstream(dir / "bad.jsonl") << R"({"narration_id":"a","evaluator_id":"e","aspect_scores":{"grouping":11}})"
                                     << '\n';
  }
  EXPECT_EQ(run_command(cli() + " eval report --in " + q(dir / "bad.jsonl") + " 2>/dev/null").status, 5);
  EXPECT_EQ(run_command(cli() + " align --books " + q(dir / "b.jsonl") + " --narrations " + q(dir / "n.jsonl") +
                        " 2>/dev/null")
                .status,
            4);
}

TEST(Cli, StageByStageMatchesRun) {
  testing::TempDir dir;
  const auto manifest = testing::sample_manifest();
  const auto step = [&](const std::string& args) {
    const auto r = run_command(cli() + " --json " + args + " 2>&1");
    EXPECT_EQ(r.status, 0) << args << "\n" << r.out;
    return r.out;
  };
  step("ingest --manifest " + q(manifest) + " --out " + q(dir / "books.jsonl"));
  const auto seg = json::parse(step("segment --in " + q(dir / "books.jsonl") + " --out " + q(dir / "segs.jsonl") +
                                    " --window-units 12 --overlap-units 3"));
  EXPECT_EQ(seg["counts"]["narrations"], 160);
  step("align --books " + q(dir / "books.jsonl") + " --narrations " + q(dir / "segs.jsonl") + " --out " +
       q(dir / "aligned.jsonl"));
  step("enrich --in " + q(dir / "aligned.jsonl") + " --out " + q(dir / "bundles.jsonl") + " --manifest " +
       q(manifest) + " --layers translate,tags --languages fa,en");
  const auto grp = json::parse(step("group --in " + q(dir / "aligned.jsonl") + " --out " + q(dir / "corpus.jsonl")));
  EXPECT_EQ(grp["counts"]["groups"], 112);

  const auto ids = run_command(cli() + " eval sample --n 5 --seed 3 --in " + q(dir / "corpus.jsonl"));
  ASSERT_EQ(ids.status, 0);
  const std::string first = ids.out.substr(0, ids.out.find('\n'));
  EXPECT_EQ(first.size(), 16u);
  const auto sim = run_command(cli() + " --json similar --id " + first + " --top 3 --in " + q(dir / "corpus.jsonl") +
                               " --bundles " + q(dir / "bundles.jsonl"));
  ASSERT_EQ(sim.status, 0) << sim.out;
  EXPECT_EQ(json::parse(sim.out).size(), 3u);
  EXPECT_EQ(run_command(cli() + " eval sample --n 100000 --in " + q(dir / "corpus.jsonl") + " 2>/dev/null").status, 5);
  EXPECT_EQ(run_command(cli() + " similar --id nope --in " + q(dir / "corpus.jsonl") + " 2>/dev/null").status, 5);
}

TEST(Cli, RunHonoursEnvironmentAndReportsJson) {
  testing::TempDir dir;
  const auto cfg = testing::source_dir() / "config" / "sample.json";
  const auto r = run_command("ISNAD_WORK_DIR=" + q(dir.path()) + " " + cli() + " --json --config " + q(cfg) + " run");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto summary = json::parse(r.out);
  EXPECT_TRUE(summary["complete"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(dir / "corpus.jsonl"));
  const auto again =
      json::parse(run_command("ISNAD_WORK_DIR=" + q(dir.path()) + " " + cli() + " --json --config " + q(cfg) + " run").out);
  for (const auto& s : again["stages"]) EXPECT_EQ(s["new_work"], 0) << s.dump();
}

TEST(Cli, ReportsAndValuation) {
  const auto report = run_command(cli() + " eval report --in " + q(testing::fixture("rezwan_sample.jsonl")) +
                                  " --format csv");
  ASSERT_EQ(report.status, 0);
  EXPECT_NE(report.out.find("summary,overall_mean,8.46"), std::string::npos);
  const auto value = run_command(cli() + " value --tasks " + q(testing::source_dir() / "data" / "table5.csv"));
  ASSERT_EQ(value.status, 0);
  EXPECT_NE(value.out.find("1,538,096"), std::string::npos);
  EXPECT_EQ(run_command(cli() + " value --tasks " + q(testing::source_dir() / "data" / "table5.csv") +
                        " --epsilon 2 2>/dev/null")
                .status,
            5);
}

}  // namespace
}  // namespace isnad
