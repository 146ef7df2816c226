#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "json.hpp"
#include "test_support.hpp"

using namespace numclaim::testing;
using ::testing::HasSubstr;
namespace fs = std::filesystem;

namespace {

// Scratch copy of the toy corpus with a config whose outputs stay inside it.
struct Workspace {
  TempDir dir;

  Workspace() {
    for (const char* f : {"claims.jsonl", "evidence.jsonl", "decompositions.jsonl"})
      fs::copy_file(fixtures_dir() / "toy" / f, dir / f);
    write_file(dir / "config.toml",
               "[paths]\n"
               "claims = \"claims.jsonl\"\n"
               "evidence = \"evidence.jsonl\"\n"
               "cache = \"decompositions.jsonl\"\n"
               "index = \"out/index\"\n"
               "candidates = \"out/candidates.jsonl\"\n"
               "assembled = \"out/assembled.jsonl\"\n"
               "model = \"out/model.bin\"\n"
               "predictions = \"out/predictions.jsonl\"\n"
               "reports = \"out/reports\"\n"
               "[run]\noffline = true\n"
               "[ablation]\ntiming = \"off\"\n");
  }

  CommandResult run(const std::string& args) const {
    return run_cli(args + " -c '" + (dir / "config.toml").string() + "'");
  }
};

}  // namespace

TEST(Cli, HelpListsSubcommands) {
  const auto r = run_cli("--help");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* sub : {"ingest", "index", "search", "decompose", "retrieve", "assemble", "train", "predict",
                          "evaluate", "ablate", "report"})
    EXPECT_THAT(r.output, HasSubstr(sub));
}

TEST(Cli, MissingPrerequisiteNamesTheStage) {
  Workspace ws;
  const auto r = ws.run("train");
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_THAT(r.output, HasSubstr("run assemble first"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  Workspace ws;
  EXPECT_EQ(ws.run("index --set retrieval.nope=1").exit_code, 2);
  EXPECT_EQ(ws.run("retrieve --set rerank.scorer=http").exit_code, 2);
  EXPECT_EQ(run_cli("index -c /nonexistent.toml").exit_code, 2);
  EXPECT_EQ(ws.run("index --m 5").exit_code, 2);
}

TEST(Cli, StagedPipeline) {
  Workspace ws;
  for (const char* stage : {"index", "decompose", "retrieve", "assemble", "train", "predict", "evaluate"}) {
    const auto r = ws.run(stage);
    ASSERT_EQ(r.exit_code, 0) << stage << ": " << r.output;
  }
  EXPECT_TRUE(fs::exists(ws.dir / "out/index/manifest.json"));
  EXPECT_TRUE(fs::exists(ws.dir / "out/model.bin.manifest.json"));
  const auto manifest = nlohmann::json::parse(read_file(ws.dir / "out/model.bin.manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 64u);

  const auto metrics = nlohmann::json::parse(read_file(ws.dir / "out/reports/metrics.json"));
  EXPECT_GE(metrics["macro_f1"].get<double>(), 0.0);
  EXPECT_LE(metrics["macro_f1"].get<double>(), 1.0);

  const auto one = ws.run("predict --claim-id toy-15");
  ASSERT_EQ(one.exit_code, 0) << one.output;
  const auto j = nlohmann::json::parse(one.output);
  EXPECT_EQ(j["claim_id"], "toy-15");
  EXPECT_TRUE(j["probs"].contains("Conflicting"));

  const auto search = ws.run("search -q 'gdp grew'");
  EXPECT_EQ(search.exit_code, 0) << search.output;
}

TEST(Cli, AblateAndReport) {
  Workspace ws;
  const auto r = ws.run("ablate");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_THAT(r.output, HasSubstr("R2L Short-Context"));
  const auto cells = nlohmann::json::parse(read_file(ws.dir / "out/reports/ablation.json"));
  EXPECT_EQ(cells.size(), 4u);
  const auto rep = ws.run("report");
  ASSERT_EQ(rep.exit_code, 0) << rep.output;
  EXPECT_TRUE(fs::exists(ws.dir / "out/reports/ablation.csv"));
}
