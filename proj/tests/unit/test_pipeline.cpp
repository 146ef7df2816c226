#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>

#include "json.hpp"
#include "numclaim/ablation.hpp"
#include "numclaim/pipeline.hpp"
#include "test_support.hpp"

using namespace numclaim;
using namespace numclaim::testing;

namespace {

struct Toy {
  std::vector<Claim> claims;
  std::vector<EvidenceDoc> docs;
  InvertedIndex index;
  DecompositionCache cache;

  Toy()
      : claims(load_claims(fixtures_dir() / "toy" / "claims.jsonl")),
        docs(load_evidence(fixtures_dir() / "toy" / "evidence.jsonl")),
        index(build_index(std::span<const EvidenceDoc>(docs))),
        cache(fixtures_dir() / "toy" / "decompositions.jsonl") {}
};

const Toy& toy() {
  static const Toy t;
  return t;
}

const PreparedData& prepared() {
  static const PreparedData data = [] {
    LexicalOracleScorer scorer;
    return prepare_data(toy().claims, toy().cache, toy().index, 50, scorer, texts_from_docs(toy().docs));
  }();
  return data;
}

AblationOptions fast_options() {
  AblationOptions o;
  o.timing = TimingMode::Off;
  o.feature_dim = 1 << 12;
  o.train.max_epochs = 20;
  return o;
}

}  // namespace

TEST(Pipeline, PrepareSkipsTestSplit) {
  const auto& d = prepared();
  EXPECT_EQ(d.train.size(), 12u);
  EXPECT_EQ(d.validation.size(), 5u);
  for (const auto& p : d.validation) EXPECT_EQ(p.claim.split, Split::Validation);
  for (const auto& p : d.train) {
    EXPECT_TRUE(p.claim.label.has_value());
    EXPECT_EQ(p.sub_claims.source, SubClaimSource::Cache);
    for (const auto& sc : p.candidates.sub_claims) {
      EXPECT_LE(sc.candidates.size(), 50u);
      for (const auto& c : sc.candidates) EXPECT_TRUE(d.texts.contains(c.doc_id));
    }
  }
}

TEST(Pipeline, CandidatesRoundTrip) {
  for (const auto& p : prepared().train) {
    const auto line = candidates_to_json_line(p.candidates);
    const auto back = candidates_from_json(line);
    EXPECT_EQ(back.claim_id, p.candidates.claim_id);
    for (std::size_t i = 0; i < kSubClaimsPerClaim; ++i) {
      EXPECT_EQ(back.sub_claims[i].question, p.candidates.sub_claims[i].question);
      EXPECT_EQ(back.sub_claims[i].candidates, p.candidates.sub_claims[i].candidates);
    }
  }
}

TEST(Pipeline, AssembledRoundTripRetokenizes) {
  const auto& p = prepared().train.front();
  const DigitMode mode{DigitGrouping::R2L, 3};
  const auto rec = assemble_claim(p.claim, p.sub_claims, p.candidates, 3, prepared().texts, kShortContext, mode);
  EXPECT_LE(rec.evidence_ids.size(), 9u);
  EXPECT_LE(rec.input.stream.size(), 256u);
  const auto back = assembled_from_json(assembled_to_json_line(rec));
  EXPECT_EQ(back.input.text, rec.input.text);
  EXPECT_EQ(back.input.stream.tokens, rec.input.stream.tokens);
  EXPECT_EQ(back.input.truncated, rec.input.truncated);
  EXPECT_EQ(back.evidence_ids, rec.evidence_ids);
  EXPECT_EQ(back.label, rec.label);
  EXPECT_EQ(back.m, 3u);
}

TEST(Ablation, CanonicalGridAndNames) {
  const auto grid = canonical_grid();
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  std::vector<std::string> names;
  for (const auto& c : grid) names.push_back(c.name());
  EXPECT_EQ(names, (std::vector<std::string>{"Short-Context", "Long-Context", "R2L Short-Context",
                                             "R2L Long-Context"}));
  AblationCell odd{{DigitGrouping::None, 3}, {512}, 2, LossKind::Focal};
  EXPECT_EQ(odd.name(), "NoGroup m=2/512 (focal)");
}

TEST(Ablation, RunsGridInCanonicalOrderAndDedups) {
  auto grid = canonical_grid();
  std::reverse(grid.begin(), grid.end());
  grid.push_back(grid.front());
  const auto report = run_ablation(grid, prepared(), fast_options());
  ASSERT_EQ(report.cells.size(), 4u);
  const auto canon = canonical_grid();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = report.cells[i];
    EXPECT_EQ(r.cell, canon[i]);
    for (double v : {r.metrics.macro_f1, r.metrics.accuracy, r.metrics.f1(VeracityLabel::True),
                     r.metrics.f1(VeracityLabel::False), r.metrics.f1(VeracityLabel::Conflicting)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(r.max_evidences_per_claim, 3 * r.cell.m);
    EXPECT_EQ(r.runtime_minutes, 0.0);
    EXPECT_GE(r.epochs, 1u);
  }
}

TEST(Ablation, ParallelMatchesSerial) {
  auto opts = fast_options();
  const auto serial = report_to_json(run_ablation(canonical_grid(), prepared(), opts));
  opts.max_parallel_cells = 4;
  EXPECT_EQ(report_to_json(run_ablation(canonical_grid(), prepared(), opts)), serial);
}

TEST(Ablation, Errors) {
  EXPECT_THROW(run_ablation({}, prepared(), fast_options()), ConfigError);
  PreparedData no_val = prepared();
  no_val.validation.clear();
  EXPECT_THROW(run_ablation(canonical_grid(), no_val, fast_options()), DataError);
}

TEST(Ablation, NliCellsReportNoEpochs) {
  RecordingTransport t({{200, R"({"probs":{"True":0.2,"False":0.7,"Conflicting":0.1}})"}});
  NliServiceConfig cfg;
  cfg.base_url = "http://nli.local";
  NliClient client(&t, cfg);
  auto opts = fast_options();
  opts.nli = &client;
  const auto report = run_ablation({canonical_grid().front()}, prepared(), opts);
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_EQ(report.cells[0].epochs, 0u);
  EXPECT_EQ(report.cells[0].time_efficiency, 0.0);
  EXPECT_EQ(t.requests.size(), prepared().validation.size());
}

TEST(Report, JsonRoundTripAndFormats) {
  const auto report = run_ablation(canonical_grid(), prepared(), fast_options());
  const auto json = report_to_json(report);
  EXPECT_EQ(report_to_json(report_from_json(json)), json);

  const auto table = report_to_table(report);
  EXPECT_THAT(table, ::testing::HasSubstr("R2L Long-Context"));
  const auto csv = report_to_csv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_THROW(report_from_json("{}"), DataError);
}
