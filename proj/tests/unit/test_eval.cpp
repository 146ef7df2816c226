#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/eval.hpp"
#include "numclaim/reference_runs.hpp"

using namespace numclaim;

namespace {

constexpr auto T = VeracityLabel::True;
constexpr auto F = VeracityLabel::False;
constexpr auto C = VeracityLabel::Conflicting;

}  // namespace

TEST(MacroF1, PublishedTestRow) {
  const double f1s[] = {0.80, 0.39, 0.38};
  EXPECT_NEAR(macro_average(f1s), 0.5233, 1e-4);
}

TEST(MacroF1, PublishedBenchmarkRow) {
  const double f1s[] = {0.79, 0.48, 0.41};
  EXPECT_NEAR(macro_average(f1s), 0.56, 1e-12);
}

TEST(MacroF1, EmptyThrows) { EXPECT_THROW(macro_average(std::span<const double>{}), DataError); }

TEST(F1Score, ZeroWhenBothZero) {
  EXPECT_EQ(f1_score(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(f1_score(0.5, 1.0), 2.0 / 3);
}

TEST(Confusion, CountsGoldByPredicted) {
  const std::vector<VeracityLabel> gold{T, F, F, C, C, C};
  const std::vector<VeracityLabel> pred{T, F, C, C, F, F};
  const auto cm = confusion(gold, pred);
  EXPECT_EQ(cm.counts[0][0], 1u);
  EXPECT_EQ(cm.counts[1][1], 1u);
  EXPECT_EQ(cm.counts[1][2], 1u);
  EXPECT_EQ(cm.counts[2][1], 2u);
  EXPECT_EQ(cm.total(), 6u);
  EXPECT_EQ(cm.correct(), 3u);
  EXPECT_EQ(cm.gold_count(C), 3u);
  EXPECT_EQ(cm.predicted_count(F), 3u);

  const auto r = evaluate(cm);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(r.f1(T), 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1(F), 0.4);
  EXPECT_DOUBLE_EQ(r.per_class[2].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.f1(C), 0.4);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.8 / 3);
}

TEST(Confusion, Errors) {
  const std::vector<VeracityLabel> a{T, F}, b{T};
  EXPECT_THROW(confusion(a, b), DataError);
  EXPECT_THROW(confusion({}, {}), DataError);
}

TEST(Evaluate, PerfectPredictions) {
  const std::vector<VeracityLabel> gold{T, F, C, F, F, C};
  const auto r = evaluate(gold, gold);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Evaluate, AbsentClassScoresZero) {
  const std::vector<VeracityLabel> gold{F, F, T}, pred{F, F, T};
  const auto r = evaluate(gold, pred);
  EXPECT_EQ(r.f1(C), 0.0);
  EXPECT_NEAR(r.macro_f1, 2.0 / 3, 1e-15);
}

TEST(Evaluate, InvariantUnderJointPermutation) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<VeracityLabel, VeracityLabel>> pairs;
    for (int i = 0; i < 40; ++i) pairs.push_back({label_from_index(rng() % 3), label_from_index(rng() % 3)});
    auto split = [&] {
      std::vector<VeracityLabel> g, p;
      for (auto [a, b] : pairs) g.push_back(a), p.push_back(b);
      return evaluate(g, p).macro_f1;
    };
    const double before = split();
    std::shuffle(pairs.begin(), pairs.end(), rng);
    EXPECT_EQ(split(), before);
  }
}

TEST(Evaluate, JsonHasPerClassAndConfusion) {
  const std::vector<VeracityLabel> gold{T, F, C}, pred{T, C, C};
  const auto j = nlohmann::json::parse(metrics_to_json(evaluate(gold, pred)));
  EXPECT_TRUE(j.contains("macro_f1"));
  EXPECT_TRUE(j.contains("accuracy"));
  EXPECT_TRUE(j.contains("confusion"));
}

TEST(TimeEfficiency, PublishedRows) {
  EXPECT_NEAR(time_efficiency(6.97, 5), 1.39, 0.01);
  EXPECT_NEAR(time_efficiency(15.65, 2), 7.83, 0.01);
  for (const auto& row : reference::kTiming)
    EXPECT_NEAR(time_efficiency(row.runtime_minutes, row.epochs), row.time_efficiency, 0.01) << row.run;
}

TEST(TimeEfficiency, Errors) {
  EXPECT_THROW(time_efficiency(1.0, 0), DataError);
  EXPECT_THROW(time_efficiency(-1.0, 2), DataError);
}
