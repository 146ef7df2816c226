#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <atomic>

#include "json.hpp"
#include "numclaim/decompose.hpp"
#include "test_support.hpp"

using namespace numclaim;
using numclaim::testing::RecordingTransport;
using numclaim::testing::TempDir;
using ::testing::HasSubstr;

namespace {

class ScriptedLlm final : public LlmClient {
 public:
  explicit ScriptedLlm(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const DecomposePrompt&, std::string_view rendered) override {
    ++calls;
    last_prompt = std::string(rendered);
    return reply_;
  }
  std::atomic<int> calls{0};
  std::string last_prompt;

 private:
  std::string reply_;
};

Claim claim(std::string id, std::string text) { return Claim{std::move(id), std::move(text), std::nullopt, Split::Test}; }

std::string chat_reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST(DecomposePrompt, SamplingDefaults) {
  const DecomposePrompt p;
  EXPECT_DOUBLE_EQ(p.temperature, 0.3);
  EXPECT_DOUBLE_EQ(p.frequency_penalty, 0.6);
  EXPECT_DOUBLE_EQ(p.presence_penalty, 0.8);
  EXPECT_EQ(p.max_tokens, 300);
  EXPECT_THAT(p.render("X happened."), HasSubstr("X happened."));
  DecomposePrompt bad;
  bad.template_text = "no slot";
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(ParseQuestionLines, NumberedAndBulleted) {
  EXPECT_EQ(parse_question_lines("1. Did A happen?\n2) Was B true\n3: Is C real?"),
            (std::vector<std::string>{"Did A happen?", "Was B true?", "Is C real?"}));
  EXPECT_EQ(parse_question_lines("Here you go:\n- one?\n* two?\n\xE2\x80\xA2 three?"),
            (std::vector<std::string>{"one?", "two?", "three?"}));
  EXPECT_EQ(parse_question_lines("Q1. alpha\nQ2. beta"), (std::vector<std::string>{"alpha?", "beta?"}));
  EXPECT_EQ(parse_question_lines("plain one\nplain two"), (std::vector<std::string>{"plain one?", "plain two?"}));
  EXPECT_TRUE(parse_question_lines("  \n\n").empty());
}

TEST(DecomposeClaim, ThreeNumberedLinesInOrder) {
  ScriptedLlm llm("1. First?\n2. Second?\n3. Third?");
  const auto set = decompose_claim(llm, claim("c", "Some claim."), {});
  EXPECT_EQ(set.questions, (std::array<std::string, 3>{"First?", "Second?", "Third?"}));
  EXPECT_EQ(set.source, SubClaimSource::Llm);
  EXPECT_THAT(llm.last_prompt, HasSubstr("Some claim."));
}

TEST(DecomposeClaim, TwoLinesPaddedFromFallback) {
  ScriptedLlm llm("1. First?\n2. Second?");
  const auto c = claim("c", "Taxes rose 5%, spending fell 2%, debt doubled");
  const auto set = decompose_claim(llm, c, {});
  EXPECT_EQ(set.questions[0], "First?");
  EXPECT_EQ(set.questions[1], "Second?");
  EXPECT_EQ(set.questions[2], fallback_decompose(c).questions[2]);
  EXPECT_EQ(set.questions[2], "Is it true that debt doubled?");
}

TEST(DecomposeClaim, ExtraLinesTruncated) {
  ScriptedLlm llm("1. a?\n2. b?\n3. c?\n4. d?");
  EXPECT_EQ(decompose_claim(llm, claim("c", "x"), {}).questions[2], "c?");
}

TEST(DecomposeClaim, UnparseableCarriesRawText) {
  ScriptedLlm llm("   ");
  try {
    decompose_claim(llm, claim("c", "x"), {});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_THAT(e.what(), HasSubstr("could not parse"));
  }
}

TEST(FallbackDecompose, OneSentenceRepeats) {
  const auto set = fallback_decompose(claim("c", "The GDP grew 3% in 2020."));
  for (const auto& q : set.questions) EXPECT_EQ(q, "Is it true that The GDP grew 3% in 2020?");
  EXPECT_EQ(set.source, SubClaimSource::Fallback);
}

TEST(FallbackDecompose, ThreeClauses) {
  const auto set = fallback_decompose(claim("c", "X rose 5%, Y fell 2%, Z doubled"));
  EXPECT_EQ(set.questions, (std::array<std::string, 3>{"Is it true that X rose 5%?", "Is it true that Y fell 2%?",
                                                       "Is it true that Z doubled?"}));
}

TEST(FallbackDecompose, NumbersWithCommasStayWhole) {
  const auto set = fallback_decompose(claim("c", "Spending hit $1,234,567 last year."));
  EXPECT_EQ(set.questions[0], "Is it true that Spending hit $1,234,567 last year?");
}

TEST(FallbackDecompose, DeterministicAndWellFormed) {
  const auto c = claim("c", "A; B. C, D! E");
  EXPECT_EQ(fallback_decompose(c), fallback_decompose(c));
  for (const auto& q : fallback_decompose(c).questions) {
    EXPECT_FALSE(q.empty());
    EXPECT_EQ(q.back(), '?');
  }
}

TEST(DecompositionCache, RoundTripFiveSets) {
  TempDir dir;
  const auto path = dir / "cache.jsonl";
  std::vector<SubClaimSet> sets;
  {
    DecompositionCache cache(path);
    for (int i = 0; i < 5; ++i) {
      SubClaimSet s{"c" + std::to_string(i), {"a" + std::to_string(i) + "?", "b?", "c?"}, SubClaimSource::Llm};
      cache.store(s);
      sets.push_back(s);
    }
  }
  DecompositionCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 5u);
  for (const auto& s : sets) {
    const auto hit = reloaded.find(s.claim_id);
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->questions, s.questions);
    EXPECT_EQ(hit->source, SubClaimSource::Cache);
  }
}

TEST(DecompositionCache, DuplicateIdenticalAcceptedConflictRejected) {
  TempDir dir;
  const std::string line = R"({"claim_id":"c","questions":["a?","b?","c?"],"source":"llm"})";
  numclaim::testing::write_file(dir / "ok.jsonl", line + "\n" + line + "\n");
  EXPECT_EQ(DecompositionCache(dir / "ok.jsonl").size(), 1u);
  numclaim::testing::write_file(dir / "bad.jsonl",
                                line + "\n" + R"({"claim_id":"c","questions":["x?","b?","c?"],"source":"llm"})" "\n");
  EXPECT_THROW(DecompositionCache(dir / "bad.jsonl"), DataError);
  DecompositionCache mem;
  mem.store({"c", {"a?", "b?", "c?"}, SubClaimSource::Llm});
  EXPECT_NO_THROW(mem.store({"c", {"a?", "b?", "c?"}, SubClaimSource::Llm}));
  EXPECT_THROW(mem.store({"c", {"z?", "b?", "c?"}, SubClaimSource::Llm}), DataError);
  numclaim::testing::write_file(dir / "short.jsonl", R"({"claim_id":"c","questions":["a?"],"source":"llm"})" "\n");
  EXPECT_THROW(DecompositionCache(dir / "short.jsonl"), DataError);
}

TEST(DecomposeAll, CacheHitNeverCallsClient) {
  DecompositionCache cache;
  cache.store({"c1", {"a?", "b?", "c?"}, SubClaimSource::Llm});
  ScriptedLlm llm("1. x?\n2. y?\n3. z?");
  const std::vector<Claim> claims{claim("c1", "cached claim"), claim("c2", "new claim")};
  const auto out = decompose_all(claims, cache, &llm, {});
  EXPECT_EQ(llm.calls.load(), 1);
  EXPECT_EQ(out[0].source, SubClaimSource::Cache);
  EXPECT_EQ(out[1].source, SubClaimSource::Llm);
  EXPECT_TRUE(cache.find("c2"));
}

TEST(DecomposeAll, OfflineNeverTouchesTransport) {
  RecordingTransport transport({{200, chat_reply("1. a?\n2. b?\n3. c?")}});
  LlmServiceConfig cfg;
  cfg.url = "http://llm.local/v1/chat/completions";
  HttpLlmClient client(transport, cfg);
  DecompositionCache cache;
  DecomposeOptions opt;
  opt.offline = true;
  std::vector<Claim> claims;
  for (int i = 0; i < 10; ++i) claims.push_back(claim("c" + std::to_string(i), "Claim number " + std::to_string(i)));
  const auto out = decompose_all(claims, cache, &client, opt);
  EXPECT_TRUE(transport.requests.empty());
  for (const auto& s : out) EXPECT_EQ(s.source, SubClaimSource::Fallback);
}

TEST(DecomposeAll, CacheFileOrderFollowsClaims) {
  TempDir dir;
  ScriptedLlm llm("1. x?\n2. y?\n3. z?");
  std::vector<Claim> claims;
  for (int i = 0; i < 30; ++i) claims.push_back(claim("c" + std::to_string(i), "claim"));
  DecomposeOptions opt;
  opt.max_in_flight = 8;
  {
    DecompositionCache cache(dir / "a.jsonl");
    decompose_all(claims, cache, &llm, opt);
  }
  {
    DecompositionCache cache(dir / "b.jsonl");
    opt.max_in_flight = 1;
    decompose_all(claims, cache, &llm, opt);
  }
  EXPECT_EQ(numclaim::testing::read_file(dir / "a.jsonl"), numclaim::testing::read_file(dir / "b.jsonl"));
}

TEST(HttpLlmClient, WireContract) {
  RecordingTransport transport({{200, chat_reply("1. a?\n2. b?\n3. c?")}});
  LlmServiceConfig cfg;
  cfg.url = "http://llm.local/v1/chat/completions";
  cfg.api_key = "k";
  HttpLlmClient client(transport, cfg);
  const auto set = decompose_claim(client, claim("c", "A claim."), {});
  EXPECT_EQ(set.questions[1], "b?");
  ASSERT_EQ(transport.requests.size(), 1u);
  const auto body = nlohmann::json::parse(transport.requests[0].body);
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.3);
  EXPECT_DOUBLE_EQ(body["frequency_penalty"].get<double>(), 0.6);
  EXPECT_DOUBLE_EQ(body["presence_penalty"].get<double>(), 0.8);
  EXPECT_EQ(body["max_tokens"].get<int>(), 300);
  EXPECT_TRUE(body["messages"].is_array());
  EXPECT_EQ(transport.requests[0].url, cfg.url);
}

TEST(HttpLlmClient, RetriesThenFails) {
  RecordingTransport transport({{503, "busy"}});
  LlmServiceConfig cfg;
  cfg.url = "http://llm.local/";
  std::vector<std::chrono::milliseconds> sleeps;
  cfg.retry.sleep = [&](auto d) { sleeps.push_back(d); };
  HttpLlmClient client(transport, cfg);
  EXPECT_THROW(decompose_claim(client, claim("c", "x"), {}), ServiceError);
  EXPECT_EQ(transport.requests.size(), 3u);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(250), std::chrono::milliseconds(500)}));
}

TEST(HttpLlmClient, AuthFailureIsNotRetried) {
  RecordingTransport transport({{401, "no"}});
  LlmServiceConfig cfg;
  cfg.url = "http://llm.local/";
  cfg.retry.sleep = [](auto) {};
  HttpLlmClient client(transport, cfg);
  EXPECT_THROW(decompose_claim(client, claim("c", "x"), {}), ServiceError);
  EXPECT_EQ(transport.requests.size(), 1u);
}

TEST(Transport, OfflineTransportRefuses) {
  OfflineTransport t;
  EXPECT_THROW(t.post({"http://x", "{}", {}, {}}), ServiceError);
}

TEST(Transport, BackoffCapped) {
  RetryPolicy p;
  EXPECT_EQ(backoff_delay(p, 1).count(), 250);
  EXPECT_EQ(backoff_delay(p, 2).count(), 500);
  EXPECT_EQ(backoff_delay(p, 10).count(), 8000);
  EXPECT_EQ(join_url("http://a/", "/b"), "http://a/b");
  EXPECT_EQ(join_url("http://a", "b"), "http://a/b");
}
