#include "numclaim/rerank.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

std::unordered_set<std::string> unique_tokens(std::string_view text) {
  auto tokens = tokenize(text, DigitMode{DigitGrouping::None, 3}).tokens;
  return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())};
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::move(fallback);
}

}  // namespace

double LexicalOracleScorer::overlap(std::string_view query, std::string_view document) {
  const auto q = unique_tokens(query);
  if (q.empty()) return 0.0;
  const auto d = unique_tokens(document);
  std::size_t shared = 0;
  for (const auto& t : q) shared += d.count(t);
  return static_cast<double>(shared) / static_cast<double>(q.size());
}

std::vector<double> LexicalOracleScorer::score(std::string_view query,
                                               std::span<const std::string> documents) {
  std::vector<double> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(overlap(query, d));
  return out;
}

RerankerServiceConfig RerankerServiceConfig::from_env() {
  RerankerServiceConfig c;
  c.base_url = env_or("RERANKER_URL", "");
  c.token = env_or("RERANKER_TOKEN", "");
  return c;
}

HttpCrossEncoderScorer::HttpCrossEncoderScorer(HttpTransport& transport, RerankerServiceConfig config)
    : transport_(transport), config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("reranker service URL is not set (RERANKER_URL)");
}

std::string HttpCrossEncoderScorer::identity() const { return "http-cross-encoder@" + config_.base_url; }

std::vector<double> HttpCrossEncoderScorer::score(std::string_view query,
                                                  std::span<const std::string> documents) {
  json body;
  body["query"] = query;
  body["documents"] = json::array();
  for (const auto& d : documents) body["documents"].push_back(d);

  HttpRequest req;
  req.url = join_url(config_.base_url, "/rerank");
  req.body = body.dump();
  req.timeout = config_.timeout;
  if (!config_.token.empty()) req.headers.emplace_back("Authorization", "Bearer " + config_.token);

  HttpResponse res;
  try {
    res = post_with_retry(transport_, req, config_.retry, identity());
  } catch (const ServiceError& e) {
    throw RerankError(identity(), documents.size(), e.what());
  }
  try {
    const json j = json::parse(res.body);
    const auto& scores = j.at("scores");
    if (!scores.is_array() || scores.size() != documents.size())
      throw RerankError(identity(), documents.size(),
                        "response has " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(documents.size()) + " documents");
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
      if (!s.is_number()) throw RerankError(identity(), documents.size(), "non-numeric score");
      out.push_back(s.get<double>());
    }
    return out;
  } catch (const json::exception& e) {
    throw RerankError(identity(), documents.size(), std::string("malformed response: ") + e.what());
  }
}

RerankError::RerankError(std::string backend, std::size_t failed_pairs, const std::string& detail)
    : ServiceError("reranker '" + backend + "' failed on " + std::to_string(failed_pairs) +
                   " pairs: " + detail),
      backend_(std::move(backend)),
      failed_pairs_(failed_pairs) {}

std::vector<ScoredEvidence> rerank(std::vector<ScoredEvidence> candidates, std::string_view query,
                                   PairScorer& scorer, const EvidenceTexts& texts) {
  if (candidates.empty()) return candidates;
  std::vector<std::string> docs;
  docs.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto it = texts.find(c.doc_id);
    if (it == texts.end()) throw DataError("rerank: no text for doc_id '" + c.doc_id + "'");
    docs.push_back(it->second);
  }
  const auto scores = scorer.score(query, docs);
  if (scores.size() != candidates.size())
    throw RerankError(scorer.identity(), candidates.size(), "score count mismatch");
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].rerank_score = scores[i];
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const ScoredEvidence& a, const ScoredEvidence& b) {
                     if (*a.rerank_score != *b.rerank_score) return *a.rerank_score > *b.rerank_score;
                     return a.doc_id < b.doc_id;
                   });
  return candidates;
}

std::size_t EvidenceSelection::total() const noexcept {
  std::size_t n = 0;
  for (const auto& s : per_sub_claim) n += s.size();
  return n;
}

std::vector<const ScoredEvidence*> EvidenceSelection::ordered() const {
  std::vector<const ScoredEvidence*> out;
  for (const auto& s : per_sub_claim)
    for (const auto& e : s) out.push_back(&e);
  return out;
}

EvidenceSelection select_top_m(std::span<const std::vector<ScoredEvidence>> per_sub_claim,
                               std::size_t m) {
  if (m < 1 || m > 3) throw ConfigError("evidences per sub-claim must be in [1, 3], got " + std::to_string(m));
  if (per_sub_claim.size() > kSubClaimsPerClaim)
    throw DataError("selection over more than 3 sub-claims");

  struct Cand {
    double score;
    std::size_t sub;
    const ScoredEvidence* ev;
  };
  std::vector<Cand> all;
  for (std::size_t s = 0; s < per_sub_claim.size(); ++s) {
    for (const auto& e : per_sub_claim[s]) {
      if (!e.rerank_score) throw DataError("select_top_m: candidate '" + e.doc_id + "' was not reranked");
      all.push_back({*e.rerank_score, s, &e});
    }
  }
  std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.sub != b.sub) return a.sub < b.sub;
    return a.ev->doc_id < b.ev->doc_id;
  });

  EvidenceSelection sel;
  sel.m = m;
  sel.per_sub_claim.resize(per_sub_claim.size());
  std::set<std::string_view> taken;
  for (const auto& c : all) {
    auto& bucket = sel.per_sub_claim[c.sub];
    if (bucket.size() >= m || taken.count(c.ev->doc_id)) continue;
    taken.insert(c.ev->doc_id);
    ScoredEvidence e = *c.ev;
    e.sub_claim_index = c.sub;
    bucket.push_back(std::move(e));
  }
  return sel;
}

AssembledInput assemble_input(const Claim& claim, const SubClaimSet& sub_claims,
                              const EvidenceSelection& selection, const EvidenceTexts& texts,
                              const ContextBudget& budget, const DigitMode& mode) {
  AssembledInput in;
  in.claim_id = claim.claim_id;
  in.budget = budget;
  in.mode = mode;
  in.text = claim.text;
  for (const auto& q : sub_claims.questions) {
    in.text.append(" ").append(kQuestionMarker).append(" ").append(q);
  }
  for (const ScoredEvidence* e : selection.ordered()) {
    auto it = texts.find(e->doc_id);
    if (it == texts.end()) throw DataError("assemble: no text for doc_id '" + e->doc_id + "'");
    in.text.append(" ").append(kEvidenceMarker).append(" ").append(it->second);
  }
  in.stream = truncate_to_budget(tokenize(in.text, mode), budget);
  in.token_count = in.stream.size();
  in.truncated = in.stream.truncated;
  return in;
}

}  // namespace numclaim
