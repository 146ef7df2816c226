#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "numclaim/corpus.hpp"
#include "numclaim/decompose.hpp"
#include "numclaim/error.hpp"
#include "numclaim/retrieval.hpp"
#include "numclaim/tokenize.hpp"
#include "numclaim/transport.hpp"

namespace numclaim {

using EvidenceTexts = std::unordered_map<std::string, std::string>;

/// Relevance of (query, document) pairs. Implementations must be
/// deterministic for identical inputs and safe to call concurrently.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual std::string identity() const = 0;
  virtual std::vector<double> score(std::string_view query,
                                    std::span<const std::string> documents) = 0;
};

// |unique(query) ∩ unique(doc)| / |unique(query)|, whole-digit tokens.
class LexicalOracleScorer final : public PairScorer {
 public:
  std::string identity() const override { return "lexical-oracle"; }
  std::vector<double> score(std::string_view query, std::span<const std::string> documents) override;

  static double overlap(std::string_view query, std::string_view document);
};

struct RerankerServiceConfig {
  std::string base_url;  // POST <base_url>/rerank
  std::string token;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;

  // RERANKER_URL / RERANKER_TOKEN
  static RerankerServiceConfig from_env();
};

class HttpCrossEncoderScorer final : public PairScorer {
 public:
  HttpCrossEncoderScorer(HttpTransport& transport, RerankerServiceConfig config);
  std::string identity() const override;
  std::vector<double> score(std::string_view query, std::span<const std::string> documents) override;

 private:
  HttpTransport& transport_;
  RerankerServiceConfig config_;
};

class RerankError : public ServiceError {
 public:
  RerankError(std::string backend, std::size_t failed_pairs, const std::string& detail);
  const std::string& backend() const noexcept { return backend_; }
  std::size_t failed_pairs() const noexcept { return failed_pairs_; }

 private:
  std::string backend_;
  std::size_t failed_pairs_;
};

/// Sets rerank_score on every candidate and sorts by it, descending, ties by
/// doc_id ascending. bm25 scores are kept. Texts come from `texts`.
std::vector<ScoredEvidence> rerank(std::vector<ScoredEvidence> candidates, std::string_view query,
                                   PairScorer& scorer, const EvidenceTexts& texts);

struct EvidenceSelection {
  std::size_t m = 1;
  std::vector<std::vector<ScoredEvidence>> per_sub_claim;

  std::size_t total() const noexcept;
  // Sub-claim order, then rank order.
  std::vector<const ScoredEvidence*> ordered() const;
};

/// Up to m evidences per sub-claim, no doc_id twice. Candidates are taken
/// greedily by rerank score (ties: lower sub-claim, then doc_id), so a doc
/// shared by several sub-claims lands where it scored highest among the
/// sub-claims that still had room.
EvidenceSelection select_top_m(std::span<const std::vector<ScoredEvidence>> per_sub_claim,
                               std::size_t m);

struct AssembledInput {
  std::string claim_id;
  std::string text;    // untruncated
  TokenStream stream;  // tokenized under `mode`, cut to `budget`
  std::size_t token_count = 0;
  bool truncated = false;
  ContextBudget budget;
  DigitMode mode;
};

inline constexpr std::string_view kQuestionMarker = "[Q]";
inline constexpr std::string_view kEvidenceMarker = "[EV]";

/// "<claim> [Q] <q1> [Q] <q2> [Q] <q3> [EV] <e1> [EV] <e2> ...", evidences
/// in selection order.
AssembledInput assemble_input(const Claim& claim, const SubClaimSet& sub_claims,
                              const EvidenceSelection& selection, const EvidenceTexts& texts,
                              const ContextBudget& budget, const DigitMode& mode);

}  // namespace numclaim
