#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numclaim/corpus.hpp"
#include "numclaim/decompose.hpp"
#include "numclaim/rerank.hpp"
#include "numclaim/retrieval.hpp"

namespace numclaim {

struct SubClaimCandidates {
  std::string question;
  std::vector<ScoredEvidence> candidates;  // reranked, best first
};

struct ClaimCandidates {
  std::string claim_id;
  std::array<SubClaimCandidates, kSubClaimsPerClaim> sub_claims;
};

using TextFetcher = std::function<EvidenceTexts(const std::vector<std::string>& doc_ids)>;

TextFetcher texts_from_file(std::filesystem::path evidence_path);
TextFetcher texts_from_docs(std::span<const EvidenceDoc> docs);

/// BM25 top-k per sub-question, then rerank each list against its own
/// sub-question. Sub-claims are reranked concurrently (bounded); the output
/// order follows `claims`.
std::vector<ClaimCandidates> retrieve_candidates(std::span<const Claim> claims,
                                                 std::span<const SubClaimSet> sub_claims,
                                                 const InvertedIndex& index, std::size_t k,
                                                 PairScorer& scorer, const TextFetcher& fetch,
                                                 std::size_t max_in_flight = 4);

std::string candidates_to_json_line(const ClaimCandidates& c);
ClaimCandidates candidates_from_json(std::string_view line);

std::vector<ClaimCandidates> load_candidates(const std::filesystem::path& path);
std::vector<SubClaimSet> load_sub_claims_for(std::span<const Claim> claims,
                                             const DecompositionCache& cache);

EvidenceSelection select_for_claim(const ClaimCandidates& candidates, std::size_t m);

struct AssembledRecord {
  AssembledInput input;
  std::optional<VeracityLabel> label;
  Split split = Split::Train;
  std::size_t m = 1;
  std::vector<std::string> evidence_ids;
};

AssembledRecord assemble_claim(const Claim& claim, const SubClaimSet& sub_claims,
                               const ClaimCandidates& candidates, std::size_t m,
                               const EvidenceTexts& texts, const ContextBudget& budget,
                               const DigitMode& mode);

std::string assembled_to_json_line(const AssembledRecord& record);
// Re-tokenizes the stored text under the stored mode and budget.
AssembledRecord assembled_from_json(std::string_view line);
std::vector<AssembledRecord> load_assembled(const std::filesystem::path& path);

}  // namespace numclaim
