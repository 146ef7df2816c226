#pragma once

// Random reranked candidate lists for selection property tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "numclaim/retrieval.hpp"

namespace numclaim::testing {

// Three lists drawn from a small shared doc pool (so duplicates across
// sub-claims are common), each sorted by rerank score desc then doc_id.
inline std::vector<std::vector<ScoredEvidence>> random_candidate_lists(std::mt19937_64& rng) {
  const std::size_t pool = 1 + rng() % 15;
  std::vector<std::vector<ScoredEvidence>> lists(3);
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t n = rng() % (pool + 1);
    std::vector<std::size_t> ids(pool);
    for (std::size_t i = 0; i < pool; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      ScoredEvidence e;
      e.doc_id = "d" + std::to_string(ids[i]);
      e.bm25_score = 1.0 + static_cast<double>(rng() % 100);
      // coarse scores so ties occur
      e.rerank_score = static_cast<double>(rng() % 8) / 8.0;
      e.sub_claim_index = s;
      lists[s].push_back(e);
    }
    std::sort(lists[s].begin(), lists[s].end(), [](const auto& a, const auto& b) {
      return *a.rerank_score != *b.rerank_score ? *a.rerank_score > *b.rerank_score : a.doc_id < b.doc_id;
    });
  }
  return lists;
}

}  // namespace numclaim::testing
