#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "numclaim/corpus.hpp"
#include "numclaim/simd/kernels.hpp"

namespace numclaim {

struct Bm25Params {
  double k1 = 1.2;   // >= 0
  double b = 0.75;   // in [0, 1]

  bool operator==(const Bm25Params&) const = default;
};

void validate(const Bm25Params& params);

// Both off by default: numeric claims hinge on exact surface tokens.
struct AnalyzerOptions {
  bool remove_stopwords = false;
  bool stem = false;

  bool operator==(const AnalyzerOptions&) const = default;
};

// Index-side analysis: tokenize with whole digit runs, then the optional filters.
std::vector<std::string> analyze(std::string_view text, const AnalyzerOptions& options);

// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative for df <= N.
double bm25_idf(std::size_t doc_count, std::size_t doc_freq) noexcept;

struct PostingsView {
  std::span<const std::uint32_t> docs;  // internal doc numbers, ascending
  std::span<const std::uint32_t> tfs;

  std::size_t size() const noexcept { return docs.size(); }
};

/// Immutable BM25 index. Internal doc numbers follow doc_id byte order, so
/// the index contents do not depend on the order documents arrived in.
class InvertedIndex {
 public:
  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avg_doc_length() const noexcept { return avgdl_; }
  const Bm25Params& params() const noexcept { return params_; }
  const AnalyzerOptions& analyzer() const noexcept { return analyzer_; }

  std::span<const std::string> doc_ids() const noexcept { return doc_ids_; }
  std::span<const std::uint32_t> doc_lengths() const noexcept { return doc_lengths_; }
  std::span<const std::string> terms() const noexcept { return terms_; }
  // k1 * (1 - b + b * len / avgdl) per document.
  std::span<const double> length_norms() const noexcept { return norms_; }

  std::optional<PostingsView> postings(std::string_view term) const;
  PostingsView postings_at(std::size_t term_index) const;
  std::size_t document_frequency(std::string_view term) const;
  std::optional<std::uint32_t> doc_number(std::string_view doc_id) const;

  bool operator==(const InvertedIndex& other) const;

 private:
  friend class IndexBuilder;
  friend InvertedIndex deserialize_index(std::string_view bytes);

  void finalize();

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> terms_;               // sorted
  std::vector<std::uint64_t> posting_offsets_;   // terms_.size() + 1
  std::vector<std::uint32_t> posting_docs_;
  std::vector<std::uint32_t> posting_tfs_;
  std::unordered_map<std::string, std::uint32_t> term_lookup_;
  std::vector<double> norms_;
  double avgdl_ = 0.0;
  Bm25Params params_;
  AnalyzerOptions analyzer_;
};

/// Accumulates analyzed documents. Builders over disjoint shards can be
/// merged; the result is identical to a single builder fed every document.
class IndexBuilder {
 public:
  explicit IndexBuilder(Bm25Params params = {}, AnalyzerOptions analyzer = {});

  // Documents with no tokens are skipped (they cannot have a positive length).
  void add(const EvidenceDoc& doc);
  void merge(IndexBuilder&& other);
  // Throws DataError on an empty corpus.
  InvertedIndex build() &&;

  std::size_t docs_added() const noexcept { return docs_.size(); }
  std::size_t skipped_empty() const noexcept { return skipped_empty_; }

 private:
  struct PendingDoc {
    std::string doc_id;
    std::uint32_t length = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> term_counts;  // local term id, tf
  };

  std::uint32_t intern(std::string_view term);

  Bm25Params params_;
  AnalyzerOptions analyzer_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::string> term_names_;
  std::vector<PendingDoc> docs_;
  std::unordered_map<std::string, std::size_t> seen_ids_;
  std::size_t skipped_empty_ = 0;
};

InvertedIndex build_index(EvidenceReader& corpus, Bm25Params params = {},
                          AnalyzerOptions analyzer = {});
// Analyzes `shards` slices concurrently and merges them.
InvertedIndex build_index(std::span<const EvidenceDoc> corpus, Bm25Params params = {},
                          AnalyzerOptions analyzer = {}, std::size_t shards = 1);

struct ScoredEvidence {
  std::string doc_id;
  double bm25_score = 0.0;
  std::optional<double> rerank_score;
  std::size_t sub_claim_index = 0;  // in [0, 3)

  bool operator==(const ScoredEvidence&) const = default;
};

/// Okapi BM25 top-k, score descending, ties by doc_id ascending. Only
/// documents with a positive score are returned. Repeated query terms count
/// once per occurrence.
std::vector<ScoredEvidence> search(const InvertedIndex& index, std::string_view query,
                                   std::size_t k = 50,
                                   const simd::Kernels& kernels = simd::active());

// Full-precision score of every document for a query, indexed by doc number.
std::vector<double> score_all(const InvertedIndex& index, std::string_view query,
                              const simd::Kernels& kernels = simd::active());

// segment.bin payload; byte-identical for equal indexes.
std::string serialize_index(const InvertedIndex& index);
InvertedIndex deserialize_index(std::string_view bytes);

// <dir>/segment.bin + <dir>/stats.json
void write_index(const InvertedIndex& index, const std::filesystem::path& dir);
InvertedIndex read_index(const std::filesystem::path& dir);

}  // namespace numclaim
