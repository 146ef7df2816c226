#include "numclaim/retrieval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numeric>

#include "numclaim/error.hpp"
#include "numclaim/tokenize.hpp"

namespace numclaim {

namespace {

constexpr std::string_view kStopwords[] = {
    "a",    "an",   "and",  "are",  "as",    "at",   "be",   "been", "but",   "by",
    "for",  "from", "had",  "has",  "have",  "he",   "her",  "his",  "i",     "if",
    "in",   "into", "is",   "it",   "its",   "not",  "of",   "on",   "or",    "our",
    "she",  "so",   "than", "that", "the",   "their", "them", "then", "there", "they",
    "this", "to",   "was",  "we",   "were",  "which", "will", "with"};

bool is_stopword(std::string_view t) {
  return std::binary_search(std::begin(kStopwords), std::end(kStopwords), t);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Harman's S-stemmer, applied to purely alphabetic tokens.
void s_stem(std::string& t) {
  if (t.size() <= 3 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
    return;
  if (ends_with(t, "ies") && !ends_with(t, "eies") && !ends_with(t, "aies")) {
    t.replace(t.size() - 3, 3, "y");
  } else if (ends_with(t, "es") && !ends_with(t, "aes") && !ends_with(t, "ees") &&
             !ends_with(t, "oes")) {
    t.pop_back();
  } else if (ends_with(t, "s") && !ends_with(t, "us") && !ends_with(t, "ss")) {
    t.pop_back();
  }
}

}  // namespace

void validate(const Bm25Params& params) {
  if (!(params.k1 >= 0.0) || !std::isfinite(params.k1)) throw ConfigError("bm25 k1 must be >= 0");
  if (!(params.b >= 0.0 && params.b <= 1.0)) throw ConfigError("bm25 b must be in [0, 1]");
}

std::vector<std::string> analyze(std::string_view text, const AnalyzerOptions& options) {
  auto tokens = tokenize(text, DigitMode{DigitGrouping::None, 3}).tokens;
  if (options.remove_stopwords) std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
  if (options.stem)
    for (auto& t : tokens) s_stem(t);
  return tokens;
}

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) noexcept {
  const double n = static_cast<double>(doc_count);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

// ---------------------------------------------------------------------------

std::optional<PostingsView> InvertedIndex::postings(std::string_view term) const {
  auto it = term_lookup_.find(std::string(term));
  if (it == term_lookup_.end()) return std::nullopt;
  return postings_at(it->second);
}

PostingsView InvertedIndex::postings_at(std::size_t term_index) const {
  const auto begin = posting_offsets_[term_index];
  const auto len = posting_offsets_[term_index + 1] - begin;
  return {std::span(posting_docs_).subspan(begin, len), std::span(posting_tfs_).subspan(begin, len)};
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
  auto p = postings(term);
  return p ? p->size() : 0;
}

std::optional<std::uint32_t> InvertedIndex::doc_number(std::string_view doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == doc_ids_.end() || *it != doc_id) return std::nullopt;
  return static_cast<std::uint32_t>(it - doc_ids_.begin());
}

bool InvertedIndex::operator==(const InvertedIndex& o) const {
  return doc_ids_ == o.doc_ids_ && doc_lengths_ == o.doc_lengths_ && terms_ == o.terms_ &&
         posting_offsets_ == o.posting_offsets_ && posting_docs_ == o.posting_docs_ &&
         posting_tfs_ == o.posting_tfs_ && avgdl_ == o.avgdl_ && params_ == o.params_ &&
         analyzer_ == o.analyzer_;
}

void InvertedIndex::finalize() {
  term_lookup_.clear();
  term_lookup_.reserve(terms_.size());
  for (std::uint32_t i = 0; i < terms_.size(); ++i) term_lookup_.emplace(terms_[i], i);
  const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
  avgdl_ = doc_lengths_.empty() ? 0.0 : total / static_cast<double>(doc_lengths_.size());
  norms_.resize(doc_lengths_.size());
  for (std::size_t d = 0; d < doc_lengths_.size(); ++d) {
    norms_[d] = params_.k1 *
                (1.0 - params_.b + params_.b * static_cast<double>(doc_lengths_[d]) / avgdl_);
  }
}

// ---------------------------------------------------------------------------

IndexBuilder::IndexBuilder(Bm25Params params, AnalyzerOptions analyzer)
    : params_(params), analyzer_(analyzer) {
  validate(params_);
}

std::uint32_t IndexBuilder::intern(std::string_view term) {
  auto [it, inserted] = term_ids_.try_emplace(std::string(term), static_cast<std::uint32_t>(term_names_.size()));
  if (inserted) term_names_.emplace_back(term);
  return it->second;
}

void IndexBuilder::add(const EvidenceDoc& doc) {
  const auto tokens = analyze(doc.text, analyzer_);
  if (tokens.empty()) {
    ++skipped_empty_;
    spdlog::debug("index: skipping doc '{}' with no tokens", doc.doc_id);
    return;
  }
  if (auto [it, inserted] = seen_ids_.emplace(doc.doc_id, docs_.size()); !inserted)
    throw DataError("duplicate doc_id '" + doc.doc_id + "' in corpus");

  PendingDoc pending;
  pending.doc_id = doc.doc_id;
  pending.length = static_cast<std::uint32_t>(tokens.size());
  std::unordered_map<std::uint32_t, std::uint32_t> counts;
  for (const auto& t : tokens) ++counts[intern(t)];
  pending.term_counts.assign(counts.begin(), counts.end());
  docs_.push_back(std::move(pending));
}

void IndexBuilder::merge(IndexBuilder&& other) {
  if (other.params_ != params_ || other.analyzer_ != analyzer_)
    throw std::invalid_argument("cannot merge index builders with different settings");
  std::vector<std::uint32_t> remap(other.term_names_.size());
  for (std::size_t i = 0; i < other.term_names_.size(); ++i) remap[i] = intern(other.term_names_[i]);
  for (auto& d : other.docs_) {
    if (auto [it, inserted] = seen_ids_.emplace(d.doc_id, docs_.size()); !inserted)
      throw DataError("duplicate doc_id '" + d.doc_id + "' in corpus");
    for (auto& [term, tf] : d.term_counts) term = remap[term];
    docs_.push_back(std::move(d));
  }
  skipped_empty_ += other.skipped_empty_;
  other = IndexBuilder(params_, analyzer_);
}

InvertedIndex IndexBuilder::build() && {
  if (docs_.empty()) throw DataError("cannot build an index over an empty corpus");
  if (skipped_empty_ > 0) spdlog::warn("index: skipped {} documents with no tokens", skipped_empty_);

  std::sort(docs_.begin(), docs_.end(),
            [](const PendingDoc& a, const PendingDoc& b) { return a.doc_id < b.doc_id; });

  // Sorted term order -> final term ids.
  std::vector<std::uint32_t> order(term_names_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return term_names_[a] < term_names_[b]; });
  std::vector<std::uint32_t> final_id(term_names_.size());
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) final_id[order[rank]] = rank;

  InvertedIndex index;
  index.params_ = params_;
  index.analyzer_ = analyzer_;
  index.terms_.reserve(order.size());
  for (auto id : order) index.terms_.push_back(std::move(term_names_[id]));

  std::vector<std::uint64_t> df(order.size(), 0);
  for (const auto& d : docs_)
    for (const auto& [term, tf] : d.term_counts) ++df[final_id[term]];
  index.posting_offsets_.resize(order.size() + 1, 0);
  for (std::size_t t = 0; t < order.size(); ++t)
    index.posting_offsets_[t + 1] = index.posting_offsets_[t] + df[t];
  const auto total_postings = index.posting_offsets_.back();
  index.posting_docs_.resize(total_postings);
  index.posting_tfs_.resize(total_postings);

  std::vector<std::uint64_t> cursor(index.posting_offsets_.begin(), index.posting_offsets_.end() - 1);
  index.doc_ids_.reserve(docs_.size());
  index.doc_lengths_.reserve(docs_.size());
  for (std::uint32_t d = 0; d < docs_.size(); ++d) {
    index.doc_ids_.push_back(std::move(docs_[d].doc_id));
    index.doc_lengths_.push_back(docs_[d].length);
    for (const auto& [term, tf] : docs_[d].term_counts) {
      const auto pos = cursor[final_id[term]]++;
      index.posting_docs_[pos] = d;
      index.posting_tfs_[pos] = tf;
    }
  }
  index.finalize();
  return index;
}

InvertedIndex build_index(EvidenceReader& corpus, Bm25Params params, AnalyzerOptions analyzer) {
  IndexBuilder builder(params, analyzer);
  while (auto doc = corpus.next()) builder.add(*doc);
  return std::move(builder).build();
}

InvertedIndex build_index(std::span<const EvidenceDoc> corpus, Bm25Params params,
                          AnalyzerOptions analyzer, std::size_t shards) {
  shards = std::clamp<std::size_t>(shards, 1, std::max<std::size_t>(1, corpus.size()));
  if (shards == 1) {
    IndexBuilder builder(params, analyzer);
    for (const auto& d : corpus) builder.add(d);
    return std::move(builder).build();
  }
  const std::size_t per = (corpus.size() + shards - 1) / shards;
  std::vector<std::future<IndexBuilder>> parts;
  for (std::size_t s = 0; s < shards; ++s) {
    const auto slice = corpus.subspan(std::min(s * per, corpus.size()),
                                      std::min(per, corpus.size() - std::min(s * per, corpus.size())));
    parts.push_back(std::async(std::launch::async, [slice, params, analyzer] {
      IndexBuilder b(params, analyzer);
      for (const auto& d : slice) b.add(d);
      return b;
    }));
  }
  IndexBuilder merged(params, analyzer);
  for (auto& p : parts) merged.merge(p.get());
  return std::move(merged).build();
}

// ---------------------------------------------------------------------------

std::vector<double> score_all(const InvertedIndex& index, std::string_view query,
                              const simd::Kernels& kernels) {
  if (index.doc_count() == 0) throw DataError("search on an empty index");
  std::vector<double> scores(index.doc_count(), 0.0);

  // unique terms in first-occurrence order, with their multiplicity
  std::vector<std::pair<std::string, std::uint32_t>> terms;
  for (auto& t : analyze(query, index.analyzer())) {
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& p) { return p.first == t; });
    if (it == terms.end())
      terms.emplace_back(std::move(t), 1);
    else
      ++it->second;
  }

  const auto& p = index.params();
  for (const auto& [term, qtf] : terms) {
    const auto postings = index.postings(term);
    if (!postings) continue;
    const double weight =
        static_cast<double>(qtf) * bm25_idf(index.doc_count(), postings->size()) * (p.k1 + 1.0);
    kernels.bm25_accumulate(postings->docs.data(), postings->tfs.data(), postings->size(),
                            index.length_norms().data(), weight, scores.data());
  }
  return scores;
}

std::vector<ScoredEvidence> search(const InvertedIndex& index, std::string_view query,
                                   std::size_t k, const simd::Kernels& kernels) {
  if (k == 0) throw ConfigError("search: k must be >= 1");
  const auto scores = score_all(index, query, kernels);

  std::vector<std::uint32_t> hits;
  for (std::uint32_t d = 0; d < scores.size(); ++d)
    if (scores[d] > 0.0) hits.push_back(d);
  const auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // doc numbers follow doc_id order
  };
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);

  std::vector<ScoredEvidence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ScoredEvidence e;
    e.doc_id = index.doc_ids()[hits[i]];
    e.bm25_score = scores[hits[i]];
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace numclaim
