#include "numclaim/pipeline.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/parallel.hpp"

namespace numclaim {

using nlohmann::json;

TextFetcher texts_from_file(std::filesystem::path evidence_path) {
  return [path = std::move(evidence_path)](const std::vector<std::string>& ids) {
    return fetch_evidence_texts(path, ids);
  };
}

TextFetcher texts_from_docs(std::span<const EvidenceDoc> docs) {
  return [docs](const std::vector<std::string>& ids) {
    const std::set<std::string_view> wanted(ids.begin(), ids.end());
    EvidenceTexts out;
    for (const auto& d : docs)
      if (wanted.count(d.doc_id)) out.emplace(d.doc_id, d.text);
    if (out.size() != wanted.size()) throw DataError("evidence text missing for a retrieved doc_id");
    return out;
  };
}

std::vector<ClaimCandidates> retrieve_candidates(std::span<const Claim> claims,
                                                 std::span<const SubClaimSet> sub_claims,
                                                 const InvertedIndex& index, std::size_t k,
                                                 PairScorer& scorer, const TextFetcher& fetch,
                                                 std::size_t max_in_flight) {
  if (claims.size() != sub_claims.size())
    throw DataError("retrieve: decompositions do not line up with claims");
  std::vector<ClaimCandidates> out(claims.size());
  std::set<std::string> needed;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (sub_claims[i].claim_id != claims[i].claim_id)
      throw DataError("retrieve: decomposition for '" + sub_claims[i].claim_id + "' paired with claim '" +
                      claims[i].claim_id + "'");
    out[i].claim_id = claims[i].claim_id;
    for (std::size_t s = 0; s < kSubClaimsPerClaim; ++s) {
      auto& sc = out[i].sub_claims[s];
      sc.question = sub_claims[i].questions[s];
      sc.candidates = search(index, sc.question, k);
      for (auto& c : sc.candidates) {
        c.sub_claim_index = s;
        needed.insert(c.doc_id);
      }
    }
  }
  const EvidenceTexts texts = fetch(std::vector<std::string>(needed.begin(), needed.end()));

  bounded_parallel_for(out.size() * kSubClaimsPerClaim, max_in_flight, [&](std::size_t job) {
    auto& sc = out[job / kSubClaimsPerClaim].sub_claims[job % kSubClaimsPerClaim];
    sc.candidates = rerank(std::move(sc.candidates), sc.question, scorer, texts);
  });
  return out;
}

std::string candidates_to_json_line(const ClaimCandidates& c) {
  json j;
  j["claim_id"] = c.claim_id;
  j["sub_claims"] = json::array();
  for (const auto& sc : c.sub_claims) {
    json s;
    s["question"] = sc.question;
    s["candidates"] = json::array();
    for (const auto& e : sc.candidates) {
      json je{{"doc_id", e.doc_id}, {"bm25", e.bm25_score}};
      je["rerank"] = e.rerank_score ? json(*e.rerank_score) : json(nullptr);
      s["candidates"].push_back(std::move(je));
    }
    j["sub_claims"].push_back(std::move(s));
  }
  return j.dump();
}

ClaimCandidates candidates_from_json(std::string_view line) {
  const json j = json::parse(line);
  ClaimCandidates c;
  c.claim_id = j.at("claim_id").get<std::string>();
  const auto& subs = j.at("sub_claims");
  if (subs.size() != kSubClaimsPerClaim) throw DataError("candidates for '" + c.claim_id + "' need 3 sub-claims");
  for (std::size_t s = 0; s < kSubClaimsPerClaim; ++s) {
    c.sub_claims[s].question = subs[s].at("question").get<std::string>();
    for (const auto& je : subs[s].at("candidates")) {
      ScoredEvidence e;
      e.doc_id = je.at("doc_id").get<std::string>();
      e.bm25_score = je.at("bm25").get<double>();
      if (!je.at("rerank").is_null()) e.rerank_score = je.at("rerank").get<double>();
      e.sub_claim_index = s;
      c.sub_claims[s].candidates.push_back(std::move(e));
    }
  }
  return c;
}

namespace {

template <typename Parse>
auto load_jsonl(const std::filesystem::path& path, const std::string& producer, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError("missing " + path.string() + " (run " + producer + " first)");
  std::vector<decltype(parse(std::string_view{}))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<ClaimCandidates> load_candidates(const std::filesystem::path& path) {
  return load_jsonl(path, "retrieve", candidates_from_json);
}

std::vector<SubClaimSet> load_sub_claims_for(std::span<const Claim> claims, const DecompositionCache& cache) {
  std::vector<SubClaimSet> out;
  out.reserve(claims.size());
  for (const auto& c : claims) {
    auto hit = cache.find(c.claim_id);
    if (!hit) throw DataError("no decomposition for claim '" + c.claim_id + "' (run decompose first)");
    out.push_back(std::move(*hit));
  }
  return out;
}

EvidenceSelection select_for_claim(const ClaimCandidates& candidates, std::size_t m) {
  std::array<std::vector<ScoredEvidence>, kSubClaimsPerClaim> lists;
  for (std::size_t s = 0; s < kSubClaimsPerClaim; ++s) lists[s] = candidates.sub_claims[s].candidates;
  return select_top_m(lists, m);
}

AssembledRecord assemble_claim(const Claim& claim, const SubClaimSet& sub_claims,
                               const ClaimCandidates& candidates, std::size_t m,
                               const EvidenceTexts& texts, const ContextBudget& budget,
                               const DigitMode& mode) {
  if (candidates.claim_id != claim.claim_id || sub_claims.claim_id != claim.claim_id)
    throw DataError("assemble: inputs for claim '" + claim.claim_id + "' do not match");
  const auto selection = select_for_claim(candidates, m);
  AssembledRecord r;
  r.input = assemble_input(claim, sub_claims, selection, texts, budget, mode);
  r.label = claim.label;
  r.split = claim.split;
  r.m = m;
  for (const auto* e : selection.ordered()) r.evidence_ids.push_back(e->doc_id);
  return r;
}

std::string assembled_to_json_line(const AssembledRecord& r) {
  json j;
  j["claim_id"] = r.input.claim_id;
  j["split"] = std::string(to_string(r.split));
  if (r.label) j["label"] = std::string(to_string(*r.label));
  j["text"] = r.input.text;
  j["token_count"] = r.input.token_count;
  j["truncated"] = r.input.truncated;
  j["budget"] = r.input.budget.max_tokens;
  j["digit_mode"] = std::string(to_string(r.input.mode.grouping));
  j["group_size"] = r.input.mode.group_size;
  j["m"] = r.m;
  j["evidence"] = r.evidence_ids;
  return j.dump();
}

AssembledRecord assembled_from_json(std::string_view line) {
  const json j = json::parse(line);
  AssembledRecord r;
  r.input.claim_id = j.at("claim_id").get<std::string>();
  const auto split = parse_split(j.at("split").get<std::string>());
  if (!split) throw DataError("assembled record has an unknown split");
  r.split = *split;
  if (j.contains("label")) {
    const auto label = parse_label(j.at("label").get<std::string>());
    if (!label) throw DataError("assembled record has an unknown label");
    r.label = *label;
  }
  r.input.text = j.at("text").get<std::string>();
  r.input.budget = ContextBudget{j.at("budget").get<std::size_t>()};
  const auto grouping = parse_digit_grouping(j.at("digit_mode").get<std::string>());
  if (!grouping) throw DataError("assembled record has an unknown digit mode");
  r.input.mode = DigitMode{*grouping, j.at("group_size").get<std::size_t>()};
  r.m = j.at("m").get<std::size_t>();
  r.evidence_ids = j.at("evidence").get<std::vector<std::string>>();
  r.input.stream = truncate_to_budget(tokenize(r.input.text, r.input.mode), r.input.budget);
  r.input.token_count = r.input.stream.size();
  r.input.truncated = r.input.stream.truncated;
  if (r.input.token_count != j.at("token_count").get<std::size_t>())
    throw DataError("assembled record for '" + r.input.claim_id + "' does not re-tokenize to its token_count");
  return r;
}

std::vector<AssembledRecord> load_assembled(const std::filesystem::path& path) {
  return load_jsonl(path, "assemble", assembled_from_json);
}

}  // namespace numclaim
