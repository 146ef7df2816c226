#include "numclaim/decompose.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/parallel.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_trailing_punct(std::string_view s) {
  s = trim(s);
  while (!s.empty() && std::string_view(".,;:!?").find(s.back()) != std::string_view::npos) {
    s.remove_suffix(1);
    s = trim(s);
  }
  return s;
}

std::string as_question(std::string_view span) {
  return "Is it true that " + std::string(strip_trailing_punct(span)) + "?";
}

std::string ensure_question_mark(std::string_view q) {
  std::string out(trim(q));
  if (out.empty() || out.back() != '?') out.push_back('?');
  return out;
}

// Sentence ends and ", " split clauses; "1,000" and "2.5" stay intact.
std::vector<std::string> clause_spans(std::string_view text) {
  std::vector<std::string> spans;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool at_end_or_space =
        i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if ((c == '.' || c == '!' || c == '?' || c == ';' || c == ',') && at_end_or_space) {
      auto span = strip_trailing_punct(text.substr(start, i + 1 - start));
      if (!span.empty()) spans.emplace_back(span);
      start = i + 1;
    }
  }
  if (auto tail = strip_trailing_punct(text.substr(std::min(start, text.size()))); !tail.empty())
    spans.emplace_back(tail);
  if (spans.size() > kSubClaimsPerClaim) {
    for (std::size_t i = kSubClaimsPerClaim; i < spans.size(); ++i) spans[2] += ", " + spans[i];
    spans.resize(kSubClaimsPerClaim);
  }
  return spans;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::move(fallback);
}

}  // namespace

std::string_view to_string(SubClaimSource source) {
  switch (source) {
    case SubClaimSource::Llm: return "llm";
    case SubClaimSource::Cache: return "cache";
    case SubClaimSource::Fallback: return "fallback";
  }
  return "?";
}

std::optional<SubClaimSource> parse_sub_claim_source(std::string_view text) {
  if (text == "llm") return SubClaimSource::Llm;
  if (text == "cache") return SubClaimSource::Cache;
  if (text == "fallback") return SubClaimSource::Fallback;
  return std::nullopt;
}

std::string DecomposePrompt::render(std::string_view claim_text) const {
  std::string out = template_text;
  static constexpr std::string_view slot = "{claim}";
  for (auto pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos + claim_text.size()))
    out.replace(pos, slot.size(), claim_text);
  return out;
}

void validate(const DecomposePrompt& prompt) {
  if (prompt.template_text.find("{claim}") == std::string::npos)
    throw ConfigError("decomposition prompt template has no {claim} slot");
  if (prompt.max_tokens <= 0) throw ConfigError("decomposition max_tokens must be positive");
  if (prompt.temperature < 0.0) throw ConfigError("decomposition temperature must be >= 0");
}

LlmServiceConfig LlmServiceConfig::from_env() {
  LlmServiceConfig c;
  c.url = env_or("LLM_URL", "");
  c.api_key = env_or("LLM_API_KEY", "");
  return c;
}

HttpLlmClient::HttpLlmClient(HttpTransport& transport, LlmServiceConfig config)
    : transport_(transport), config_(std::move(config)) {
  if (config_.url.empty()) throw ConfigError("LLM service URL is not set (LLM_URL)");
}

std::string HttpLlmClient::request_body(const DecomposePrompt& prompt, std::string_view rendered) {
  json body;
  body["model"] = prompt.model;
  body["temperature"] = prompt.temperature;
  body["frequency_penalty"] = prompt.frequency_penalty;
  body["presence_penalty"] = prompt.presence_penalty;
  body["max_tokens"] = prompt.max_tokens;
  body["messages"] = json::array({json{{"role", "user"}, {"content", rendered}}});
  return body.dump();
}

std::string HttpLlmClient::complete(const DecomposePrompt& prompt, std::string_view rendered) {
  HttpRequest req;
  req.url = config_.url;
  req.body = request_body(prompt, rendered);
  req.timeout = config_.timeout;
  if (!config_.api_key.empty()) req.headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  const auto res = post_with_retry(transport_, req, config_.retry, "llm");
  try {
    const json j = json::parse(res.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ServiceError("llm: unexpected response shape: " + res.body);
  }
}

std::vector<std::string> parse_question_lines(std::string_view completion) {
  static const std::regex marker(R"(^\s*(?:(?:Q\s*)?\d+\s*[.):]|[-*]|\xE2\x80\xA2)\s*)");
  std::vector<std::string> marked;
  std::vector<std::string> plain;
  std::size_t start = 0;
  while (start <= completion.size()) {
    auto end = completion.find('\n', start);
    if (end == std::string_view::npos) end = completion.size();
    const std::string line(trim(completion.substr(start, end - start)));
    start = end + 1;
    if (line.empty()) continue;
    std::smatch m;
    if (std::regex_search(line, m, marker)) {
      const auto rest = trim(std::string_view(line).substr(m.length(0)));
      if (!rest.empty()) marked.push_back(ensure_question_mark(rest));
    } else {
      plain.push_back(ensure_question_mark(line));
    }
  }
  return marked.empty() ? plain : marked;
}

SubClaimSet fallback_decompose(const Claim& claim) {
  if (trim(claim.text).empty()) throw DataError("cannot decompose an empty claim");
  SubClaimSet set;
  set.claim_id = claim.claim_id;
  set.source = SubClaimSource::Fallback;
  const auto spans = clause_spans(claim.text);
  const auto whole = as_question(claim.text);
  for (std::size_t i = 0; i < kSubClaimsPerClaim; ++i)
    set.questions[i] = i < spans.size() ? as_question(spans[i]) : whole;
  return set;
}

SubClaimSet decompose_claim(LlmClient& client, const Claim& claim, const DecomposePrompt& prompt) {
  if (trim(claim.text).empty()) throw DataError("cannot decompose an empty claim");
  const auto raw = client.complete(prompt, prompt.render(claim.text));
  auto lines = parse_question_lines(raw);
  if (lines.empty()) throw ServiceError("llm: could not parse questions from response: " + raw);
  if (lines.size() != kSubClaimsPerClaim)
    spdlog::warn("decompose: claim '{}' got {} questions; normalizing to 3", claim.claim_id, lines.size());
  SubClaimSet set;
  set.claim_id = claim.claim_id;
  set.source = SubClaimSource::Llm;
  std::optional<SubClaimSet> fallback;
  for (std::size_t i = 0; i < kSubClaimsPerClaim; ++i) {
    if (i < lines.size()) {
      set.questions[i] = lines[i];
    } else {
      if (!fallback) fallback = fallback_decompose(claim);
      set.questions[i] = fallback->questions[i];
    }
  }
  return set;
}

// ---------------------------------------------------------------------------

std::string sub_claim_set_to_json_line(const SubClaimSet& set) {
  json j;
  j["claim_id"] = set.claim_id;
  j["questions"] = set.questions;
  j["source"] = std::string(to_string(set.source));
  return j.dump();
}

SubClaimSet sub_claim_set_from_json(std::string_view line) {
  const json j = json::parse(line);
  SubClaimSet set;
  set.claim_id = j.at("claim_id").get<std::string>();
  const auto& qs = j.at("questions");
  if (!qs.is_array() || qs.size() != kSubClaimsPerClaim)
    throw DataError("decomposition for '" + set.claim_id + "' must have exactly 3 questions");
  for (std::size_t i = 0; i < kSubClaimsPerClaim; ++i) {
    set.questions[i] = qs[i].get<std::string>();
    if (trim(set.questions[i]).empty() || set.questions[i].back() != '?')
      throw DataError("decomposition for '" + set.claim_id + "' has a malformed question");
  }
  const auto source = parse_sub_claim_source(j.value("source", std::string("llm")));
  if (!source) throw DataError("decomposition for '" + set.claim_id + "' has an unknown source");
  set.source = *source;
  return set;
}

DecompositionCache::DecompositionCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    SubClaimSet set;
    try {
      set = sub_claim_set_from_json(line);
    } catch (const json::exception& e) {
      throw DataError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    insert_locked(set, line_no);
  }
}

void DecompositionCache::insert_locked(const SubClaimSet& set, std::size_t line) {
  auto [it, inserted] = entries_.emplace(set.claim_id, set);
  if (!inserted && it->second.questions != set.questions) {
    throw DataError("conflicting decompositions for claim_id '" + set.claim_id + "'" +
                    (line ? " (line " + std::to_string(line) + ")" : std::string{}));
  }
}

std::optional<SubClaimSet> DecompositionCache::find(std::string_view claim_id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(claim_id);
  if (it == entries_.end()) return std::nullopt;
  SubClaimSet hit = it->second;
  hit.source = SubClaimSource::Cache;
  return hit;
}

void DecompositionCache::store(const SubClaimSet& set) {
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(set.claim_id); it != entries_.end()) {
    if (it->second.questions == set.questions) return;
    throw DataError("conflicting decompositions for claim_id '" + set.claim_id + "'");
  }
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << sub_claim_set_to_json_line(set) << '\n';
    if (!out) throw DataError("failed appending to " + path_.string());
  }
  entries_.emplace(set.claim_id, set);
}

std::size_t DecompositionCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::vector<SubClaimSet> DecompositionCache::entries() const {
  std::lock_guard lock(mu_);
  std::vector<SubClaimSet> out;
  for (const auto& [id, set] : entries_) out.push_back(set);
  return out;
}

std::vector<SubClaimSet> decompose_all(std::span<const Claim> claims, DecompositionCache& cache,
                                       LlmClient* client, const DecomposeOptions& options) {
  validate(options.prompt);
  if (!options.offline && client == nullptr)
    throw ConfigError("decompose: no LLM client configured (use --offline for the fallback)");
  std::vector<SubClaimSet> out(claims.size());
  std::vector<char> fresh(claims.size(), 0);
  // Calls run concurrently; the cache is appended in claim order afterwards
  // so the file is identical however the calls interleave.
  auto store_fresh = [&] {
    for (std::size_t i = 0; i < claims.size(); ++i)
      if (fresh[i]) cache.store(out[i]);
  };
  try {
    bounded_parallel_for(claims.size(), options.offline ? 1 : options.max_in_flight, [&](std::size_t i) {
      const Claim& claim = claims[i];
      if (auto hit = cache.find(claim.claim_id)) {
        out[i] = std::move(*hit);
        return;
      }
      out[i] = options.offline ? fallback_decompose(claim) : decompose_claim(*client, claim, options.prompt);
      fresh[i] = 1;
    });
  } catch (...) {
    store_fresh();
    throw;
  }
  store_fresh();
  return out;
}

}  // namespace numclaim
