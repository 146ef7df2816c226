#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numclaim/corpus.hpp"
#include "numclaim/transport.hpp"

namespace numclaim {

inline constexpr std::size_t kSubClaimsPerClaim = 3;

enum class SubClaimSource : std::uint8_t { Llm, Cache, Fallback };

std::string_view to_string(SubClaimSource source);
std::optional<SubClaimSource> parse_sub_claim_source(std::string_view text);

struct SubClaimSet {
  std::string claim_id;
  std::array<std::string, kSubClaimsPerClaim> questions;  // each ends with '?'
  SubClaimSource source = SubClaimSource::Fallback;

  bool operator==(const SubClaimSet&) const = default;
};

inline constexpr std::string_view kDefaultDecomposeTemplate =
    "Decompose the claim into three yes/no questions that, answered together, "
    "verify it. Return exactly three questions, one per line, numbered 1-3.\n\n"
    "Claim: {claim}";

/// Prompt text plus sampling parameters sent with every decomposition request.
struct DecomposePrompt {
  std::string template_text{kDefaultDecomposeTemplate};  // must contain "{claim}"
  std::string model = "gpt-4o-mini";
  double temperature = 0.3;
  double frequency_penalty = 0.6;
  double presence_penalty = 0.8;
  int max_tokens = 300;

  std::string render(std::string_view claim_text) const;
};

void validate(const DecomposePrompt& prompt);

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the raw completion text.
  virtual std::string complete(const DecomposePrompt& prompt, std::string_view rendered) = 0;
};

struct LlmServiceConfig {
  std::string url;      // full chat-completions endpoint
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;

  // LLM_URL / LLM_API_KEY
  static LlmServiceConfig from_env();
};

/// Chat-completions client. Request body: model, temperature,
/// frequency_penalty, presence_penalty, max_tokens and a single user message.
class HttpLlmClient final : public LlmClient {
 public:
  HttpLlmClient(HttpTransport& transport, LlmServiceConfig config);
  std::string complete(const DecomposePrompt& prompt, std::string_view rendered) override;

  static std::string request_body(const DecomposePrompt& prompt, std::string_view rendered);

 private:
  HttpTransport& transport_;
  LlmServiceConfig config_;
};

/// Questions parsed from a completion: numbered ("1.", "2)") or bulleted
/// ("-", "*", "•") lines with the marker stripped. If no line carries a
/// marker, every non-empty line counts. Empty result means unparseable.
std::vector<std::string> parse_question_lines(std::string_view completion);

/// Offline decomposition: split on sentence ends and ", " clause boundaries
/// into at most three spans (extra spans fold into the third), phrase each as
/// "Is it true that <span>?" and pad with the whole-claim question.
SubClaimSet fallback_decompose(const Claim& claim);

// LLM path: parse, pad missing slots from fallback_decompose, drop extras.
SubClaimSet decompose_claim(LlmClient& client, const Claim& claim, const DecomposePrompt& prompt);

/// Append-only JSONL cache keyed by claim_id. Loading tolerates identical
/// duplicate lines and rejects conflicting ones. Thread-safe.
class DecompositionCache {
 public:
  DecompositionCache() = default;
  // Loads `path` if it exists; later store() calls append to it.
  explicit DecompositionCache(std::filesystem::path path);

  std::optional<SubClaimSet> find(std::string_view claim_id) const;
  // Write-once per claim_id: re-storing identical questions is a no-op,
  // different questions are a DataError.
  void store(const SubClaimSet& set);
  std::size_t size() const;
  std::vector<SubClaimSet> entries() const;  // claim_id order

 private:
  void insert_locked(const SubClaimSet& set, std::size_t line);

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, SubClaimSet, std::less<>> entries_;
};

std::string sub_claim_set_to_json_line(const SubClaimSet& set);
SubClaimSet sub_claim_set_from_json(std::string_view line);

struct DecomposeOptions {
  DecomposePrompt prompt;
  bool offline = false;           // never call the client; use the fallback
  std::size_t max_in_flight = 4;
};

/// Cache-first decomposition of many claims. Cache hits never reach the
/// client; new results are stored. Output order follows `claims`.
std::vector<SubClaimSet> decompose_all(std::span<const Claim> claims, DecompositionCache& cache,
                                       LlmClient* client, const DecomposeOptions& options);

}  // namespace numclaim
