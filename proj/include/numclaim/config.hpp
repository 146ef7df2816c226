#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "numclaim/classify.hpp"
#include "numclaim/decompose.hpp"
#include "numclaim/retrieval.hpp"
#include "numclaim/tokenize.hpp"

namespace numclaim {

struct PathsConfig {
  std::filesystem::path claims;
  std::filesystem::path evidence;
  std::filesystem::path index;
  std::filesystem::path cache;
  std::filesystem::path candidates;
  std::filesystem::path assembled;
  std::filesystem::path model;
  std::filesystem::path predictions;
  std::filesystem::path reports;
};

enum class ScorerKind { Lexical, Http };
enum class ClassifierBackend { Linear, Nli };

struct PipelineConfig {
  PathsConfig paths;

  std::size_t k = 50;
  Bm25Params bm25;
  AnalyzerOptions analyzer;
  std::size_t index_shards = 1;

  ScorerKind scorer = ScorerKind::Lexical;
  std::size_t rerank_in_flight = 4;

  std::size_t m = 1;
  DigitMode mode;
  ContextBudget budget;

  TrainConfig train;
  std::size_t feature_dim = kFeatureDim;

  double prior_bias_scale = 0.0;  // 0 = no bias
  ClassifierBackend backend = ClassifierBackend::Linear;

  std::size_t parallel_cells = 1;
  bool wall_timing = true;

  std::uint64_t seed = 42;
  bool offline = false;

  std::string llm_url;
  std::string reranker_url;
  std::string nli_url;
  std::chrono::milliseconds service_timeout{60000};
  int max_attempts = 3;

  DecomposePrompt prompt;
  std::size_t decompose_in_flight = 4;

  // Effective settings tree after layering; hashed into run manifests.
  std::string canonical_json;
  std::string hash() const;
};

/// Layers: built-in defaults < TOML file < QC_<SECTION>_<KEY> environment
/// variables < `overrides` ("section.key" -> raw string). Unknown keys and
/// type mismatches raise ConfigError, as do conflicting settings.
struct ConfigSources {
  std::optional<std::filesystem::path> file;
  std::map<std::string, std::string> env;  // QC_* only; see environment_overrides()
  std::map<std::string, std::string> overrides;
};

std::map<std::string, std::string> environment_overrides();
PipelineConfig load_config(const ConfigSources& sources);

// Built-in defaults as a JSON tree keyed by section.
std::string default_config_json();

}  // namespace numclaim
