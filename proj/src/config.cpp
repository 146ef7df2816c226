#include "numclaim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "numclaim/digest.hpp"
#include "numclaim/error.hpp"
#include "toml.hpp"

extern char** environ;

namespace numclaim {

using nlohmann::json;

namespace {

const json& defaults() {
  static const json tree = [] {
    const DecomposePrompt prompt;
    const TrainConfig train;
    return json{
        {"paths",
         {{"claims", "data/claims.jsonl"},
          {"evidence", "data/evidence.jsonl"},
          {"index", "work/index"},
          {"cache", "work/decompositions.jsonl"},
          {"candidates", "work/candidates.jsonl"},
          {"assembled", "work/assembled.jsonl"},
          {"model", "work/model.bin"},
          {"predictions", "work/predictions.jsonl"},
          {"reports", "work/reports"}}},
        {"retrieval", {{"k", 50}, {"k1", 1.2}, {"b", 0.75}, {"stopwords", false}, {"stem", false}, {"shards", 1}}},
        {"rerank", {{"scorer", "lexical"}, {"max_in_flight", 4}}},
        {"selection", {{"m", 1}}},
        {"tokenize", {{"digit_mode", "l2r"}, {"group_size", 3}, {"context_budget", 1024}}},
        {"train",
         {{"learning_rate", train.learning_rate},
          {"max_epochs", train.max_epochs},
          {"patience", train.patience},
          {"batch_size", train.batch_size},
          {"loss", "cross_entropy"},
          {"gamma", train.gamma},
          {"alpha", json::array()},
          {"feature_dim", kFeatureDim}}},
        {"predict", {{"prior_bias", 0.0}, {"backend", "linear"}}},
        {"ablation", {{"parallel_cells", 1}, {"timing", "wall"}}},
        {"run", {{"seed", 42}, {"offline", false}}},
        {"services",
         {{"llm_url", ""}, {"reranker_url", ""}, {"nli_url", ""}, {"timeout_ms", 60000}, {"max_attempts", 3}}},
        {"decompose",
         {{"template", prompt.template_text},
          {"model", prompt.model},
          {"temperature", prompt.temperature},
          {"frequency_penalty", prompt.frequency_penalty},
          {"presence_penalty", prompt.presence_penalty},
          {"max_tokens", prompt.max_tokens},
          {"max_in_flight", 4}}},
    };
  }();
  return tree;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const json& default_for(const std::string& section, const std::string& key, const std::string& where) {
  const auto& d = defaults();
  const auto s = d.find(section);
  if (s == d.end()) throw ConfigError(where + ": unknown section '" + section + "'");
  const auto k = s->find(key);
  if (k == s->end()) throw ConfigError(where + ": unknown key '" + section + "." + key + "'");
  return *k;
}

// Coerce an already-typed value to the default's type.
json coerce(const json& value, const json& like, const std::string& where) {
  auto mismatch = [&]() -> ConfigError {
    return ConfigError(where + ": expected " + std::string(like.type_name()) + ", got " + value.type_name());
  };
  if (like.is_boolean()) {
    if (!value.is_boolean()) throw mismatch();
    return value;
  }
  if (like.is_number_integer()) {
    if (!value.is_number_integer()) throw mismatch();
    if (value.get<std::int64_t>() < 0) throw ConfigError(where + ": must be non-negative");
    return value;
  }
  if (like.is_number()) {
    if (!value.is_number()) throw mismatch();
    return value.get<double>();
  }
  if (like.is_string()) {
    if (!value.is_string()) throw mismatch();
    return value;
  }
  if (like.is_array()) {
    if (!value.is_array()) throw mismatch();
    for (const auto& v : value)
      if (!v.is_number()) throw ConfigError(where + ": array entries must be numbers");
    json out = json::array();
    for (const auto& v : value) out.push_back(v.get<double>());
    return out;
  }
  throw mismatch();
}

// Coerce a raw string (env or flag) to the default's type.
json parse_raw(const std::string& raw, const json& like, const std::string& where) {
  auto bad = [&]() -> ConfigError {
    return ConfigError(where + ": cannot parse '" + raw + "' as " + like.type_name());
  };
  if (like.is_boolean()) {
    const auto v = lower(raw);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw bad();
  }
  if (like.is_number_integer()) {
    std::uint64_t out = 0;
    const auto* end = raw.data() + raw.size();
    const auto [p, ec] = std::from_chars(raw.data(), end, out);
    if (ec != std::errc{} || p != end) throw bad();
    return out;
  }
  if (like.is_number()) {
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw bad();
      return v;
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  if (like.is_array()) {
    json out = json::array();
    if (raw.empty()) return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_raw(item, json(0.0), where));
    return out;
  }
  return raw;
}

json toml_to_json(const toml::node& node, const std::string& where) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v, where);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v, where));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigError(where + ": unsupported TOML value type");
}

void apply_file(json& tree, const std::filesystem::path& file) {
  toml::table table;
  try {
    table = toml::parse_file(file.string());
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << file.string() << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  const json doc = toml_to_json(table, file.string());
  const auto base = std::filesystem::absolute(file).parent_path();
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError(file.string() + ": top-level key '" + section + "' must be a table");
    for (const auto& [key, value] : body.items()) {
      const auto where = file.string() + ": " + section + "." + key;
      const auto& like = default_for(section, key, file.string());
      auto v = coerce(value, like, where);
      if (section == "paths" && !v.get<std::string>().empty()) {
        const std::filesystem::path p(v.get<std::string>());
        if (p.is_relative()) v = (base / p).lexically_normal().string();
      }
      tree[section][key] = std::move(v);
    }
  }
}

void apply_raw(json& tree, const std::string& dotted, const std::string& raw, const std::string& origin) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError(origin + ": expected section.key, got '" + dotted + "'");
  const auto section = dotted.substr(0, dot);
  const auto key = dotted.substr(dot + 1);
  const auto& like = default_for(section, key, origin);
  tree[section][key] = parse_raw(raw, like, origin + " (" + dotted + ")");
}

template <typename E>
E pick(const std::string& value, std::initializer_list<std::pair<const char*, E>> options, const std::string& key) {
  const auto v = lower(value);
  for (const auto& [name, e] : options)
    if (v == name) return e;
  std::string allowed;
  for (const auto& [name, e] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(key + ": '" + value + "' is not one of {" + allowed + "}");
}

PipelineConfig from_tree(const json& t) {
  PipelineConfig c;
  const auto& p = t["paths"];
  c.paths = {p["claims"].get<std::string>(),    p["evidence"].get<std::string>(),
             p["index"].get<std::string>(),     p["cache"].get<std::string>(),
             p["candidates"].get<std::string>(), p["assembled"].get<std::string>(),
             p["model"].get<std::string>(),     p["predictions"].get<std::string>(),
             p["reports"].get<std::string>()};

  const auto& r = t["retrieval"];
  c.k = r["k"].get<std::size_t>();
  c.bm25 = {r["k1"].get<double>(), r["b"].get<double>()};
  c.analyzer = {r["stopwords"].get<bool>(), r["stem"].get<bool>()};
  c.index_shards = std::max<std::size_t>(1, r["shards"].get<std::size_t>());

  c.scorer = pick<ScorerKind>(t["rerank"]["scorer"].get<std::string>(),
                              {{"lexical", ScorerKind::Lexical}, {"http", ScorerKind::Http}}, "rerank.scorer");
  c.rerank_in_flight = t["rerank"]["max_in_flight"].get<std::size_t>();

  c.m = t["selection"]["m"].get<std::size_t>();
  const auto& tok = t["tokenize"];
  const auto grouping = parse_digit_grouping(tok["digit_mode"].get<std::string>());
  if (!grouping) throw ConfigError("tokenize.digit_mode: expected none, l2r or r2l");
  c.mode = DigitMode{*grouping, tok["group_size"].get<std::size_t>()};
  c.budget = ContextBudget{tok["context_budget"].get<std::size_t>()};

  const auto& tr = t["train"];
  c.train.learning_rate = tr["learning_rate"].get<double>();
  c.train.max_epochs = tr["max_epochs"].get<std::size_t>();
  c.train.patience = tr["patience"].get<std::size_t>();
  c.train.batch_size = tr["batch_size"].get<std::size_t>();
  const auto loss = parse_loss_kind(tr["loss"].get<std::string>());
  if (!loss) throw ConfigError("train.loss: expected cross_entropy or focal");
  c.train.loss = *loss;
  c.train.gamma = tr["gamma"].get<double>();
  const auto alpha = tr["alpha"].get<std::vector<double>>();
  if (!alpha.empty()) {
    if (alpha.size() != kNumClasses) throw ConfigError("train.alpha: expected 3 values (True, False, Conflicting)");
    c.train.alpha = ClassVector{alpha[0], alpha[1], alpha[2]};
  }
  c.feature_dim = tr["feature_dim"].get<std::size_t>();

  c.prior_bias_scale = t["predict"]["prior_bias"].get<double>();
  c.backend = pick<ClassifierBackend>(t["predict"]["backend"].get<std::string>(),
                                      {{"linear", ClassifierBackend::Linear}, {"nli", ClassifierBackend::Nli}},
                                      "predict.backend");

  c.parallel_cells = std::max<std::size_t>(1, t["ablation"]["parallel_cells"].get<std::size_t>());
  c.wall_timing =
      pick<bool>(t["ablation"]["timing"].get<std::string>(), {{"wall", true}, {"off", false}}, "ablation.timing");

  c.seed = t["run"]["seed"].get<std::uint64_t>();
  c.train.seed = c.seed;
  c.offline = t["run"]["offline"].get<bool>();

  const auto& s = t["services"];
  c.llm_url = s["llm_url"].get<std::string>();
  c.reranker_url = s["reranker_url"].get<std::string>();
  c.nli_url = s["nli_url"].get<std::string>();
  c.service_timeout = std::chrono::milliseconds(s["timeout_ms"].get<std::int64_t>());
  c.max_attempts = s["max_attempts"].get<int>();

  const auto& d = t["decompose"];
  c.prompt.template_text = d["template"].get<std::string>();
  c.prompt.model = d["model"].get<std::string>();
  c.prompt.temperature = d["temperature"].get<double>();
  c.prompt.frequency_penalty = d["frequency_penalty"].get<double>();
  c.prompt.presence_penalty = d["presence_penalty"].get<double>();
  c.prompt.max_tokens = d["max_tokens"].get<int>();
  c.decompose_in_flight = d["max_in_flight"].get<std::size_t>();
  return c;
}

void check(const PipelineConfig& c) {
  if (c.m < 1 || c.m > 3) throw ConfigError("selection.m must be in [1, 3], got " + std::to_string(c.m));
  if (c.k < c.m)
    throw ConfigError("retrieval.k (" + std::to_string(c.k) + ") must be >= selection.m (" + std::to_string(c.m) + ")");
  if (c.mode.group_size < 1) throw ConfigError("tokenize.group_size must be >= 1");
  if (c.budget.max_tokens < 1) throw ConfigError("tokenize.context_budget must be >= 1");
  if (c.feature_dim < 1) throw ConfigError("train.feature_dim must be >= 1");
  if (c.max_attempts < 1) throw ConfigError("services.max_attempts must be >= 1");
  if (c.rerank_in_flight < 1 || c.decompose_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (c.prior_bias_scale < 0) throw ConfigError("predict.prior_bias must be >= 0");
  validate(c.bm25);
  validate(c.train);
  validate(c.prompt);
  if (c.offline && c.scorer == ScorerKind::Http)
    throw ConfigError("run.offline conflicts with rerank.scorer = \"http\"");
  if (c.offline && c.backend == ClassifierBackend::Nli)
    throw ConfigError("run.offline conflicts with predict.backend = \"nli\"");
}

}  // namespace

std::string PipelineConfig::hash() const { return sha256_hex(canonical_json); }

// Kernel selector read by the SIMD dispatcher, not a setting.
constexpr std::string_view kSimdVariable = "QC_SIMD";

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string_view entry(*e);
    if (!entry.starts_with("QC_")) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos || entry.substr(0, eq) == kSimdVariable) continue;
    out.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return out;
}

std::string default_config_json() { return defaults().dump(2); }

PipelineConfig load_config(const ConfigSources& sources) {
  json tree = defaults();
  if (sources.file) {
    if (!std::filesystem::exists(*sources.file))
      throw ConfigError("config file not found: " + sources.file->string());
    apply_file(tree, *sources.file);
  }
  for (const auto& [name, raw] : sources.env) {
    // QC_<SECTION>_<KEY>; section names contain no underscore.
    if (!name.starts_with("QC_") || name == kSimdVariable) continue;
    const auto rest = lower(name.substr(3));
    const auto us = rest.find('_');
    if (us == std::string::npos) throw ConfigError("environment: malformed variable " + name);
    apply_raw(tree, rest.substr(0, us) + "." + rest.substr(us + 1), raw, "environment " + name);
  }
  for (const auto& [dotted, raw] : sources.overrides) apply_raw(tree, dotted, raw, "flag");

  auto cfg = from_tree(tree);
  check(cfg);
  cfg.canonical_json = tree.dump();
  return cfg;
}

}  // namespace numclaim
