// numclaim: command-line driver for the claim verification pipeline.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "numclaim/ablation.hpp"
#include "numclaim/config.hpp"
#include "numclaim/digest.hpp"
#include "numclaim/error.hpp"
#include "numclaim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace numclaim;

namespace {

struct Globals {
  std::string config_file;
  bool offline = false;
  bool verbose = false;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flag_overrides;
};

// Flag value -> config key, recorded only when the flag was given.
void bind(CLI::App* app, Globals& g, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&g, key](const std::string& v) { g.flag_overrides[key] = v; }, help);
}

PipelineConfig resolve(const Globals& g) {
  ConfigSources src;
  if (!g.config_file.empty()) src.file = fs::path(g.config_file);
  src.env = environment_overrides();
  src.overrides = g.flag_overrides;
  for (const auto& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    src.overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (g.offline) src.overrides["run.offline"] = "true";
  return load_config(src);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void require_file(const fs::path& p, const std::string& what, const std::string& producer) {
  if (!fs::exists(p)) {
    std::string msg = "missing " + what + " at " + p.string();
    if (!producer.empty()) msg += " (run " + producer + " first)";
    throw DataError(msg);
  }
}

// Writes via a temp file so a failed run never leaves a half artifact.
void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

class Run {
 public:
  Run(std::string command, const PipelineConfig& cfg) : start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.config_hash = cfg.hash();
    manifest_.seed = cfg.seed;
  }
  void input(const fs::path& p) { manifest_.add_input(p); }
  void finish(const fs::path& artifact) {
    manifest_.outputs.push_back(artifact.string());
    manifest_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_manifest(manifest_, artifact);
  }

 private:
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

// One transport per process; offline runs get the refusing transport so any
// accidental network path fails loudly instead of connecting.
HttpTransport& transport(const PipelineConfig& cfg) {
  static std::unique_ptr<HttpTransport> t;
  if (!t) t = cfg.offline ? std::unique_ptr<HttpTransport>(std::make_unique<OfflineTransport>()) : make_http_transport();
  return *t;
}

RetryPolicy retry_for(const PipelineConfig& cfg) {
  RetryPolicy r;
  r.max_attempts = cfg.max_attempts;
  return r;
}

std::unique_ptr<PairScorer> make_scorer(const PipelineConfig& cfg) {
  if (cfg.scorer == ScorerKind::Lexical) return std::make_unique<LexicalOracleScorer>();
  auto sc = RerankerServiceConfig::from_env();
  if (!cfg.reranker_url.empty()) sc.base_url = cfg.reranker_url;
  if (sc.base_url.empty()) throw ConfigError("rerank.scorer = \"http\" needs services.reranker_url or RERANKER_URL");
  sc.timeout = cfg.service_timeout;
  sc.retry = retry_for(cfg);
  return std::make_unique<HttpCrossEncoderScorer>(transport(cfg), sc);
}

std::unique_ptr<NliClient> make_nli(const PipelineConfig& cfg) {
  if (cfg.backend != ClassifierBackend::Nli) return nullptr;
  auto nc = NliServiceConfig::from_env();
  if (!cfg.nli_url.empty()) nc.base_url = cfg.nli_url;
  if (nc.base_url.empty()) throw ConfigError("predict.backend = \"nli\" needs services.nli_url or NLI_URL");
  nc.timeout = cfg.service_timeout;
  nc.retry = retry_for(cfg);
  return std::make_unique<NliClient>(&transport(cfg), nc);
}

std::vector<Claim> claims_for(const PipelineConfig& cfg) {
  require_file(cfg.paths.claims, "claims", "ingest");
  return load_claims(cfg.paths.claims);
}

nlohmann::ordered_json prediction_json(const std::string& claim_id, const Prediction& p) {
  nlohmann::ordered_json j;
  j["claim_id"] = claim_id;
  j["label"] = std::string(to_string(p.label));
  nlohmann::ordered_json probs;
  for (auto l : kAllLabels) probs[std::string(to_string(l))] = p.probs[class_index(l)];
  j["probs"] = probs;
  return j;
}

std::vector<Example> examples_for(const std::vector<AssembledRecord>& recs, Split split, std::size_t dim) {
  std::vector<Example> out;
  for (const auto& r : recs)
    if (r.split == split && r.label) out.push_back(Example{featurize(r.input, dim), *r.label});
  return out;
}

std::optional<PriorBias> prior_bias_for(const PipelineConfig& cfg) {
  if (cfg.prior_bias_scale == 0.0) return std::nullopt;
  return PriorBias::from_distribution(label_distribution(load_claims(cfg.paths.claims, Split::Train)),
                                      cfg.prior_bias_scale);
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(const PipelineConfig& cfg, const std::string& kind, const std::map<Split, std::string>& inputs,
               const std::string& out_flag) {
  if (kind != "claims" && kind != "evidence") throw ConfigError("ingest --kind must be claims or evidence");
  if (inputs.empty()) throw ConfigError("ingest needs at least one input file");
  const fs::path out = !out_flag.empty() ? fs::path(out_flag) : kind == "claims" ? cfg.paths.claims : cfg.paths.evidence;
  Run run("ingest", cfg);
  std::ostringstream buf;
  std::size_t records = 0;
  for (const auto& [split, file] : inputs) {
    require_file(file, "raw " + kind, "");
    run.input(file);
    std::ifstream raw(file, std::ios::binary);
    const auto stats = kind == "claims" ? ingest_claims(raw, buf, split) : ingest_evidence(raw, buf);
    records += stats.records;
  }
  // Re-validate the normalized output as a whole (duplicate ids across splits).
  std::istringstream check(buf.str());
  if (kind == "claims")
    read_claims(check, out.string());
  else
    for (EvidenceReader r(check, out.string()); r.next();) {
    }
  write_text(out, buf.str());
  run.finish(out);
  spdlog::info("ingest: {} {} records -> {}", records, kind, out.string());
  return 0;
}

int cmd_index(const PipelineConfig& cfg, const std::string& corpus_flag, const std::string& out_flag) {
  const fs::path corpus = corpus_flag.empty() ? cfg.paths.evidence : fs::path(corpus_flag);
  const fs::path out = out_flag.empty() ? cfg.paths.index : fs::path(out_flag);
  require_file(corpus, "evidence corpus", "ingest");
  Run run("index", cfg);
  run.input(corpus);
  InvertedIndex index = [&] {
    if (cfg.index_shards > 1) {
      const auto docs = load_evidence(corpus);
      return build_index(docs, cfg.bm25, cfg.analyzer, cfg.index_shards);
    }
    EvidenceReader reader(corpus);
    return build_index(reader, cfg.bm25, cfg.analyzer);
  }();
  fs::create_directories(out);
  write_index(index, out);
  run.finish(out);
  spdlog::info("index: {} docs, {} terms -> {}", index.doc_count(), index.terms().size(), out.string());
  return 0;
}

int cmd_search(const PipelineConfig& cfg, const std::string& index_flag, const std::string& query) {
  const fs::path dir = index_flag.empty() ? cfg.paths.index : fs::path(index_flag);
  const auto index = read_index(dir);
  for (const auto& hit : search(index, query, cfg.k)) {
    nlohmann::ordered_json j;
    j["doc_id"] = hit.doc_id;
    j["bm25"] = hit.bm25_score;
    std::cout << j.dump() << '\n';
  }
  return 0;
}

int cmd_decompose(const PipelineConfig& cfg) {
  const auto claims = claims_for(cfg);
  Run run("decompose", cfg);
  run.input(cfg.paths.claims);
  ensure_parent(cfg.paths.cache);
  DecompositionCache cache(cfg.paths.cache);

  std::unique_ptr<HttpLlmClient> client;
  if (!cfg.offline) {
    auto lc = LlmServiceConfig::from_env();
    if (!cfg.llm_url.empty()) lc.url = cfg.llm_url;
    lc.timeout = cfg.service_timeout;
    lc.retry = retry_for(cfg);
    if (!lc.url.empty()) client = std::make_unique<HttpLlmClient>(transport(cfg), lc);
  }
  DecomposeOptions opt;
  opt.prompt = cfg.prompt;
  opt.offline = cfg.offline;
  opt.max_in_flight = cfg.decompose_in_flight;
  if (!client && !cfg.offline) {
    // Cache misses without a client are a configuration problem, not a silent fallback.
    for (const auto& c : claims)
      if (!cache.find(c.claim_id))
        throw ConfigError("claim '" + c.claim_id + "' is not cached and no LLM_URL is set (use --offline for the rule-based fallback)");
  }
  const auto sets = decompose_all(claims, cache, client.get(), opt);
  std::size_t by_source[3] = {0, 0, 0};
  for (const auto& s : sets) ++by_source[static_cast<int>(s.source)];
  run.finish(cfg.paths.cache);
  spdlog::info("decompose: {} claims ({} llm, {} cached, {} fallback) -> {}", sets.size(), by_source[0], by_source[1],
               by_source[2], cfg.paths.cache.string());
  return 0;
}

int cmd_retrieve(const PipelineConfig& cfg) {
  const auto claims = claims_for(cfg);
  require_file(cfg.paths.cache, "decompositions", "decompose");
  require_file(cfg.paths.evidence, "evidence corpus", "ingest");
  const auto index = read_index(cfg.paths.index);
  Run run("retrieve", cfg);
  for (const auto& p : {cfg.paths.claims, cfg.paths.cache, cfg.paths.index, cfg.paths.evidence}) run.input(p);

  const DecompositionCache cache(cfg.paths.cache);
  const auto subs = load_sub_claims_for(claims, cache);
  auto scorer = make_scorer(cfg);
  const auto cands =
      retrieve_candidates(claims, subs, index, cfg.k, *scorer, texts_from_file(cfg.paths.evidence), cfg.rerank_in_flight);
  std::string text;
  for (const auto& c : cands) text += candidates_to_json_line(c) + "\n";
  write_text(cfg.paths.candidates, text);
  run.finish(cfg.paths.candidates);
  spdlog::info("retrieve: {} claims, k={}, scorer={} -> {}", cands.size(), cfg.k, scorer->identity(),
               cfg.paths.candidates.string());
  return 0;
}

int cmd_assemble(const PipelineConfig& cfg) {
  const auto claims = claims_for(cfg);
  require_file(cfg.paths.cache, "decompositions", "decompose");
  require_file(cfg.paths.evidence, "evidence corpus", "ingest");
  const auto cands = load_candidates(cfg.paths.candidates);
  Run run("assemble", cfg);
  for (const auto& p : {cfg.paths.claims, cfg.paths.cache, cfg.paths.candidates, cfg.paths.evidence}) run.input(p);

  const DecompositionCache cache(cfg.paths.cache);
  const auto subs = load_sub_claims_for(claims, cache);
  std::map<std::string, const ClaimCandidates*, std::less<>> by_id;
  for (const auto& c : cands) by_id.emplace(c.claim_id, &c);

  std::vector<std::string> ids;
  std::vector<EvidenceSelection> selections;
  for (const auto& c : claims) {
    const auto it = by_id.find(c.claim_id);
    if (it == by_id.end()) throw DataError("no candidates for claim '" + c.claim_id + "' (run retrieve first)");
    for (const auto& sc : it->second->sub_claims)
      for (const auto& e : sc.candidates) ids.push_back(e.doc_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const auto texts = fetch_evidence_texts(cfg.paths.evidence, ids);

  std::string out;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const auto rec =
        assemble_claim(claims[i], subs[i], *by_id.at(claims[i].claim_id), cfg.m, texts, cfg.budget, cfg.mode);
    truncated += rec.input.truncated ? 1 : 0;
    out += assembled_to_json_line(rec) + "\n";
  }
  write_text(cfg.paths.assembled, out);
  run.finish(cfg.paths.assembled);
  spdlog::info("assemble: {} inputs (m={}, budget={}, mode={}), {} truncated -> {}", claims.size(), cfg.m,
               cfg.budget.max_tokens, to_string(cfg.mode.grouping), truncated, cfg.paths.assembled.string());
  return 0;
}

int cmd_train(const PipelineConfig& cfg) {
  const auto recs = load_assembled(cfg.paths.assembled);
  Run run("train", cfg);
  run.input(cfg.paths.assembled);
  if (!recs.empty() && (recs.front().input.mode != cfg.mode || recs.front().input.budget != cfg.budget))
    spdlog::warn("train: assembled inputs use mode/budget {}/{}; the model records those",
                 to_string(recs.front().input.mode.grouping), recs.front().input.budget.max_tokens);
  const auto mode = recs.empty() ? cfg.mode : recs.front().input.mode;
  const auto budget = recs.empty() ? cfg.budget : recs.front().input.budget;
  const auto tr = examples_for(recs, Split::Train, cfg.feature_dim);
  const auto va = examples_for(recs, Split::Validation, cfg.feature_dim);
  if (tr.empty()) throw DataError("no labeled training inputs in " + cfg.paths.assembled.string());
  const auto result = train(tr, va, cfg.train, mode, budget, cfg.feature_dim);
  ensure_parent(cfg.paths.model);
  write_model(result.model, cfg.paths.model);
  run.finish(cfg.paths.model);
  const double best_f1 = result.history.empty() ? 0.0 : result.history[result.best_epoch - 1].validation_macro_f1;
  spdlog::info("train: {} epochs (best {}: val macro-F1 {:.4f}) -> {}", result.epochs_run, result.best_epoch, best_f1,
               cfg.paths.model.string());
  return 0;
}

int cmd_predict(const PipelineConfig& cfg, const std::string& claim_id, const std::string& split_flag) {
  const auto recs = load_assembled(cfg.paths.assembled);
  std::optional<Split> only;
  if (!split_flag.empty()) {
    only = parse_split(split_flag);
    if (!only) throw ConfigError("unknown split '" + split_flag + "'");
  }
  auto nli = make_nli(cfg);
  std::optional<ClassifierModel> model;
  if (!nli) model = read_model(cfg.paths.model);
  const auto bias = nli ? std::nullopt : prior_bias_for(cfg);

  auto predict_one = [&](const AssembledRecord& r) {
    if (nli) return nli_server_predict(*nli, r.input);
    return predict(*model, featurize_for(*model, r.input), bias);
  };

  if (!claim_id.empty()) {
    for (const auto& r : recs)
      if (r.input.claim_id == claim_id) {
        std::cout << prediction_json(claim_id, predict_one(r)).dump() << '\n';
        return 0;
      }
    throw DataError("claim '" + claim_id + "' not found in " + cfg.paths.assembled.string());
  }

  Run run("predict", cfg);
  run.input(cfg.paths.assembled);
  if (model) run.input(cfg.paths.model);
  std::string out;
  std::size_t n = 0;
  for (const auto& r : recs) {
    if (only && r.split != *only) continue;
    out += prediction_json(r.input.claim_id, predict_one(r)).dump() + "\n";
    ++n;
  }
  write_text(cfg.paths.predictions, out);
  run.finish(cfg.paths.predictions);
  spdlog::info("predict: {} predictions -> {}", n, cfg.paths.predictions.string());
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg) {
  const auto claims = claims_for(cfg);
  require_file(cfg.paths.predictions, "predictions", "predict");
  Run run("evaluate", cfg);
  run.input(cfg.paths.claims);
  run.input(cfg.paths.predictions);

  std::map<std::string, VeracityLabel, std::less<>> gold;
  for (const auto& c : claims)
    if (c.label) gold.emplace(c.claim_id, *c.label);

  std::vector<VeracityLabel> golds, preds;
  std::ifstream in(cfg.paths.predictions);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("claim_id").get<std::string>();
      const auto label = parse_label(j.at("label").get<std::string>());
      if (!label) throw DataError("unknown label");
      const auto g = gold.find(id);
      if (g == gold.end()) continue;  // unlabeled (test) claims are not scored
      golds.push_back(g->second);
      preds.push_back(*label);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(cfg.paths.predictions.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  const auto report = evaluate(golds, preds);
  const auto out = cfg.paths.reports / "metrics.json";
  write_text(out, metrics_to_json(report));
  run.finish(out);
  std::cout << "macro-F1 " << report.macro_f1 << "  accuracy " << report.accuracy << "  (n=" << golds.size() << ")\n";
  return 0;
}

int cmd_ablate(const PipelineConfig& cfg, const std::string& out_flag) {
  const auto claims = claims_for(cfg);
  require_file(cfg.paths.cache, "decompositions", "decompose");
  require_file(cfg.paths.evidence, "evidence corpus", "ingest");
  const fs::path out = out_flag.empty() ? cfg.paths.reports / "ablation.json" : fs::path(out_flag);
  Run run("ablate", cfg);
  for (const auto& p : {cfg.paths.claims, cfg.paths.cache, cfg.paths.evidence}) run.input(p);

  const auto docs = load_evidence(cfg.paths.evidence);
  const auto index = build_index(docs, cfg.bm25, cfg.analyzer, cfg.index_shards);
  const DecompositionCache cache(cfg.paths.cache);
  auto scorer = make_scorer(cfg);
  const auto data = prepare_data(claims, cache, index, cfg.k, *scorer, texts_from_docs(docs), cfg.rerank_in_flight);

  auto nli = make_nli(cfg);
  AblationOptions opt;
  opt.train = cfg.train;
  opt.feature_dim = cfg.feature_dim;
  opt.max_parallel_cells = cfg.parallel_cells;
  opt.timing = cfg.wall_timing ? TimingMode::Wall : TimingMode::Off;
  if (cfg.prior_bias_scale != 0.0) opt.prior_bias_scale = cfg.prior_bias_scale;
  opt.nli = nli.get();

  auto grid = canonical_grid(cfg.train.loss);
  for (auto& cell : grid) cell.mode.group_size = cfg.mode.group_size;
  const auto report = run_ablation(grid, data, opt);
  write_text(out, report_to_json(report));
  run.finish(out);
  std::cout << report_to_table(report);
  return 0;
}

int cmd_report(const PipelineConfig& cfg, const std::string& in_flag, const std::string& out_flag) {
  const fs::path in = in_flag.empty() ? cfg.paths.reports / "ablation.json" : fs::path(in_flag);
  require_file(in, "ablation report", "ablate");
  fs::path out = out_flag.empty() ? in : fs::path(out_flag);
  if (out_flag.empty()) out.replace_extension(".csv");
  Run run("report", cfg);
  run.input(in);
  std::ifstream f(in, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto report = report_from_json(ss.str());
  write_text(out, report_to_csv(report));
  run.finish(out);
  std::cout << report_to_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numclaim - numerical claim verification pipeline"};
  app.require_subcommand(1);
  Globals g;

  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("-c,--config", g.config_file, "TOML config file");
    sub->add_flag("--offline", g.offline, "forbid all network access");
    sub->add_flag("-v,--verbose", g.verbose, "debug logging");
    sub->add_option("--set", g.sets, "override any setting: section.key=value");
    bind(sub, g, "--seed", "run.seed", "random seed");
    bind(sub, g, "--digit-mode", "tokenize.digit_mode", "none, l2r or r2l");
    bind(sub, g, "--context-budget", "tokenize.context_budget", "max tokens per input");
    bind(sub, g, "-k", "retrieval.k", "BM25 candidates per sub-claim");
    bind(sub, g, "--m", "selection.m", "evidences kept per sub-claim (1-3)");
    bind(sub, g, "--loss", "train.loss", "cross_entropy or focal");
    bind(sub, g, "--claims", "paths.claims", "claims JSONL");
    bind(sub, g, "--evidence", "paths.evidence", "evidence JSONL");
  };

  std::string kind = "claims", out_flag, in_flag, corpus_flag, index_flag, query, claim_id, split_flag;
  std::string raw_train, raw_val, raw_test, raw_input;

  auto* ingest = app.add_subcommand("ingest", "normalize raw claims or evidence into JSONL");
  ingest->add_option("--kind", kind, "claims or evidence")->check(CLI::IsMember({"claims", "evidence"}));
  ingest->add_option("--train", raw_train, "raw training claims");
  ingest->add_option("--validation", raw_val, "raw validation claims");
  ingest->add_option("--test", raw_test, "raw test claims");
  ingest->add_option("--input", raw_input, "raw evidence");
  ingest->add_option("-o,--out", out_flag, "output JSONL");

  auto* index = app.add_subcommand("index", "build the BM25 index");
  index->add_option("--corpus", corpus_flag, "evidence JSONL");
  index->add_option("-o,--out", out_flag, "index directory");

  auto* search_cmd = app.add_subcommand("search", "query the BM25 index");
  search_cmd->add_option("--index", index_flag, "index directory");
  search_cmd->add_option("-q,--query", query, "query text")->required();

  auto* decompose = app.add_subcommand("decompose", "split claims into three sub-questions");
  auto* retrieve = app.add_subcommand("retrieve", "BM25 + rerank candidates per sub-question");
  auto* assemble = app.add_subcommand("assemble", "select evidences and build budgeted inputs");
  auto* train_cmd = app.add_subcommand("train", "train the veracity classifier");
  auto* predict_cmd = app.add_subcommand("predict", "predict veracity labels");
  predict_cmd->add_option("--claim-id", claim_id, "print one prediction as a JSON line");
  predict_cmd->add_option("--split", split_flag, "only this split");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold labels");
  auto* ablate = app.add_subcommand("ablate", "run the digit-mode x context ablation grid");
  ablate->add_option("-o,--out", out_flag, "report JSON");
  auto* report = app.add_subcommand("report", "render an ablation report as table and CSV");
  report->add_option("-i,--in", in_flag, "report JSON");
  report->add_option("-o,--out", out_flag, "CSV output");

  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) add_globals(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto logger = spdlog::stderr_color_mt("numclaim");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    const auto cfg = resolve(g);
    if (*ingest) {
      std::map<Split, std::string> inputs;
      if (kind == "claims") {
        if (!raw_train.empty()) inputs[Split::Train] = raw_train;
        if (!raw_val.empty()) inputs[Split::Validation] = raw_val;
        if (!raw_test.empty()) inputs[Split::Test] = raw_test;
      } else if (!raw_input.empty()) {
        inputs[Split::Train] = raw_input;
      }
      return cmd_ingest(cfg, kind, inputs, out_flag);
    }
    if (*index) return cmd_index(cfg, corpus_flag, out_flag);
    if (*search_cmd) return cmd_search(cfg, index_flag, query);
    if (*decompose) return cmd_decompose(cfg);
    if (*retrieve) return cmd_retrieve(cfg);
    if (*assemble) return cmd_assemble(cfg);
    if (*train_cmd) return cmd_train(cfg);
    if (*predict_cmd) return cmd_predict(cfg, claim_id, split_flag);
    if (*evaluate_cmd) return cmd_evaluate(cfg);
    if (*ablate) return cmd_ablate(cfg, out_flag);
    if (*report) return cmd_report(cfg, in_flag, out_flag);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
