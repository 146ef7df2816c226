#include "numclaim/ablation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/parallel.hpp"

namespace numclaim {

using nlohmann::json;

std::weak_ordering AblationCell::operator<=>(const AblationCell& o) const {
  auto key = [](const AblationCell& c) {
    return std::tuple(static_cast<int>(c.mode.grouping), c.mode.group_size, c.m, c.budget.max_tokens,
                      static_cast<int>(c.loss));
  };
  return key(*this) <=> key(o);
}

std::string AblationCell::name() const {
  std::string prefix;
  if (mode.grouping == DigitGrouping::R2L) prefix = "R2L ";
  if (mode.grouping == DigitGrouping::None) prefix = "NoGroup ";
  std::string body;
  if (m == 1 && budget.max_tokens == 256)
    body = "Short-Context";
  else if (m == 3 && budget.max_tokens == 1024)
    body = "Long-Context";
  else
    body = "m=" + std::to_string(m) + "/" + std::to_string(budget.max_tokens);
  if (loss == LossKind::Focal) body += " (focal)";
  return prefix + body;
}

std::vector<AblationCell> canonical_grid(LossKind loss) {
  std::vector<AblationCell> grid;
  for (auto g : {DigitGrouping::L2R, DigitGrouping::R2L}) {
    grid.push_back({DigitMode{g, 3}, kShortContext, 1, loss});
    grid.push_back({DigitMode{g, 3}, kLongContext, 3, loss});
  }
  return grid;
}

namespace {

struct CellInputs {
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<std::string> validation_text;
  std::size_t max_evidences = 0;
  std::size_t truncated = 0;
  std::size_t tokens = 0;
  std::size_t inputs = 0;
};

CellInputs build_inputs(const AblationCell& cell, const PreparedData& data, std::size_t dim) {
  CellInputs out;
  auto add = [&](const PreparedClaim& pc, std::vector<Example>& dst, bool keep_text) {
    if (!pc.claim.label) return;
    const auto rec = assemble_claim(pc.claim, pc.sub_claims, pc.candidates, cell.m, data.texts,
                                    cell.budget, cell.mode);
    out.max_evidences = std::max(out.max_evidences, rec.evidence_ids.size());
    out.truncated += rec.input.truncated ? 1 : 0;
    out.tokens += rec.input.token_count;
    ++out.inputs;
    dst.push_back(Example{featurize(rec.input, dim), *pc.claim.label});
    if (keep_text) out.validation_text.push_back(rec.input.text);
  };
  for (const auto& pc : data.train) add(pc, out.train, false);
  for (const auto& pc : data.validation) add(pc, out.validation, true);
  return out;
}

CellResult run_cell(const AblationCell& cell, const PreparedData& data, const AblationOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  auto inputs = build_inputs(cell, data, opt.feature_dim);
  if (inputs.validation.empty()) throw DataError("no labeled validation claims");

  CellResult r;
  r.cell = cell;
  r.max_evidences_per_claim = inputs.max_evidences;
  r.truncated_inputs = inputs.truncated;
  r.mean_tokens = inputs.inputs ? static_cast<double>(inputs.tokens) / static_cast<double>(inputs.inputs) : 0.0;

  std::vector<VeracityLabel> gold, pred;
  for (const auto& ex : inputs.validation) gold.push_back(ex.label);

  if (opt.nli) {
    for (const auto& text : inputs.validation_text) pred.push_back(opt.nli->classify(text).label);
    r.epochs = 0;
  } else {
    if (inputs.train.empty()) throw DataError("no labeled training claims");
    TrainConfig tc = opt.train;
    tc.loss = cell.loss;
    const auto trained = train(inputs.train, inputs.validation, tc, cell.mode, cell.budget, opt.feature_dim);
    std::optional<PriorBias> bias;
    if (opt.prior_bias_scale) {
      std::vector<Claim> labeled;
      for (const auto& pc : data.train) labeled.push_back(pc.claim);
      bias = PriorBias::from_distribution(label_distribution(labeled), *opt.prior_bias_scale);
    }
    for (const auto& ex : inputs.validation) pred.push_back(predict(trained.model, ex.features, bias).label);
    r.epochs = trained.epochs_run;
  }
  r.metrics = evaluate(gold, pred);

  if (opt.timing == TimingMode::Wall) {
    const std::chrono::duration<double, std::ratio<60>> elapsed = std::chrono::steady_clock::now() - start;
    r.runtime_minutes = elapsed.count();
  }
  r.time_efficiency = r.epochs > 0 ? time_efficiency(r.runtime_minutes, r.epochs) : 0.0;
  return r;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

PreparedData prepare_data(std::span<const Claim> claims, const DecompositionCache& cache,
                          const InvertedIndex& index, std::size_t k, PairScorer& scorer,
                          const TextFetcher& fetch, std::size_t max_in_flight) {
  std::vector<Claim> used;
  for (const auto& c : claims)
    if (c.label && c.split != Split::Test) used.push_back(c);
  const auto subs = load_sub_claims_for(used, cache);
  const auto cands = retrieve_candidates(used, subs, index, k, scorer, fetch, max_in_flight);

  std::vector<std::string> ids;
  for (const auto& cc : cands)
    for (const auto& sc : cc.sub_claims)
      for (const auto& e : sc.candidates) ids.push_back(e.doc_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  PreparedData data;
  data.texts = fetch(ids);
  for (std::size_t i = 0; i < used.size(); ++i) {
    auto& dst = used[i].split == Split::Train ? data.train : data.validation;
    dst.push_back(PreparedClaim{used[i], subs[i], cands[i]});
  }
  return data;
}

AblationReport run_ablation(std::vector<AblationCell> grid, const PreparedData& data,
                            const AblationOptions& options) {
  std::sort(grid.begin(), grid.end());
  const auto before = grid.size();
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() != before) spdlog::warn("ablation: dropped {} duplicate cells", before - grid.size());
  if (grid.empty()) throw ConfigError("ablation grid is empty");
  if (data.validation.empty()) throw DataError("ablation needs a validation split");

  AblationReport report;
  report.cells.resize(grid.size());
  bounded_parallel_for(grid.size(), options.max_parallel_cells, [&](std::size_t i) {
    try {
      report.cells[i] = run_cell(grid[i], data, options);
    } catch (const Error& e) {
      throw DataError("ablation cell '" + grid[i].name() + "' failed: " + e.what());
    }
  });
  return report;
}

std::string report_to_json(const AblationReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    nlohmann::ordered_json j;
    j["run"] = c.cell.name();
    j["mode"] = std::string(to_string(c.cell.mode.grouping));
    j["group_size"] = c.cell.mode.group_size;
    j["budget"] = c.cell.budget.max_tokens;
    j["m"] = c.cell.m;
    j["loss"] = std::string(to_string(c.cell.loss));
    j["macro_f1"] = c.metrics.macro_f1;
    j["f1_true"] = c.metrics.f1(VeracityLabel::True);
    j["f1_false"] = c.metrics.f1(VeracityLabel::False);
    j["f1_conflicting"] = c.metrics.f1(VeracityLabel::Conflicting);
    j["accuracy"] = c.metrics.accuracy;
    j["runtime_min"] = c.runtime_minutes;
    j["epochs"] = c.epochs;
    j["time_efficiency"] = c.time_efficiency;
    j["max_evidences_per_claim"] = c.max_evidences_per_claim;
    j["truncated_inputs"] = c.truncated_inputs;
    j["mean_tokens"] = c.mean_tokens;
    j["confusion"] = c.metrics.confusion.counts;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

AblationReport report_from_json(std::string_view text) {
  AblationReport report;
  try {
    const json arr = json::parse(text);
    if (!arr.is_array()) throw DataError("ablation report must be a JSON array of cells");
    for (const auto& j : arr) {
      CellResult c;
      const auto g = parse_digit_grouping(j.at("mode").get<std::string>());
      const auto l = parse_loss_kind(j.at("loss").get<std::string>());
      if (!g || !l) throw DataError("ablation report has an unknown mode or loss");
      c.cell = AblationCell{DigitMode{*g, j.value("group_size", std::size_t{3})},
                            ContextBudget{j.at("budget").get<std::size_t>()}, j.at("m").get<std::size_t>(), *l};
      c.metrics.macro_f1 = j.at("macro_f1").get<double>();
      c.metrics.accuracy = j.at("accuracy").get<double>();
      c.metrics.per_class[class_index(VeracityLabel::True)].f1 = j.at("f1_true").get<double>();
      c.metrics.per_class[class_index(VeracityLabel::False)].f1 = j.at("f1_false").get<double>();
      c.metrics.per_class[class_index(VeracityLabel::Conflicting)].f1 = j.at("f1_conflicting").get<double>();
      if (j.contains("confusion")) {
        c.metrics.confusion.counts = j.at("confusion").get<decltype(c.metrics.confusion.counts)>();
        if (c.metrics.confusion.total() > 0) {
          for (auto lab : kAllLabels)
            c.metrics.per_class[class_index(lab)] = class_metrics(c.metrics.confusion, lab);
        }
      }
      c.runtime_minutes = j.at("runtime_min").get<double>();
      c.epochs = j.at("epochs").get<std::size_t>();
      c.time_efficiency = j.at("time_efficiency").get<double>();
      c.max_evidences_per_claim = j.value("max_evidences_per_claim", std::size_t{0});
      c.truncated_inputs = j.value("truncated_inputs", std::size_t{0});
      c.mean_tokens = j.value("mean_tokens", 0.0);
      report.cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ablation report: ") + e.what());
  }
  return report;
}

std::string report_to_table(const AblationReport& report) {
  const std::vector<std::string> header{"Run",          "Macro-a. F1",    "Acc.",    "False F1",
                                        "Conflicting F1", "True F1",     "Runtime (min.)", "Epochs",
                                        "Time Eff."};
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : report.cells) {
    rows.push_back({c.cell.name(), fixed2(c.metrics.macro_f1), fixed2(c.metrics.accuracy),
                    fixed2(c.metrics.f1(VeracityLabel::False)),
                    fixed2(c.metrics.f1(VeracityLabel::Conflicting)),
                    fixed2(c.metrics.f1(VeracityLabel::True)), fixed2(c.runtime_minutes),
                    std::to_string(c.epochs), fixed2(c.time_efficiency)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    width[i] = header[i].size();
    for (const auto& r : rows) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << " | ";
      if (i == 0)
        os << cells[i] << std::string(width[i] - cells[i].size(), ' ');
      else
        os << std::string(width[i] - cells[i].size(), ' ') << cells[i];
    }
    os << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 3 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string report_to_csv(const AblationReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "run,mode,budget,m,loss,macro_f1,accuracy,f1_false,f1_conflicting,f1_true,runtime_min,epochs,"
        "time_efficiency\n";
  for (const auto& c : report.cells) {
    os << '"' << c.cell.name() << "\"," << to_string(c.cell.mode.grouping) << ',' << c.cell.budget.max_tokens
       << ',' << c.cell.m << ',' << to_string(c.cell.loss) << ',' << c.metrics.macro_f1 << ','
       << c.metrics.accuracy << ',' << c.metrics.f1(VeracityLabel::False) << ','
       << c.metrics.f1(VeracityLabel::Conflicting) << ',' << c.metrics.f1(VeracityLabel::True) << ','
       << c.runtime_minutes << ',' << c.epochs << ',' << c.time_efficiency << '\n';
  }
  return os.str();
}

}  // namespace numclaim
