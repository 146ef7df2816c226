// Acceptance suite: one PASS/FAIL line per criterion, each under a runtime cap.
// Usage: acceptance [--only N]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <bit>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/fmt/fmt.h>

#include "bm25_oracle.hpp"
#include "json.hpp"
#include "numclaim/ablation.hpp"
#include "numclaim/classify.hpp"
#include "numclaim/eval.hpp"
#include "numclaim/reference_runs.hpp"
#include "numclaim/rerank.hpp"
#include "numclaim/retrieval.hpp"
#include "numclaim/tokenize.hpp"
#include "oracles.hpp"
#include "selection_gen.hpp"
#include "test_support.hpp"

using namespace numclaim;
using namespace numclaim::testing;

namespace {

// Collects failure details; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 10) failures.push_back(what);
    if (!ok && failures.size() == 10) failures.push_back("...");
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Check&)> body;
};

void macro_f1_reconstruction(Check& c) {
  auto check_rows = [&](const auto& rows) {
    for (const auto& r : rows) {
      const double f1s[] = {r.f1_true, r.f1_false, r.f1_conflicting};
      const double got = macro_average(f1s);
      c.expect(std::abs(got - r.macro_f1) <= 0.005 + 1e-12,
               fmt::format("{}: mean of class F1 = {:.4f}, reported {:.2f}", r.run, got, r.macro_f1));
    }
  };
  check_rows(reference::kValidationScores);
  check_rows(reference::kTestScores);
}

void time_efficiency_reconstruction(Check& c) {
  for (const auto& r : reference::kTiming) {
    const double got = time_efficiency(r.runtime_minutes, r.epochs);
    c.expect(std::abs(got - r.time_efficiency) <= 0.01 + 1e-12,
             fmt::format("{}: {:.2f}/{} = {:.4f}, reported {:.2f}", r.run, r.runtime_minutes, r.epochs, got,
                         r.time_efficiency));
  }
}

void bm25_oracle_equivalence(Check& c) {
  const auto docs = load_evidence(fixtures_dir() / "toy" / "evidence.jsonl");
  c.expect(docs.size() == 200, fmt::format("fixture has {} docs, expected 200", docs.size()));
  const Bm25Params params;
  const auto index = build_index(std::span<const EvidenceDoc>(docs), params);
  const Bm25Oracle oracle(docs, params.k1, params.b);

  std::ifstream in(fixtures_dir() / "toy" / "queries.txt");
  std::size_t n = 0;
  for (std::string q; std::getline(in, q);) {
    if (q.empty()) continue;
    ++n;
    const auto got = search(index, q, 10);
    const auto want = oracle.search(q, 10);
    c.expect(got.size() == want.size(), fmt::format("'{}': {} hits vs oracle {}", q, got.size(), want.size()));
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
      c.expect(got[i].doc_id == want[i].doc_id,
               fmt::format("'{}' rank {}: {} vs oracle {}", q, i, got[i].doc_id, want[i].doc_id));
      c.expect(std::abs(got[i].bm25_score - want[i].score) <= 1e-9,
               fmt::format("'{}' rank {}: score {} vs oracle {}", q, i, got[i].bm25_score, want[i].score));
    }
  }
  c.expect(n == 25, fmt::format("{} queries, expected 25", n));
}

void tokenizer_properties(Check& c) {
  std::mt19937_64 rng(42);
  const DigitMode r2l{DigitGrouping::R2L, 3}, l2r{DigitGrouping::L2R, 3};
  for (int i = 0; i < 10000; ++i) {
    const std::size_t len = 1 + rng() % 40;
    std::string s;
    for (std::size_t j = 0; j < len; ++j) s.push_back(static_cast<char>('0' + rng() % 10));

    const auto a = tokenize(s, r2l).tokens;
    const auto b = tokenize(s, l2r).tokens;
    std::string ja, jb;
    for (const auto& t : a) ja += t;
    for (const auto& t : b) jb += t;
    c.expect(ja == s, "R2L concatenation differs for " + s);
    c.expect(jb == s, "L2R concatenation differs for " + s);
    for (std::size_t k = 1; k < a.size(); ++k) c.expect(a[k].size() == 3, "R2L inner group not 3 in " + s);
    c.expect(!a.empty() && a[0].size() >= 1 && a[0].size() <= 3, "R2L first group out of range in " + s);
    for (std::size_t k = 0; k + 1 < b.size(); ++k) c.expect(b[k].size() == 3, "L2R inner group not 3 in " + s);
    c.expect(!b.empty() && b.back().size() >= 1 && b.back().size() <= 3, "L2R last group out of range in " + s);
    c.expect(a.size() == b.size(), "token counts differ between modes for " + s);
    c.expect(a.size() == (len + 2) / 3, "token count is not ceil(len/3) for " + s);
  }
}

void focal_loss_correctness(Check& c) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-4, 4), a(0.2, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = softmax({u(rng), u(rng), u(rng)});
    const auto gold = label_from_index(rng() % 3);
    const double got = loss(p, gold, {0.0, {1, 1, 1}});
    const double ce = -std::log(p[class_index(gold)]);
    c.expect(std::abs(got - ce) <= 1e-12, fmt::format("gamma=0 loss {} vs cross-entropy {}", got, ce));
  }
  for (int i = 0; i < 100; ++i) {
    const FocalLossConfig f{static_cast<double>(rng() % 4) * 0.75, {a(rng), a(rng), a(rng)}};
    const ClassVector z{u(rng), u(rng), u(rng)};
    const auto gold = label_from_index(rng() % 3);
    const double err = relative_error(loss_gradient(z, gold, f), finite_difference_gradient(z, gold, f, 1e-5));
    c.expect(err < 1e-6, fmt::format("gradient rel. err {:.3e} at gamma {}", err, f.gamma));
  }
  const double point = loss({0.4, 0.3, 0.3}, VeracityLabel::True, {2.0, {1, 1, 1}});
  c.expect(std::abs(point - kFocalGamma2P04) <= 1e-6,
           fmt::format("loss(gamma=2, p=0.4) = {:.10f}, expected {:.10f}", point, kFocalGamma2P04));
}

void prior_bias_arithmetic(Check& c) {
  const PriorBias pb{{reference::kPriorTrue, reference::kPriorFalse, reference::kPriorConflicting}, 1.0};
  const auto b = pb.biases();
  for (std::size_t i = 0; i < kNumClasses; ++i)
    c.expect(std::abs(b[i] - kPublishedPriorLogOdds[i]) <= 1e-5,
             fmt::format("bias[{}] = {:.7f}, expected {:.7f}", i, b[i], kPublishedPriorLogOdds[i]));

  auto model = make_model(64, {}, {});
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (auto& w : model.weights) w = g(rng);
  for (auto& x : model.biases) x = g(rng);
  const PriorBias zero{pb.priors, 0.0};
  for (int i = 0; i < 1000; ++i) {
    FeatureVector fv;
    for (std::uint32_t k = 0; k < 64; k += 1 + rng() % 5) {
      fv.indices.push_back(k);
      fv.values.push_back(g(rng));
    }
    const auto plain = predict(model, fv);
    const auto with_zero = predict(model, fv, zero);
    bool same = plain.label == with_zero.label;
    for (std::size_t k = 0; k < kNumClasses; ++k)
      same = same && std::bit_cast<std::uint64_t>(plain.probs[k]) == std::bit_cast<std::uint64_t>(with_zero.probs[k]);
    c.expect(same, "alpha=0 changed a prediction");
    const PriorBias uniform{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0 + std::abs(g(rng))};
    c.expect(predict(model, fv, uniform).label == plain.label, "uniform priors changed the argmax");
  }
}

void trainability(Check& c) {
  const auto data = load_separable((fixtures_dir() / "separable.jsonl").string());
  c.expect(data.size() == 60, fmt::format("separable fixture has {} rows", data.size()));
  TrainConfig cfg;
  cfg.seed = 42;
  cfg.max_epochs = 50;
  const auto a = train(data, {}, cfg, {}, {}, 8);
  const auto b = train(data, {}, cfg, {}, {}, 8);
  std::vector<VeracityLabel> gold, pred;
  for (const auto& ex : data) {
    gold.push_back(ex.label);
    pred.push_back(predict(a.model, ex.features).label);
  }
  const double f1 = evaluate(gold, pred).macro_f1;
  c.expect(f1 >= 0.95, fmt::format("macro-F1 {:.4f} < 0.95", f1));
  c.expect(a.epochs_run <= 50, fmt::format("{} epochs", a.epochs_run));

  TempDir dir;
  write_model(a.model, dir / "a.bin");
  write_model(b.model, dir / "b.bin");
  c.expect(read_file(dir / "a.bin") == read_file(dir / "b.bin"), "model files differ between identical runs");
}

void end_to_end_ablation(Check& c) {
  TempDir dir;
  const auto config = (fixtures_dir() / "toy.toml").string();
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("ablation" + std::to_string(run) + ".json");
    const auto r = run_cli("ablate --offline --seed 42 -c '" + config + "' -o '" + out.string() + "'");
    c.expect(r.exit_code == 0, fmt::format("ablate exited {}: {}", r.exit_code, r.output));
    outputs[run] = read_file(out);
  }
  c.expect(!outputs[0].empty() && outputs[0] == outputs[1], "two seeded runs produced different reports");
  if (outputs[0].empty()) return;

  const auto cells = nlohmann::json::parse(outputs[0]);
  const std::vector<std::string> names{"Short-Context", "Long-Context", "R2L Short-Context", "R2L Long-Context"};
  c.expect(cells.size() == 4, fmt::format("{} cells, expected 4", cells.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(cells.size(), 4); ++i) {
    const auto& cell = cells[i];
    c.expect(cell["run"] == names[i], "cell " + std::to_string(i) + " is " + cell["run"].dump());
    for (const char* k : {"macro_f1", "f1_true", "f1_false", "f1_conflicting", "accuracy"}) {
      const double v = cell[k].get<double>();
      c.expect(v >= 0.0 && v <= 1.0, fmt::format("{} {} = {}", names[i], k, v));
    }
    const auto m = cell["m"].get<std::size_t>();
    const auto max_ev = cell["max_evidences_per_claim"].get<std::size_t>();
    c.expect(max_ev <= 3 * m, fmt::format("{}: {} evidences with m={}", names[i], max_ev, m));
  }
}

void selection_contract(Check& c) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 5000; ++i) {
    const auto lists = random_candidate_lists(rng);
    const std::size_t m = 1 + rng() % 3;
    const auto sel = select_top_m(lists, m);
    c.expect(sel.total() <= 3 * m, fmt::format("{} selected with m={}", sel.total(), m));
    std::set<std::string> seen;
    for (std::size_t s = 0; s < sel.per_sub_claim.size(); ++s) {
      const auto& list = sel.per_sub_claim[s];
      c.expect(list.size() <= m, "sub-claim over its quota");
      for (std::size_t k = 0; k < list.size(); ++k) {
        c.expect(seen.insert(list[k].doc_id).second, "duplicate doc " + list[k].doc_id);
        c.expect(list[k].sub_claim_index == s, "evidence filed under the wrong sub-claim");
        if (k > 0)
          c.expect(*list[k - 1].rerank_score > *list[k].rerank_score ||
                       (*list[k - 1].rerank_score == *list[k].rerank_score && list[k - 1].doc_id < list[k].doc_id),
                   "sub-claim list not sorted");
      }
    }
  }
}

const std::vector<Criterion> kCriteria{
    {1, "macro-F1 reconstruction from per-class F1", 1.0, macro_f1_reconstruction},
    {2, "time-efficiency reconstruction", 1.0, time_efficiency_reconstruction},
    {3, "BM25 matches brute-force scoring", 5.0, bm25_oracle_equivalence},
    {4, "tokenizer digit-grouping properties", 5.0, tokenizer_properties},
    {5, "focal loss and gradient", 5.0, focal_loss_correctness},
    {6, "prior-bias arithmetic", 5.0, prior_bias_arithmetic},
    {7, "trainability on separable fixture", 30.0, trainability},
    {8, "offline end-to-end ablation", 120.0, end_to_end_ablation},
    {9, "evidence selection contract", 5.0, selection_contract},
};

bool run(const Criterion& cr) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    cr.body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > cr.limit_seconds) c.failures.push_back(fmt::format("took {:.2f} s, limit {:.0f} s", secs, cr.limit_seconds));
  const bool ok = c.failures.empty();
  std::cout << fmt::format("{} criterion {}: {} ({:.3f} s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title, secs);
  for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  bool all_ok = true;
  bool ran = false;
  for (const auto& cr : kCriteria) {
    if (only != 0 && cr.id != only) continue;
    ran = true;
    all_ok = run(cr) && all_ok;
  }
  if (!ran) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all_ok ? 0 : 1;
}
