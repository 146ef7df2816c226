#include "numclaim/eval.hpp"

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "numclaim/error.hpp"

namespace numclaim {

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::gold_count(VeracityLabel label) const noexcept {
  const auto& row = counts[class_index(label)];
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::predicted_count(VeracityLabel label) const noexcept {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row[class_index(label)];
  return t;
}

std::uint64_t ConfusionMatrix::correct() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix confusion(std::span<const VeracityLabel> golds, std::span<const VeracityLabel> preds) {
  if (golds.size() != preds.size())
    throw DataError("confusion: " + std::to_string(golds.size()) + " gold labels vs " +
                    std::to_string(preds.size()) + " predictions");
  if (golds.empty()) throw DataError("confusion: no labels to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < golds.size(); ++i) ++cm.counts[class_index(golds[i])][class_index(preds[i])];
  return cm;
}

double f1_score(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * (precision * recall) / denom;
}

double macro_average(std::span<const double> class_f1) {
  if (class_f1.empty()) throw DataError("macro average over zero classes");
  return std::accumulate(class_f1.begin(), class_f1.end(), 0.0) / static_cast<double>(class_f1.size());
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, VeracityLabel label) {
  if (cm.total() == 0) throw DataError("metrics of an empty confusion matrix");
  const auto i = class_index(label);
  const double tp = static_cast<double>(cm.counts[i][i]);
  const auto predicted = cm.predicted_count(label);
  const auto gold = cm.gold_count(label);
  ClassMetrics m;
  m.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
  m.recall = gold == 0 ? 0.0 : tp / static_cast<double>(gold);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

double class_f1(const ConfusionMatrix& cm, VeracityLabel label) { return class_metrics(cm, label).f1; }

double macro_f1(const ConfusionMatrix& cm) {
  std::array<double, kNumClasses> f1s{};
  for (auto l : kAllLabels) f1s[class_index(l)] = class_f1(cm, l);
  return macro_average(f1s);
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.correct()) / static_cast<double>(cm.total());
}

MetricsReport evaluate(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.confusion = cm;
  std::array<double, kNumClasses> f1s{};
  for (auto l : kAllLabels) {
    r.per_class[class_index(l)] = class_metrics(cm, l);
    f1s[class_index(l)] = r.per_class[class_index(l)].f1;
  }
  r.macro_f1 = macro_average(f1s);
  r.accuracy = accuracy(cm);
  return r;
}

MetricsReport evaluate(std::span<const VeracityLabel> golds, std::span<const VeracityLabel> preds) {
  return evaluate(confusion(golds, preds));
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["macro_f1"] = report.macro_f1;
  j["accuracy"] = report.accuracy;
  j["n_classes"] = report.n_classes;
  for (auto l : kAllLabels) {
    const auto& m = report.per_class[class_index(l)];
    j["per_class"][std::string(to_string(l))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  }
  j["confusion"] = report.confusion.counts;
  return j.dump(2);
}

double time_efficiency(double runtime_minutes, std::uint64_t epochs) {
  if (epochs == 0) throw DataError("time efficiency needs at least one epoch");
  if (!(runtime_minutes >= 0.0) || !std::isfinite(runtime_minutes))
    throw DataError("time efficiency needs a finite runtime >= 0");
  return runtime_minutes / static_cast<double>(epochs);
}

}  // namespace numclaim
