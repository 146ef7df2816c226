#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "numclaim/corpus.hpp"

namespace numclaim {

// rows = gold, columns = predicted, class order (True, False, Conflicting)
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t gold_count(VeracityLabel label) const noexcept;       // row sum
  std::uint64_t predicted_count(VeracityLabel label) const noexcept;  // column sum
  std::uint64_t correct() const noexcept;                             // trace
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws DataError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const VeracityLabel> golds, std::span<const VeracityLabel> preds);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 2PR / (P + R), 0 when P + R == 0.
double f1_score(double precision, double recall) noexcept;
// Unweighted mean over the given class F1 values.
double macro_average(std::span<const double> class_f1);

ClassMetrics class_metrics(const ConfusionMatrix& cm, VeracityLabel label);
double class_f1(const ConfusionMatrix& cm, VeracityLabel label);
double macro_f1(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t n_classes = kNumClasses;
  ConfusionMatrix confusion;

  double f1(VeracityLabel label) const noexcept { return per_class[class_index(label)].f1; }
};

MetricsReport evaluate(const ConfusionMatrix& cm);
MetricsReport evaluate(std::span<const VeracityLabel> golds, std::span<const VeracityLabel> preds);

std::string metrics_to_json(const MetricsReport& report);

// runtime / epochs; throws DataError when epochs == 0 or runtime < 0.
double time_efficiency(double runtime_minutes, std::uint64_t epochs);

}  // namespace numclaim
