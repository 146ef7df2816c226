#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numclaim/classify.hpp"
#include "numclaim/eval.hpp"
#include "numclaim/pipeline.hpp"

namespace numclaim {

struct AblationCell {
  DigitMode mode;
  ContextBudget budget;
  std::size_t m = 1;
  LossKind loss = LossKind::CrossEntropy;

  bool operator==(const AblationCell&) const = default;
  // Canonical report order: digit grouping, m, budget, loss.
  std::weak_ordering operator<=>(const AblationCell& other) const;
  std::string name() const;
};

// {L2R, R2L} x {(m=1, 256), (m=3, 1024)}
std::vector<AblationCell> canonical_grid(LossKind loss = LossKind::CrossEntropy);

struct CellResult {
  AblationCell cell;
  MetricsReport metrics;
  double runtime_minutes = 0.0;
  std::size_t epochs = 0;
  double time_efficiency = 0.0;
  std::size_t max_evidences_per_claim = 0;
  std::size_t truncated_inputs = 0;
  double mean_tokens = 0.0;
};

struct AblationReport {
  std::vector<CellResult> cells;
};

struct PreparedClaim {
  Claim claim;
  SubClaimSet sub_claims;
  ClaimCandidates candidates;
};

struct PreparedData {
  std::vector<PreparedClaim> train;
  std::vector<PreparedClaim> validation;
  EvidenceTexts texts;
};

/// Pairs labeled train/validation claims with their decompositions and
/// reranked candidates. Test-split and unlabeled claims are skipped.
PreparedData prepare_data(std::span<const Claim> claims, const DecompositionCache& cache,
                          const InvertedIndex& index, std::size_t k, PairScorer& scorer,
                          const TextFetcher& fetch, std::size_t max_in_flight = 4);

enum class TimingMode { Wall, Off };

struct AblationOptions {
  TrainConfig train;
  std::size_t feature_dim = kFeatureDim;
  std::size_t max_parallel_cells = 1;
  TimingMode timing = TimingMode::Wall;
  // Scale for the training-label prior bias applied at prediction; nullopt = none.
  std::optional<double> prior_bias_scale;
  // When set, cells skip training and ask the NLI server instead (epochs = 0).
  NliClient* nli = nullptr;
};

/// Duplicate cells are dropped with a warning; results come back in
/// canonical cell order whatever the parallelism. A failing cell aborts the
/// run with a DataError naming the cell.
AblationReport run_ablation(std::vector<AblationCell> grid, const PreparedData& data,
                            const AblationOptions& options);

std::string report_to_json(const AblationReport& report);
AblationReport report_from_json(std::string_view text);
// Two-decimal aligned table.
std::string report_to_table(const AblationReport& report);
std::string report_to_csv(const AblationReport& report);

}  // namespace numclaim
