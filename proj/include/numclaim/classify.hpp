#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numclaim/corpus.hpp"
#include "numclaim/rerank.hpp"
#include "numclaim/simd/kernels.hpp"
#include "numclaim/tokenize.hpp"
#include "numclaim/transport.hpp"

namespace numclaim {

inline constexpr std::size_t kFeatureDim = std::size_t{1} << 18;
inline constexpr double kProbabilityFloor = 1e-12;

using ClassVector = std::array<double, kNumClasses>;

// FNV-1a, 64 bit. Stable across runs and platforms.
std::uint64_t stable_hash(std::string_view bytes) noexcept;

/// Sparse term-frequency vector: indices ascending and unique, values are
/// count / stream length.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  bool operator==(const FeatureVector&) const = default;
};

FeatureVector featurize(std::span<const std::string> tokens, std::size_t dim = kFeatureDim);
FeatureVector featurize(const AssembledInput& input, std::size_t dim = kFeatureDim);

enum class LossKind : std::uint8_t { CrossEntropy, Focal };

std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view text);

struct FocalLossConfig {
  double gamma = 2.0;                // >= 0
  ClassVector alpha{1.0, 1.0, 1.0};  // >= 0, indexed by class

  bool operator==(const FocalLossConfig&) const = default;
};

void validate(const FocalLossConfig& cfg);
FocalLossConfig cross_entropy_config() noexcept;

// (1 / f_c) normalized to mean 1; classes without examples get 0.
ClassVector inverse_frequency_alpha(const std::array<std::uint64_t, kNumClasses>& counts);

ClassVector softmax(const ClassVector& logits) noexcept;

/// -alpha_g * (1 - p_g)^gamma * ln(p_g). p_g below kProbabilityFloor is
/// clamped and counted (see probability_clamp_count). Throws
/// std::invalid_argument when probs do not sum to 1 within 1e-9.
double loss(const ClassVector& probs, VeracityLabel gold, const FocalLossConfig& cfg);

// d loss(softmax(logits)) / d logits, closed form.
ClassVector loss_gradient(const ClassVector& logits, VeracityLabel gold, const FocalLossConfig& cfg);

std::uint64_t probability_clamp_count() noexcept;

/// bias_c = scale * ln(p_c / (1 - p_c))
struct PriorBias {
  ClassVector priors{};
  double scale = 0.0;

  ClassVector biases() const;
  static PriorBias from_distribution(const LabelDistribution& dist, double scale);
};

/// Linear model over hashed features. Learning rate defaults suit this
/// model; transformer encoders are usually tuned near 2e-5 instead.
struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_epochs = 200;
  std::size_t patience = 2;
  std::size_t batch_size = 32;
  LossKind loss = LossKind::CrossEntropy;
  double gamma = 2.0;
  std::optional<ClassVector> alpha;  // focal only; default inverse class frequency
  std::uint64_t seed = 42;
};

void validate(const TrainConfig& cfg);

struct ClassifierModel {
  std::size_t dim = kFeatureDim;
  std::vector<double> weights;  // kNumClasses rows of `dim`, class order
  ClassVector biases{};
  DigitMode mode;
  ContextBudget budget;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::CrossEntropy;
  FocalLossConfig focal = cross_entropy_config();

  std::span<const double> row(std::size_t cls) const {
    return std::span(weights).subspan(cls * dim, dim);
  }
  std::span<double> row(std::size_t cls) { return std::span(weights).subspan(cls * dim, dim); }
  bool operator==(const ClassifierModel&) const = default;
};

ClassifierModel make_model(std::size_t dim, const DigitMode& mode, const ContextBudget& budget);

// Featurizes an input after checking it was assembled for this model.
FeatureVector featurize_for(const ClassifierModel& model, const AssembledInput& input);

struct Example {
  FeatureVector features;
  VeracityLabel label = VeracityLabel::False;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_macro_f1 = 0.0;
};

struct TrainResult {
  ClassifierModel model;  // best-validation snapshot
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  std::vector<EpochStats> history;
};

/// Mini-batch gradient descent, Fisher-Yates shuffled per epoch from `seed`.
/// Stops after `patience` epochs without a strictly better validation
/// macro-F1 or at max_epochs. An empty validation set means the training
/// set is used for early stopping.
TrainResult train(std::span<const Example> train_set, std::span<const Example> validation,
                  const TrainConfig& cfg, const DigitMode& mode = {}, const ContextBudget& budget = {},
                  std::size_t dim = kFeatureDim, const simd::Kernels& kernels = simd::active());

struct Prediction {
  VeracityLabel label = VeracityLabel::True;
  ClassVector probs{};

  bool operator==(const Prediction&) const = default;
};

ClassVector logits(const ClassifierModel& model, const FeatureVector& features,
                   const simd::Kernels& kernels = simd::active());

// Argmax ties resolve to the earlier class.
Prediction predict(const ClassifierModel& model, const FeatureVector& features,
                   const std::optional<PriorBias>& bias = std::nullopt,
                   const simd::Kernels& kernels = simd::active());

Prediction prediction_from_probs(const ClassVector& probs);

// Model file: magic, version, JSON header, biases, dense weights.
std::string serialize_model(const ClassifierModel& model);
ClassifierModel deserialize_model(std::string_view bytes);
void write_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel read_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// External NLI server: POST <base>/classify {"text"} ->
// {"probs": {"True": p, "False": p, "Conflicting": p}}

struct NliServiceConfig {
  std::string base_url;
  std::string token;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;

  // NLI_URL / NLI_TOKEN
  static NliServiceConfig from_env();
};

class NliClient {
 public:
  // transport == nullptr means offline: every call fails.
  NliClient(HttpTransport* transport, NliServiceConfig config);
  Prediction classify(std::string_view text);

  // Validates probabilities in [0,1] summing to 1 within 1e-6.
  static Prediction parse_response(std::string_view body);

 private:
  HttpTransport* transport_;
  NliServiceConfig config_;
};

Prediction nli_server_predict(NliClient& client, const AssembledInput& input);

}  // namespace numclaim
