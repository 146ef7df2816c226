#include "numclaim/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/eval.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

std::size_t argmax(const ClassVector& v) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

std::uint64_t stable_hash(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

FeatureVector featurize(std::span<const std::string> tokens, std::size_t dim) {
  FeatureVector fv;
  if (tokens.empty()) return fv;
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& t : tokens) ++counts[static_cast<std::uint32_t>(stable_hash(t) % dim)];
  const double len = static_cast<double>(tokens.size());
  fv.indices.reserve(counts.size());
  fv.values.reserve(counts.size());
  for (const auto& [idx, c] : counts) {
    fv.indices.push_back(idx);
    fv.values.push_back(static_cast<double>(c) / len);
  }
  return fv;
}

FeatureVector featurize(const AssembledInput& input, std::size_t dim) {
  return featurize(input.stream.tokens, dim);
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::Focal ? "focal" : "cross_entropy";
}

std::optional<LossKind> parse_loss_kind(std::string_view text) {
  if (text == "cross_entropy" || text == "ce") return LossKind::CrossEntropy;
  if (text == "focal") return LossKind::Focal;
  return std::nullopt;
}

void validate(const FocalLossConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw ConfigError("focal gamma must be >= 0");
  for (double a : cfg.alpha)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("focal alpha entries must be >= 0");
}

FocalLossConfig cross_entropy_config() noexcept { return FocalLossConfig{0.0, {1.0, 1.0, 1.0}}; }

ClassVector inverse_frequency_alpha(const std::array<std::uint64_t, kNumClasses>& counts) {
  ClassVector alpha{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    alpha[i] = counts[i] == 0 ? 0.0 : 1.0 / static_cast<double>(counts[i]);
    sum += alpha[i];
  }
  if (sum == 0.0) throw DataError("inverse-frequency alpha needs at least one labeled example");
  const double mean = sum / static_cast<double>(kNumClasses);
  for (double& a : alpha) a /= mean;
  return alpha;
}

ClassVector softmax(const ClassVector& logits) noexcept {
  const double mx = *std::max_element(logits.begin(), logits.end());
  ClassVector p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double loss(const ClassVector& probs, VeracityLabel gold, const FocalLossConfig& cfg) {
  const double total = probs[0] + probs[1] + probs[2];
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("loss: probabilities do not sum to 1");
  double p = probs[class_index(gold)];
  if (p < kProbabilityFloor) {
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    p = kProbabilityFloor;
  }
  const double modulator = cfg.gamma == 0.0 ? 1.0 : std::pow(1.0 - p, cfg.gamma);
  return -cfg.alpha[class_index(gold)] * modulator * std::log(p);
}

ClassVector loss_gradient(const ClassVector& logits, VeracityLabel gold, const FocalLossConfig& cfg) {
  const auto p = softmax(logits);
  const std::size_t g = class_index(gold);
  const double pt = std::max(p[g], kProbabilityFloor);
  const double q = 1.0 - pt;
  // d FL / d z_j = alpha * [gamma q^(gamma-1) pt ln(pt) - q^gamma] * (delta_gj - p_j)
  double slope = cfg.gamma == 0.0 ? -1.0 : -std::pow(q, cfg.gamma);
  if (cfg.gamma != 0.0 && q > 0.0) slope += cfg.gamma * std::pow(q, cfg.gamma - 1.0) * pt * std::log(pt);
  const double scale = cfg.alpha[g] * slope;
  ClassVector grad{};
  for (std::size_t j = 0; j < kNumClasses; ++j) grad[j] = scale * ((j == g ? 1.0 : 0.0) - p[j]);
  return grad;
}

std::uint64_t probability_clamp_count() noexcept { return g_clamp_count.load(); }

ClassVector PriorBias::biases() const {
  if (!(scale >= 0.0)) throw ConfigError("prior bias scale must be >= 0");
  ClassVector b{};
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!(priors[i] > 0.0 && priors[i] < 1.0))
      throw DataError("prior bias needs every prior strictly inside (0, 1)");
    b[i] = scale * std::log(priors[i] / (1.0 - priors[i]));
  }
  return b;
}

PriorBias PriorBias::from_distribution(const LabelDistribution& dist, double scale) {
  return PriorBias{dist.priors, scale};
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.loss == LossKind::Focal) {
    FocalLossConfig f{cfg.gamma, cfg.alpha.value_or(ClassVector{1.0, 1.0, 1.0})};
    validate(f);
  }
}

ClassifierModel make_model(std::size_t dim, const DigitMode& mode, const ContextBudget& budget) {
  if (dim == 0) throw ConfigError("feature dimension must be positive");
  ClassifierModel m;
  m.dim = dim;
  m.weights.assign(kNumClasses * dim, 0.0);
  m.mode = mode;
  m.budget = budget;
  return m;
}

FeatureVector featurize_for(const ClassifierModel& model, const AssembledInput& input) {
  if (input.mode != model.mode || input.budget != model.budget) {
    throw ConfigError("input for claim '" + input.claim_id + "' was assembled with digit mode " +
                      std::string(to_string(input.mode.grouping)) + "/budget " +
                      std::to_string(input.budget.max_tokens) + " but the model expects " +
                      std::string(to_string(model.mode.grouping)) + "/" +
                      std::to_string(model.budget.max_tokens));
  }
  return featurize(input, model.dim);
}

ClassVector logits(const ClassifierModel& model, const FeatureVector& features,
                   const simd::Kernels& kernels) {
  ClassVector z = model.biases;
  for (std::uint32_t idx : features.indices)
    if (idx >= model.dim) throw DataError("feature index exceeds model dimension");
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    z[c] += kernels.sparse_dot(model.row(c).data(), features.indices.data(), features.values.data(),
                               features.size());
  }
  return z;
}

Prediction prediction_from_probs(const ClassVector& probs) {
  return Prediction{label_from_index(argmax(probs)), probs};
}

Prediction predict(const ClassifierModel& model, const FeatureVector& features,
                   const std::optional<PriorBias>& bias, const simd::Kernels& kernels) {
  auto z = logits(model, features, kernels);
  if (bias) {
    const auto b = bias->biases();
    for (std::size_t c = 0; c < kNumClasses; ++c) z[c] += b[c];
  }
  const auto probs = softmax(z);
  return Prediction{label_from_index(argmax(z)), probs};
}

namespace {

double mean_loss(const ClassifierModel& model, std::span<const Example> data,
                 const FocalLossConfig& cfg, const simd::Kernels& k) {
  double total = 0.0;
  for (const auto& ex : data) total += loss(softmax(logits(model, ex.features, k)), ex.label, cfg);
  return total / static_cast<double>(data.size());
}

double macro_f1_on(const ClassifierModel& model, std::span<const Example> data, const simd::Kernels& k) {
  std::vector<VeracityLabel> gold, pred;
  gold.reserve(data.size());
  pred.reserve(data.size());
  for (const auto& ex : data) {
    gold.push_back(ex.label);
    pred.push_back(predict(model, ex.features, std::nullopt, k).label);
  }
  return macro_f1(confusion(gold, pred));
}

}  // namespace

TrainResult train(std::span<const Example> train_set, std::span<const Example> validation,
                  const TrainConfig& cfg, const DigitMode& mode, const ContextBudget& budget,
                  std::size_t dim, const simd::Kernels& kernels) {
  validate(cfg);
  if (train_set.empty()) throw DataError("train: empty dataset");
  std::array<std::uint64_t, kNumClasses> counts{};
  for (const auto& ex : train_set) ++counts[class_index(ex.label)];
  if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2)
    throw DataError("train: dataset has a single class");
  for (const auto& ex : train_set)
    for (auto idx : ex.features.indices)
      if (idx >= dim) throw DataError("train: feature index exceeds dimension");

  FocalLossConfig loss_cfg = cross_entropy_config();
  if (cfg.loss == LossKind::Focal) {
    loss_cfg.gamma = cfg.gamma;
    loss_cfg.alpha = cfg.alpha.value_or(inverse_frequency_alpha(counts));
  }

  ClassifierModel model = make_model(dim, mode, budget);
  model.seed = cfg.seed;
  model.loss = cfg.loss;
  model.focal = loss_cfg;

  const auto& eval_set = validation.empty() ? train_set : validation;

  TrainResult result;
  result.model = model;
  double best_f1 = -1.0;
  std::size_t since_best = 0;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<ClassVector> grads;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    // Fisher-Yates with raw engine output: identical on every standard library.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double step = cfg.learning_rate / static_cast<double>(end - start);
      grads.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = train_set[order[i]];
        grads.push_back(loss_gradient(logits(model, ex.features, kernels), ex.label, loss_cfg));
      }
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = train_set[order[i]];
        const auto& g = grads[i - start];
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          model.biases[c] -= step * g[c];
          kernels.sparse_axpy(model.row(c).data(), ex.features.indices.data(), ex.features.values.data(),
                              ex.features.size(), -step * g[c]);
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = mean_loss(model, train_set, loss_cfg, kernels);
    stats.validation_macro_f1 = macro_f1_on(model, eval_set, kernels);
    result.history.push_back(stats);
    result.epochs_run = epoch;

    if (stats.validation_macro_f1 > best_f1) {
      best_f1 = stats.validation_macro_f1;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

NliServiceConfig NliServiceConfig::from_env() {
  NliServiceConfig c;
  if (const char* v = std::getenv("NLI_URL")) c.base_url = v;
  if (const char* v = std::getenv("NLI_TOKEN")) c.token = v;
  return c;
}

NliClient::NliClient(HttpTransport* transport, NliServiceConfig config)
    : transport_(transport), config_(std::move(config)) {}

Prediction NliClient::parse_response(std::string_view body) {
  ClassVector probs{};
  try {
    const json j = json::parse(body);
    const auto& p = j.at("probs");
    for (auto l : kAllLabels) probs[class_index(l)] = p.at(std::string(to_string(l))).get<double>();
  } catch (const json::exception& e) {
    throw ServiceError(std::string("nli server: malformed response: ") + e.what());
  }
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ServiceError("nli server: probability outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ServiceError("nli server: probabilities sum to " + std::to_string(sum));
  return prediction_from_probs(probs);
}

Prediction NliClient::classify(std::string_view text) {
  if (transport_ == nullptr) throw ServiceError("nli server path disabled (offline)");
  if (config_.base_url.empty()) throw ConfigError("NLI server URL is not set (NLI_URL)");
  HttpRequest req;
  req.url = join_url(config_.base_url, "/classify");
  req.body = json{{"text", text}}.dump();
  req.timeout = config_.timeout;
  if (!config_.token.empty()) req.headers.emplace_back("Authorization", "Bearer " + config_.token);
  const auto res = post_with_retry(*transport_, req, config_.retry, "nli server");
  return parse_response(res.body);
}

Prediction nli_server_predict(NliClient& client, const AssembledInput& input) {
  return client.classify(input.text);
}

}  // namespace numclaim
