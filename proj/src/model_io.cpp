#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "numclaim/classify.hpp"
#include "numclaim/error.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'C', 'L', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

static_assert(std::endian::native == std::endian::little);

template <typename T>
void append(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

std::string serialize_model(const ClassifierModel& model) {
  json header;
  header["format_version"] = kModelVersion;
  header["dim"] = model.dim;
  header["classes"] = {"True", "False", "Conflicting"};
  header["mode"] = {{"digit_mode", to_string(model.mode.grouping)}, {"group_size", model.mode.group_size}};
  header["budget"] = model.budget.max_tokens;
  header["seed"] = model.seed;
  header["loss"] = {{"kind", to_string(model.loss)},
                    {"gamma", model.focal.gamma},
                    {"alpha", model.focal.alpha}};
  const std::string header_text = header.dump();

  std::string out;
  out.reserve(sizeof(kMagic) + 8 + header_text.size() + (3 + model.weights.size()) * sizeof(double));
  out.append(kMagic, sizeof(kMagic));
  append(out, kModelVersion);
  append(out, static_cast<std::uint32_t>(header_text.size()));
  out.append(header_text);
  for (double b : model.biases) append(out, b);
  out.append(reinterpret_cast<const char*>(model.weights.data()), model.weights.size() * sizeof(double));
  return out;
}

ClassifierModel deserialize_model(std::string_view bytes) {
  auto fail = [](const std::string& why) -> DataError { return DataError("model file: " + why); };
  std::size_t pos = 0;
  auto take = [&](void* dst, std::size_t n) {
    if (bytes.size() - pos < n) throw fail("truncated");
    std::memcpy(dst, bytes.data() + pos, n);
    pos += n;
  };
  char magic[sizeof(kMagic)];
  take(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw fail("bad magic");
  std::uint32_t version = 0, header_len = 0;
  take(&version, sizeof(version));
  if (version != kModelVersion) throw fail("unsupported version " + std::to_string(version));
  take(&header_len, sizeof(header_len));
  if (bytes.size() - pos < header_len) throw fail("truncated header");
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  }
  pos += header_len;

  ClassifierModel m;
  try {
    m.dim = header.at("dim").get<std::size_t>();
    const auto grouping = parse_digit_grouping(header.at("mode").at("digit_mode").get<std::string>());
    if (!grouping) throw fail("unknown digit mode");
    m.mode = DigitMode{*grouping, header.at("mode").at("group_size").get<std::size_t>()};
    m.budget = ContextBudget{header.at("budget").get<std::size_t>()};
    m.seed = header.at("seed").get<std::uint64_t>();
    const auto kind = parse_loss_kind(header.at("loss").at("kind").get<std::string>());
    if (!kind) throw fail("unknown loss kind");
    m.loss = *kind;
    m.focal.gamma = header.at("loss").at("gamma").get<double>();
    m.focal.alpha = header.at("loss").at("alpha").get<ClassVector>();
  } catch (const json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  }
  if (m.dim == 0) throw fail("zero dimension");
  for (double& b : m.biases) take(&b, sizeof(double));
  const std::size_t n = kNumClasses * m.dim;
  if (bytes.size() - pos != n * sizeof(double)) throw fail("weight block size mismatch");
  m.weights.resize(n);
  take(m.weights.data(), n * sizeof(double));
  for (double w : m.weights)
    if (!std::isfinite(w)) throw fail("non-finite weight");
  return m;
}

void write_model(const ClassifierModel& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing model to " + path.string());
}

ClassifierModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("no model at " + path.string() + " (run train first)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace numclaim
