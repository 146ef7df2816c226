#include "numclaim/digest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "numclaim/error.hpp"

namespace numclaim {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256 init failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void feed_file(Sha256& h, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_path(const std::filesystem::path& path) {
  Sha256 h;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path))
      if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto name = f.filename().string();
      h.update(name.data(), name.size() + 1);
      feed_file(h, f);
    }
  } else {
    feed_file(h, path);
  }
  return h.hex();
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.string(), sha256_path(path));
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [p, d] : inputs) in.push_back({{"path", p}, {"sha256", d}});
  j["outputs"] = outputs;
  j["duration_seconds"] = duration_seconds;
  return j.dump(2) + "\n";
}

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
  if (std::filesystem::is_directory(artifact)) return artifact / "manifest.json";
  auto p = artifact;
  p += ".manifest.json";
  return p;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& artifact) {
  const auto path = manifest_path_for(artifact);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.to_json();
}

}  // namespace numclaim
