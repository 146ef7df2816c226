#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace numclaim {

std::string sha256_hex(std::string_view bytes);
// Streams the file; a directory digests its regular files in name order.
std::string sha256_path(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  void add_input(const std::filesystem::path& path);
  std::string to_json() const;
};

// <artifact>.manifest.json next to a file, or <dir>/manifest.json for a directory.
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& artifact);

}  // namespace numclaim
