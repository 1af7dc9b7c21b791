#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace xnas::io {

// FNV-1a over a byte string; stable across platforms.
std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);

// Every run emits a manifest next to its outputs: the subcommand, the fully
// resolved configuration (no hidden defaults), the seed, the tool version and
// the output paths. Re-running the same manifest reproduces the outputs
// byte-exactly; the manifest hash is stamped into each CSV header.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // all defaults materialized
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
  std::string dump() const;    // canonical text (sorted keys, 2-space indent)
  // Hash of the run identity (subcommand, config, seed, version). Output
  // paths are excluded: the same run written elsewhere is the same run.
  std::uint64_t hash() const;
};

extern const char* const kToolVersion;

// Path of the manifest written alongside `output_path` (extension replaced
// by ".manifest.json").
std::string manifest_path_for(const std::string& output_path);

}  // namespace xnas::io
