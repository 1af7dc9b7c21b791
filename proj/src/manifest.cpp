#include "xnas/manifest.hpp"

namespace xnas::io {

const char* const kToolVersion = "xnas 0.1.0";

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

nlohmann::json RunManifest::to_json() const {
  // nlohmann::json objects keep keys sorted, so the dump is canonical.
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["seed"] = seed;
  j["version"] = version;
  j["outputs"] = outputs;
  return j;
}

std::string RunManifest::dump() const { return to_json().dump(2) + "\n"; }

std::uint64_t RunManifest::hash() const {
  nlohmann::json identity;
  identity["subcommand"] = subcommand;
  identity["config"] = config;
  identity["seed"] = seed;
  identity["version"] = version;
  return fnv1a(identity.dump());
}

std::string manifest_path_for(const std::string& output_path) {
  const std::size_t slash = output_path.find_last_of('/');
  const std::size_t dot = output_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return output_path.substr(0, dot) + ".manifest.json";
  return output_path + ".manifest.json";
}

}  // namespace xnas::io
