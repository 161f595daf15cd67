#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcsbp {

const char* tool_version();

struct OutputFile {
  std::string path;
  std::string sha256;
};

/// Sidecar written next to every output of a run.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string spec_path;
  std::string spec_sha256;  // of the file bytes as read
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> config;
  unsigned workers = 0;
  std::string started_utc;
  double wall_time_seconds = 0.0;
  int exit_code = 0;
  std::vector<OutputFile> outputs;
};

std::string sha256_hex(const std::string& bytes);
/// Throws std::runtime_error when the file cannot be read.
std::string sha256_file(const std::string& path);

std::string utc_now_iso8601();

std::string manifest_json(const RunManifest& m);
/// `<output>.manifest.json`
std::string manifest_path_for(const std::string& output);
void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace lcsbp
