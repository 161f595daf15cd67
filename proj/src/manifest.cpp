#include "lcsbp/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lcsbp {

const char* tool_version() { return LCSBP_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) out += hex[md[i] >> 4], out += hex[md[i] & 15];
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string utc_now_iso8601() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "lcsbp";
  j["tool_version"] = tool_version();
  j["command"] = m.command;
  j["argv"] = m.argv;
  if (!m.spec_path.empty()) {
    j["spec_path"] = m.spec_path;
    j["spec_sha256"] = m.spec_sha256;
  }
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["config"] = m.config;
  j["workers"] = m.workers;
  j["started_utc"] = m.started_utc;
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["exit_code"] = m.exit_code;
  auto outs = nlohmann::ordered_json::array();
  for (auto& o : m.outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  j["outputs"] = outs;
  return j.dump(2);
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << manifest_json(m) << "\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace lcsbp
