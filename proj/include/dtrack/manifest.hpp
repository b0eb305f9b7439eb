#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dtrack {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Record written next to every output so the run can be repeated.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string timestamp;
  std::string version = kArtifactVersion;

  nlohmann::json to_json() const {
    return {{"command", command}, {"config", config},   {"seed", seed},       {"inputs", inputs},
            {"outputs", outputs}, {"timestamp", timestamp}, {"version", version}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.version = j.at("version").get<std::string>();
    return m;
  }
};

/// UTC, ISO 8601.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << m.to_json().dump(2) << '\n';
}

inline RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return RunManifest::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace dtrack
