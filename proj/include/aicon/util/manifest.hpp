#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aicon {

// Reproducibility record written next to every result file. Written
// atomically (tmp file + rename) before results are considered valid.
struct RunManifest {
  std::string command_line;
  uint64_t config_hash = 0;
  std::vector<uint64_t> seeds;
  std::string engine_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<std::string> overrides;  // CLI flag overrides applied to config

  void write(const std::string& path) const;
};

std::string iso8601_now();
extern const char* kEngineVersion;

}  // namespace aicon
