#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace soaksim::cli {

// Run manifest: the config echo, run identity, and a checksummed inventory
// of every data file the command wrote. The echoed config block re-parses as
// a config file, so pointing --config at a manifest reproduces the run.
//
//   soaksim_manifest 1
//   command <argv as given>
//   version <tool version>
//   seed <u64>
//   workers <n>
//   wall_clock_s <seconds>
//   config_begin
//   <config text>
//   config_end
//   extra_begin
//   <key> <value>
//   extra_end
//   file <name> <bytes> <crc32-hex>

struct ManifestFileEntry {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint32_t crc32 = 0;
};

struct Manifest {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double wall_clock_s = 0.0;
  std::string config_text;
  std::vector<std::pair<std::string, std::string>> extra;
  std::vector<ManifestFileEntry> files;
};

std::uint32_t crc32_of(const std::string& bytes);

std::string render_manifest(const Manifest& m);

// Throws std::invalid_argument on any malformed or missing section.
Manifest parse_manifest(const std::string& text);

}  // namespace soaksim::cli
