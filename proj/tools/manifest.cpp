#include "manifest.hpp"

#include <zlib.h>

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "table_io.hpp"

namespace soaksim::cli {

namespace {

std::string hex32(std::uint32_t v) {
  char buf[9];
  for (int i = 7; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[v & 0xF];
    v >>= 4;
  }
  buf[8] = '\0';
  return buf;
}

std::uint32_t parse_hex32(const std::string& s) {
  std::uint32_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("manifest: bad checksum '" + s + "'");
  return v;
}

}  // namespace

std::uint32_t crc32_of(const std::string& bytes) {
  return static_cast<std::uint32_t>(
      ::crc32_z(0,
                reinterpret_cast<const Bytef*>(bytes.data()),
                bytes.size()));
}

std::string render_manifest(const Manifest& m) {
  std::string out = "soaksim_manifest 1\n";
  out += "command " + m.command + '\n';
  out += "version " + m.version + '\n';
  out += "seed " + std::to_string(m.seed) + '\n';
  out += "workers " + std::to_string(m.workers) + '\n';
  out += "wall_clock_s " + format_double(m.wall_clock_s) + '\n';
  out += "config_begin\n";
  out += m.config_text;
  if (!m.config_text.empty() && m.config_text.back() != '\n') out += '\n';
  out += "config_end\n";
  out += "extra_begin\n";
  for (const auto& [key, value] : m.extra) out += key + ' ' + value + '\n';
  out += "extra_end\n";
  for (const ManifestFileEntry& f : m.files)
    out += "file " + f.name + ' ' + std::to_string(f.bytes) + ' ' +
           hex32(f.crc32) + '\n';
  return out;
}

Manifest parse_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "soaksim_manifest 1")
    throw std::invalid_argument("manifest: missing 'soaksim_manifest 1' line");
  Manifest m;
  bool in_config = false;
  bool in_extra = false;
  while (std::getline(in, line)) {
    if (in_config) {
      if (trim(line) == "config_end") {
        in_config = false;
      } else {
        m.config_text += line;
        m.config_text += '\n';
      }
      continue;
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (in_extra) {
      if (t == "extra_end") {
        in_extra = false;
        continue;
      }
      const std::size_t sp = t.find(' ');
      if (sp == std::string::npos)
        m.extra.emplace_back(t, "");
      else
        m.extra.emplace_back(t.substr(0, sp), trim(t.substr(sp + 1)));
      continue;
    }
    if (t == "config_begin") {
      in_config = true;
      continue;
    }
    if (t == "extra_begin") {
      in_extra = true;
      continue;
    }
    const std::size_t sp = t.find(' ');
    const std::string key = sp == std::string::npos ? t : t.substr(0, sp);
    const std::string rest =
        sp == std::string::npos ? "" : trim(t.substr(sp + 1));
    if (key == "command") {
      m.command = rest;
    } else if (key == "version") {
      m.version = rest;
    } else if (key == "seed") {
      m.seed = parse_u64(rest);
    } else if (key == "workers") {
      m.workers = static_cast<unsigned>(parse_u64(rest));
    } else if (key == "wall_clock_s") {
      m.wall_clock_s = parse_double(rest);
    } else if (key == "file") {
      const std::vector<std::string> tok = split(rest, ' ');
      if (tok.size() != 3)
        throw std::invalid_argument("manifest: bad file line '" + t + "'");
      m.files.push_back({tok[0], parse_u64(tok[1]), parse_hex32(tok[2])});
    } else {
      throw std::invalid_argument("manifest: unknown line '" + t + "'");
    }
  }
  if (in_config)
    throw std::invalid_argument("manifest: unterminated config block");
  if (in_extra)
    throw std::invalid_argument("manifest: unterminated extra block");
  return m;
}

}  // namespace soaksim::cli
