#pragma once

#include <map>
#include <string>
#include <vector>

// Reproducible outputs: RFC-4180 CSV with '%.17g' numbers, a section/key
// config file, the run manifest.
namespace bbl::io {

std::string format_double(double v);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add_row(const std::vector<double>& vals);
  void write(const std::string& path) const;
  std::string to_string() const;
};

// key/value configuration with [section] headers; keys flattened as
// "section.key". '#' starts a comment.
struct Config {
  std::map<std::string, std::string> kv;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);
  bool has(const std::string& key) const { return kv.count(key) > 0; }
  double get_double(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  std::string get(const std::string& key, const std::string& dflt) const;
  std::string canonical() const;  // sorted "key=value" lines
};

// FNV-1a of the canonical config text
std::string config_hash(const Config& cfg);

struct RunManifest {
  std::string command;
  std::string config_hash;
  unsigned long long seed = 0;
  std::string started;
  std::string finished;
  std::string tool_version;
  std::vector<std::string> outputs;
  void write(const std::string& path) const;
};

std::string timestamp_now();

}  // namespace bbl::io
