#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicon {

// Minimal structured-text config: [section.subsection] headers, key = value
// pairs, '#' comments. Values: numbers, booleans, quoted strings, and
// [a, b, c] arrays. Keys are addressed with dotted paths.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double fallback) const;
  double get_double(const std::string& key) const;  // throws if missing
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_array(const std::string& key,
                                const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_array(const std::string& key) const;

  void set(const std::string& key, const std::string& raw);

  // Stable serialization used for manifest hashing.
  std::string canonical() const;
  uint64_t hash() const;

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;  // key -> raw token
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace aicon
