#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dphase::cli {

/// Configuration error carrying the source name and line (0 when the key is absent from the file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Flat INI file: `key = value` lines under `[section]` headers, `#` or `;` comments.
/// Keys are addressed as "section.key".
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(std::string_view text, std::string source);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  /// Comma-separated numbers.
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  /// Rejects keys outside `known`, reporting the first offender by line.
  void require_known(const std::set<std::string>& known) const;
  /// Error at the line of `key`.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  /// SHA-256 of the file contents, hex encoded.
  const std::string& digest() const { return digest_; }
  const std::string& source() const { return source_; }
  int line_of(const std::string& key) const;

 private:
  std::string source_;
  std::string digest_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

std::string sha256_hex(std::string_view data);

}  // namespace dphase::cli
