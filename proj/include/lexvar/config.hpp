#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lexvar {

/// Pipeline configuration: a fixed set of keys with defaults.
///
/// File format: one `key = value` per line, `#` starts a comment, blank
/// lines ignored. Environment variables LEXVAR_<KEY> (key uppercased)
/// override the file; command-line flags override both.
class Config {
 public:
  static constexpr const char* kEnvPrefix = "LEXVAR_";

  Config();

  /// Known keys with their defaults and one-line descriptions.
  static const std::vector<std::pair<std::string, std::pair<std::string, std::string>>>& schema();

  void load_file(const std::filesystem::path& path);
  void load(std::istream& in, const std::string& source = "config");
  /// Applies LEXVAR_* overrides from the process environment.
  void apply_environment();
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  long long get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated list, entries trimmed, empties dropped.
  std::vector<std::string> get_list(const std::string& key) const;

  /// Checks ranges of numeric keys; throws naming the offending key.
  void validate() const;

  /// 16 hex digits of FNV-1a over the sorted key=value pairs, excluding keys
  /// that do not affect results (jobs, out).
  std::string hash() const;

  /// Writes every key as `key = value`, sorted, with the hash as a comment.
  void write_resolved(std::ostream& out) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace lexvar
