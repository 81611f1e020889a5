#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace trapnoise {

// Key-value text format shared by materials, stacks, circuits, scenes and
// parameter files:
//
//   # comment
//   key = value            (top level, before any section)
//   [kind name]            (section header; name optional)
//   key = value            (keys may repeat, e.g. film = ...)
//   4  0.0220              (numeric row; only tables use them)
//
// Values are raw text; the typed getters report file:line:column on error.

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  // column of the value
};

struct ConfigRow {
  std::vector<double> values;
  std::size_t line = 0;
};

class ConfigSection {
public:
  std::string kind;
  std::string name;
  std::string file;
  std::size_t line = 0;
  std::vector<ConfigEntry> entries;
  std::vector<ConfigRow> rows;

  bool has(const std::string& key) const;
  const ConfigEntry* find(const std::string& key) const;
  std::vector<const ConfigEntry*> all(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  // Rejects keys outside `allowed` and numeric rows unless `rows_ok`.
  void check_keys(std::initializer_list<const char*> allowed, bool rows_ok = false) const;

  [[noreturn]] void fail(const std::string& what, std::size_t line = 0, std::size_t column = 0) const;
  [[noreturn]] void fail_at(const ConfigEntry& e, const std::string& what) const;
  std::string label() const;
};

struct ConfigFile {
  std::filesystem::path path;
  ConfigSection top;  // entries before the first header
  std::vector<ConfigSection> sections;

  std::vector<const ConfigSection*> of_kind(const std::string& kind) const;
  // Resolves a path value relative to this file's directory.
  std::filesystem::path resolve(const std::string& relative) const;
};

ConfigFile parse_config(const std::string& text, const std::string& file_label = "<config>");
ConfigFile load_config(const std::filesystem::path& path);

// Numbers and whitespace/comma separated lists of numbers.
std::optional<double> parse_double(const std::string& s);
std::vector<double> parse_double_list(const std::string& s, std::size_t* bad_offset = nullptr);

// FNV-1a 64 of the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace trapnoise
