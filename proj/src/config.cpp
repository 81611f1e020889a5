#include "trapnoise/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

std::string rtrim(std::string s) {
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::optional<double> parse_double(const std::string& s) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && is_space(*b)) ++b;
  while (e > b && is_space(e[-1])) --e;
  if (b < e && *b == '+') ++b;
  if (b == e) return std::nullopt;
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

std::vector<double> parse_double_list(const std::string& s, std::size_t* bad_offset) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (is_space(s[i]) || s[i] == ',')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j]) && s[j] != ',') ++j;
    const auto v = parse_double(s.substr(i, j - i));
    if (!v) {
      if (bad_offset) *bad_offset = i;
      throw std::invalid_argument("not a number: '" + s.substr(i, j - i) + "'");
    }
    out.push_back(*v);
    i = j;
  }
  return out;
}

// ------------------------------------------------------------ section

bool ConfigSection::has(const std::string& key) const { return find(key) != nullptr; }

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  const ConfigEntry* hit = nullptr;
  for (const auto& e : entries) {
    if (e.key != key) continue;
    if (hit) fail("duplicate key '" + key + "'", e.line, 1);
    hit = &e;
  }
  return hit;
}

std::vector<const ConfigEntry*> ConfigSection::all(const std::string& key) const {
  std::vector<const ConfigEntry*> out;
  for (const auto& e : entries)
    if (e.key == key) out.push_back(&e);
  return out;
}

std::string ConfigSection::label() const {
  if (kind.empty()) return "top level";
  return "[" + kind + (name.empty() ? "" : " " + name) + "]";
}

void ConfigSection::fail(const std::string& what, std::size_t l, std::size_t c) const {
  throw ConfigError(label() + ": " + what, file, l ? l : line, c);
}

void ConfigSection::fail_at(const ConfigEntry& e, const std::string& what) const {
  throw ConfigError(label() + ": " + what, file, e.line, e.column);
}

std::string ConfigSection::get_string(const std::string& key) const {
  const auto* e = find(key);
  if (!e) fail("missing key '" + key + "'");
  return e->value;
}

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
  const auto* e = find(key);
  return e ? e->value : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
  const auto* e = find(key);
  if (!e) fail("missing key '" + key + "'");
  const auto v = parse_double(e->value);
  if (!v) fail_at(*e, "'" + key + "' is not a number: '" + e->value + "'");
  return *v;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ConfigSection::get_int(const std::string& key, long fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  long v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) fail_at(*e, "'" + key + "' is not an integer: '" + e->value + "'");
  return v;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  fail_at(*e, "'" + key + "' must be true or false");
}

std::vector<double> ConfigSection::get_doubles(const std::string& key) const {
  const auto* e = find(key);
  if (!e) fail("missing key '" + key + "'");
  std::size_t off = 0;
  try {
    return parse_double_list(e->value, &off);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(label() + ": '" + key + "': " + ex.what(), file, e->line, e->column + off);
  }
}

void ConfigSection::check_keys(std::initializer_list<const char*> allowed, bool rows_ok) const {
  for (const auto& e : entries) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return e.key == a; });
    if (!ok) fail("unknown key '" + e.key + "'", e.line, 1);
  }
  if (!rows_ok && !rows.empty()) fail("unexpected numeric row", rows.front().line, 1);
}

// --------------------------------------------------------------- file

std::vector<const ConfigSection*> ConfigFile::of_kind(const std::string& kind) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections)
    if (s.kind == kind) out.push_back(&s);
  return out;
}

std::filesystem::path ConfigFile::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  if (p.is_absolute()) return p;
  return path.parent_path() / p;
}

ConfigFile parse_config(const std::string& text, const std::string& file_label) {
  ConfigFile cfg;
  cfg.path = file_label;
  cfg.top.file = file_label;
  ConfigSection* cur = &cfg.top;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto hash = raw.find('#');
    const std::string line = rtrim(hash == std::string::npos ? raw : raw.substr(0, hash));
    const std::size_t b = skip_space(line, 0);
    if (b >= line.size()) continue;

    if (line[b] == '[') {
      const auto close = line.find(']', b);
      if (close == std::string::npos)
        throw ConfigError("section header is missing ']'", file_label, line_no, b + 1);
      if (skip_space(line, close + 1) != line.size())
        throw ConfigError("text after section header", file_label, line_no, close + 2);
      std::istringstream hs(line.substr(b + 1, close - b - 1));
      ConfigSection s;
      std::string extra;
      hs >> s.kind >> s.name >> extra;
      if (s.kind.empty()) throw ConfigError("empty section header", file_label, line_no, b + 1);
      if (!extra.empty())
        throw ConfigError("section header takes a kind and at most one name", file_label, line_no, b + 1);
      s.file = file_label;
      s.line = line_no;
      cfg.sections.push_back(std::move(s));
      cur = &cfg.sections.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      // Numeric table row.
      ConfigRow row;
      row.line = line_no;
      std::size_t off = 0;
      try {
        row.values = parse_double_list(line.substr(b), &off);
      } catch (const std::invalid_argument&) {
        throw ConfigError("expected 'key = value' or a numeric row", file_label, line_no, b + off + 1);
      }
      cur->rows.push_back(std::move(row));
      continue;
    }
    ConfigEntry e;
    e.key = rtrim(line.substr(b, eq - b));
    if (!valid_key(e.key)) throw ConfigError("invalid key '" + e.key + "'", file_label, line_no, b + 1);
    const std::size_t v = skip_space(line, eq + 1);
    e.value = v < line.size() ? line.substr(v) : std::string();
    e.line = line_no;
    e.column = v + 1;
    if (e.value.empty()) throw ConfigError("empty value for '" + e.key + "'", file_label, line_no, eq + 2);
    cur->entries.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ConfigFile cfg = parse_config(ss.str(), path.string());
  cfg.path = path;
  return cfg;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file", path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace trapnoise
