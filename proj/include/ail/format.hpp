#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ail {

// Shortest decimal that parses back to the same double; "inf", "-inf", "nan" for
// non-finite values.
std::string fmt_real(double v);
std::optional<double> parse_real(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Flat key = value report, rendered sorted by key.
class KvReport {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, const char* value) { entries_[key] = value; }
  void set(const std::string& key, double value) { entries_[key] = fmt_real(value); }
  void set(const std::string& key, std::int64_t value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, std::uint64_t value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }
  void merge(const KvReport& other, const std::string& prefix);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::optional<std::string> get(const std::string& key) const;
  std::string render() const;
  static KvReport parse(std::string_view text);

 private:
  std::map<std::string, std::string> entries_;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ail
