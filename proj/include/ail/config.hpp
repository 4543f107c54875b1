#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ail/error.hpp"

namespace ail {

enum class ExperimentKind { rate, run, verify, sweep };

const char* experiment_kind_name(ExperimentKind k);

// Every problem found while reading or validating a config, not just the first.
class ConfigError : public Error {
 public:
  ConfigError(Errc code, std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// section -> key -> canonical value
using ConfigDoc = std::map<std::string, std::map<std::string, std::string>>;

// A validated experiment document:
//
//   [experiment]  kind, seed, K, seeds, output
//   [problem]     family and generator parameters, regularizer, x0, oracle noise
//   [delay]       delay or worker model
//   [algorithm]   method, step size or step rule, method options
//   [tolerance]   rel, abs, margin
//   [rate]        certificate inputs for kind = rate
//   [verify]      stored trace and recursion form for kind = verify
//   [sweep]       base kind, swept field and its values
//
// Values are stored canonically (reals in shortest round-trip form), so
// parse_config(render_config(c)) == c.
struct RunConfig {
  ConfigDoc doc;

  ExperimentKind kind() const;
  std::uint64_t seed() const;
  std::optional<std::size_t> K() const;
  std::size_t seed_count() const;
  std::optional<std::string> output() const;

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  double real(const std::string& section, const std::string& key, double fallback) const;
  std::optional<double> real(const std::string& section, const std::string& key) const;
  std::uint64_t count(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  std::optional<std::uint64_t> count(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;

  // Canonicalizes and type-checks one field; the whole document is not re-validated.
  void set(const std::string& section, const std::string& key, const std::string& value);
  void erase(const std::string& section, const std::string& key);

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);
std::string render_config(const RunConfig& c);
// Cross-field checks on an assembled document; throws ConfigError(semantic_error).
void validate_config(const RunConfig& c);

// "section.key" of a field known to the schema.
bool config_field_known(std::string_view dotted);

}  // namespace ail
