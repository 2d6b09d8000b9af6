#pragma once

// JSON run configuration: a flat table of dotted field paths with types and
// defaults. Resolution fills in every default so the emitted provenance
// carries the complete effective configuration.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace gyrolab {

using json = nlohmann::json;

/// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Number, Integer, Bool, String, NumberArray, ObjectArray, PairArray };

struct Field {
  std::string path;  // dot separated, e.g. "top.a"
  Kind kind;
  json fallback;     // null: the field is required
};

using Schema = std::vector<Field>;

/// Validates `user` against the schema (types, required fields, no unknown
/// keys) and returns the nested object with every field set.
json resolve(const Schema& schema, const json& user);

json load_config_file(const std::string& path);

/// Lookup by dotted path in a resolved config.
const json& at(const json& cfg, const std::string& path);
double num(const json& cfg, const std::string& path);
long long integer(const json& cfg, const std::string& path);
std::string str(const json& cfg, const std::string& path);
bool flag(const json& cfg, const std::string& path);
std::vector<double> numbers(const json& cfg, const std::string& path);

/// Linear range {min, max, count}; count >= 1, min alone when count is 1.
std::vector<double> linear_range(const json& cfg, const std::string& path);

}  // namespace gyrolab
