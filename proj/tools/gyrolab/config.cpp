#include "config.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace gyrolab {
namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  return parts;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Number: return "number";
    case Kind::Integer: return "integer";
    case Kind::Bool: return "boolean";
    case Kind::String: return "string";
    case Kind::NumberArray: return "array of numbers";
    case Kind::ObjectArray: return "array of objects";
    case Kind::PairArray: return "array of [number, number]";
  }
  return "?";
}

bool number_array(const json& v, std::size_t len = 0) {
  if (!v.is_array() || (len && v.size() != len)) return false;
  for (const auto& x : v)
    if (!x.is_number()) return false;
  return true;
}

bool matches(Kind k, const json& v) {
  switch (k) {
    case Kind::Number: return v.is_number();
    case Kind::Integer:
      return v.is_number_integer() ||
             (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
    case Kind::Bool: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::NumberArray: return number_array(v);
    case Kind::ObjectArray:
      if (!v.is_array()) return false;
      for (const auto& x : v)
        if (!x.is_object()) return false;
      return true;
    case Kind::PairArray:
      if (!v.is_array()) return false;
      for (const auto& x : v)
        if (!number_array(x, 2)) return false;
      return true;
  }
  return false;
}

void check_unknown(const json& user, const std::string& prefix, const std::set<std::string>& leaves,
                   const std::set<std::string>& groups) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (leaves.count(path)) continue;
    if (groups.count(path)) {
      if (!it->is_object()) throw ConfigError("config: field '" + path + "': expected an object");
      check_unknown(*it, path, leaves, groups);
      continue;
    }
    throw ConfigError("config: unknown field '" + path + "'");
  }
}

}  // namespace

json resolve(const Schema& schema, const json& user) {
  if (!user.is_object()) throw ConfigError("config: top level must be a JSON object");
  std::set<std::string> leaves, groups;
  for (const auto& f : schema) {
    leaves.insert(f.path);
    const auto parts = split_path(f.path);
    std::string g;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      g += (i ? "." : "") + parts[i];
      groups.insert(g);
    }
  }
  check_unknown(user, "", leaves, groups);

  json out = json::object();
  for (const auto& f : schema) {
    const json* src = &user;
    for (const auto& p : split_path(f.path)) {
      if (!src->is_object() || !src->contains(p)) {
        src = nullptr;
        break;
      }
      src = &(*src)[p];
    }
    json value;
    if (src) {
      if (!matches(f.kind, *src))
        throw ConfigError("config: field '" + f.path + "': expected " + kind_name(f.kind) + ", got " +
                          src->type_name());
      value = *src;
      // canonical numeric types, so 3 and 3.0 resolve (and hash) alike
      if (f.kind == Kind::Integer) value = static_cast<long long>(src->get<double>());
      if (f.kind == Kind::Number) value = src->get<double>();
      if (f.kind == Kind::NumberArray) value = src->get<std::vector<double>>();
      if (f.kind == Kind::PairArray) value = src->get<std::vector<std::array<double, 2>>>();
    } else if (f.fallback.is_null()) {
      throw ConfigError("config: missing required field '" + f.path + "'");
    } else {
      value = f.fallback;
    }
    out[json::json_pointer("/" + [&] {
      std::string s = f.path;
      for (auto& ch : s)
        if (ch == '.') ch = '/';
      return s;
    }())] = value;
  }
  return out;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
}

const json& at(const json& cfg, const std::string& path) {
  const json* p = &cfg;
  for (const auto& k : split_path(path)) {
    if (!p->is_object() || !p->contains(k)) throw ConfigError("config: no field '" + path + "'");
    p = &(*p)[k];
  }
  return *p;
}

double num(const json& cfg, const std::string& path) { return at(cfg, path).get<double>(); }
long long integer(const json& cfg, const std::string& path) { return at(cfg, path).get<long long>(); }
std::string str(const json& cfg, const std::string& path) { return at(cfg, path).get<std::string>(); }
bool flag(const json& cfg, const std::string& path) { return at(cfg, path).get<bool>(); }
std::vector<double> numbers(const json& cfg, const std::string& path) {
  return at(cfg, path).get<std::vector<double>>();
}

std::vector<double> linear_range(const json& cfg, const std::string& path) {
  const double lo = num(cfg, path + ".min"), hi = num(cfg, path + ".max");
  const long long n = integer(cfg, path + ".count");
  if (n < 1) throw ConfigError("config: field '" + path + ".count': grid is empty");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

}  // namespace gyrolab
