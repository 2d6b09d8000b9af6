#pragma once

// Output files. Every file starts with the provenance of the run: tool
// version, command, config hash, seed and the fully resolved config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace gyrolab {

using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes);

struct Provenance {
  std::string command;
  json config;  // resolved
  std::uint64_t seed = 0;

  std::string hash() const;  // "fnv1a64:<16 hex digits>" over command + config
  ojson to_json() const;
};

/// 17 significant digits, round-trips every double.
std::string fmt(double x);
std::string fmt(long long x);
inline std::string fmt(int x) { return fmt(static_cast<long long>(x)); }
inline std::string fmt(long x) { return fmt(static_cast<long long>(x)); }
inline std::string fmt(std::size_t x) { return fmt(static_cast<long long>(x)); }
inline std::string fmt(bool x) { return x ? "1" : "0"; }
inline std::string fmt(std::string_view s) { return std::string(s); }
inline std::string fmt(const char* s) { return s; }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const Provenance& prov,
            const std::vector<std::string>& columns);

  template <class... T>
  void row(const T&... cells) {
    write_row({fmt(cells)...});
  }
  void write_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t ncol_;
  std::filesystem::path file_;
};

/// Writes {"provenance": ..., <body keys>...} with provenance first.
void write_json(const std::filesystem::path& file, const Provenance& prov, const ojson& body);

/// Uniform [0, 1) and N(0, 1) draws from mt19937_64. The engine sequence is
/// fixed by the standard; the distributions are mapped here because the
/// standard ones are implementation-defined.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : eng_(seed) {}
  double uniform();
  double normal();

 private:
  std::mt19937_64 eng_;
};

}  // namespace gyrolab
