#include "emit.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "gyro/errors.hpp"

#ifndef GYROLAB_VERSION
#define GYROLAB_VERSION "0.0.0"
#endif

namespace gyrolab {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Provenance::hash() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(command + "\n" + config.dump())));
  return buf;
}

ojson Provenance::to_json() const {
  ojson p;
  p["tool"] = "gyrolab";
  p["version"] = GYROLAB_VERSION;
  p["command"] = command;
  p["config_hash"] = hash();
  p["seed"] = seed;
  p["config"] = ojson::parse(config.dump());
  return p;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(long long x) { return std::to_string(x); }

CsvWriter::CsvWriter(const std::filesystem::path& file, const Provenance& prov,
                     const std::vector<std::string>& columns)
    : out_(file, std::ios::binary), ncol_(columns.size()), file_(file) {
  if (!out_) throw gyro::Error("cannot write '" + file.string() + "'");
  out_ << "# tool: gyrolab " << GYROLAB_VERSION << "\n"
       << "# command: " << prov.command << "\n"
       << "# config_hash: " << prov.hash() << "\n"
       << "# seed: " << prov.seed << "\n"
       << "# config: " << prov.config.dump() << "\n";
  write_row(columns);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != ncol_) throw std::logic_error("CsvWriter: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  if (!out_) throw gyro::Error("write failed on '" + file_.string() + "'");
}

void write_json(const std::filesystem::path& file, const Provenance& prov, const ojson& body) {
  ojson doc;
  doc["provenance"] = prov.to_json();
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  std::ofstream out(file, std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) throw gyro::Error("cannot write '" + file.string() + "'");
}

double SeededStream::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double SeededStream::normal() {
  // Box-Muller, one value per call
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gyrolab
