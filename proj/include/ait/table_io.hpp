#pragma once

// Persistence. Documents are JSON objects with a "format" tag and a "digest"
// field holding the SHA-256 of the compact serialization of the document
// without that field (object keys sorted, so the serialization is canonical).
// Big numerators are written as decimal strings.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "ait/codec.hpp"
#include "ait/digest.hpp"
#include "ait/enumerator.hpp"
#include "ait/error.hpp"

namespace ait {

using Json = nlohmann::json;

#ifdef AIT_VERSION
inline constexpr std::string_view kToolVersion = AIT_VERSION;
#else
inline constexpr std::string_view kToolVersion = "1.0.0";
#endif

inline constexpr std::string_view kTableFormat = "ait-table/1";
inline constexpr std::string_view kReportFormat = "ait-report/1";

namespace io {

inline std::string content_digest(Json doc) {
  doc.erase("digest");
  return sha256_hex(doc.dump());
}

inline Json seal(Json doc) {
  doc["digest"] = content_digest(doc);
  return doc;
}

/// Checks format tag and digest; returns the document.
inline Json unseal(const std::string& text, std::string_view format) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw CorruptFile(std::string("not a valid document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || !doc["format"].is_string())
    throw CorruptFile("document has no format tag");
  std::string tag = doc["format"].get<std::string>();
  if (tag != format) {
    auto family = format.substr(0, format.find('/'));
    if (tag.rfind(std::string(family) + "/", 0) == 0)
      throw VersionUnknown("unsupported version '" + tag + "' (this build reads " +
                           std::string(format) + ")");
    throw CorruptFile("expected a " + std::string(format) + " document, found '" + tag + "'");
  }
  if (!doc.contains("digest") || !doc["digest"].is_string() ||
      doc["digest"].get<std::string>() != content_digest(doc))
    throw CorruptFile("content digest mismatch");
  return doc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto " + path + ": " + ec.message());
  }
}

inline Json dyadic_json(const Dyadic& d) { return {{"num", d.numerator().str()}, {"exp", d.exponent()}}; }

inline Dyadic dyadic_from(const Json& j) {
  return Dyadic(BigInt(j.at("num").get<std::string>()), j.at("exp").get<unsigned>());
}

inline Json limits_json(const Limits& l) {
  return {{"L", l.max_len}, {"T", l.max_steps}, {"V_max", l.value_cap}};
}

inline Limits limits_from(const Json& j) {
  Limits l{j.at("L").get<unsigned>(), j.at("T").get<std::uint64_t>(), j.at("V_max").get<Natural>()};
  l.validate();
  return l;
}

inline Json dataset_json(const Dataset& d) {
  Json a = Json::array();
  for (const Point& p : d) a.push_back({p.x, p.y});
  return a;
}

inline Dataset dataset_from(const Json& j) {
  Dataset d;
  for (const auto& p : j) d.push_back({p.at(0).get<Natural>(), p.at(1).get<Natural>()});
  return d;
}

}  // namespace io

/// Identity of a table: machine, limits, condition and every mass it holds.
inline Json table_to_json(const ComplexityTable& t) {
  Json doc;
  doc["format"] = kTableFormat;
  doc["tool_version"] = kToolVersion;
  doc["machine_id"] = t.machine_id;
  doc["machine_digest"] = machine_digest();
  doc["limits"] = io::limits_json(t.limits);
  doc["condition"] = t.condition;
  doc["kraft"] = io::dyadic_json(t.kraft);
  doc["omega"] = io::dyadic_json(t.omega);
  doc["tail"] = io::dyadic_json(t.tail_mass);
  doc["length_profile"] = t.halting_by_length;
  Json entries = Json::array();
  for (const auto& [x, e] : t.entries)
    entries.push_back({{"output", x},
                       {"k", e.k},
                       {"m_num", e.m.numerator().str()},
                       {"m_exp", e.m.exponent()},
                       {"shortest_bits", e.shortest.to_string()},
                       {"program_count", e.program_count}});
  doc["entries"] = std::move(entries);
  if (t.programs) {
    Json progs = Json::array();
    for (const auto& r : *t.programs)
      progs.push_back({{"bits", r.program.to_string()}, {"output", r.output}, {"steps", r.steps}});
    doc["programs"] = std::move(progs);
  }
  return io::seal(std::move(doc));
}

inline ComplexityTable table_from_json(const Json& doc) {
  try {
    if (doc.at("machine_id").get<std::string>() != kMachineId ||
        doc.at("machine_digest").get<std::string>() != machine_digest())
      throw VersionUnknown("table was built for another machine (" +
                           doc.at("machine_id").get<std::string>() + ")");
    ComplexityTable t;
    t.machine_id = doc.at("machine_id").get<std::string>();
    t.limits = io::limits_from(doc.at("limits"));
    t.condition = doc.at("condition").get<Natural>();
    t.kraft = io::dyadic_from(doc.at("kraft"));
    t.omega = io::dyadic_from(doc.at("omega"));
    t.tail_mass = io::dyadic_from(doc.at("tail"));
    t.halting_by_length = doc.at("length_profile").get<std::vector<std::uint64_t>>();
    for (const auto& e : doc.at("entries")) {
      TableEntry entry;
      entry.k = e.at("k").get<unsigned>();
      entry.m = Dyadic(BigInt(e.at("m_num").get<std::string>()), e.at("m_exp").get<unsigned>());
      entry.shortest = Program::parse(e.at("shortest_bits").get<std::string>());
      entry.program_count = e.at("program_count").get<std::uint64_t>();
      t.entries.emplace(e.at("output").get<Natural>(), std::move(entry));
    }
    if (doc.contains("programs")) {
      std::vector<ProgramRecord> progs;
      for (const auto& r : doc.at("programs"))
        progs.push_back({Program::parse(r.at("bits").get<std::string>()),
                         r.at("output").get<Natural>(), r.at("steps").get<std::uint64_t>()});
      t.programs = std::move(progs);
    }
    return t;
  } catch (const Json::exception& e) {
    throw CorruptFile(std::string("malformed table: ") + e.what());
  }
}

inline std::string table_digest(const ComplexityTable& t) {
  return table_to_json(t).at("digest").get<std::string>();
}

inline void save_table(const ComplexityTable& t, const std::string& path) {
  io::write_atomic(path, table_to_json(t).dump(1) + "\n");
}

inline ComplexityTable load_table(const std::string& path) {
  return table_from_json(io::unseal(io::read_file(path), kTableFormat));
}

}  // namespace ait
