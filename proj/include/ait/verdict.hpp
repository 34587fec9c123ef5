#pragma once

#include <string>

#include "ait/table_io.hpp"

namespace ait {

/// Outcome of one named check. `measured` holds the constants it computed.
struct Verdict {
  std::string name;
  bool pass = false;
  Json measured = Json::object();
  std::string details;
  std::string inputs_digest;
};

inline Json verdict_json(const Verdict& v) {
  return {{"name", v.name},
          {"pass", v.pass},
          {"measured", v.measured},
          {"details", v.details},
          {"inputs_digest", v.inputs_digest}};
}

inline Verdict verdict_from(const Json& j) {
  return {j.at("name").get<std::string>(), j.at("pass").get<bool>(), j.at("measured"),
          j.at("details").get<std::string>(), j.at("inputs_digest").get<std::string>()};
}

/// A sealed ait-report/1 document around one verdict.
inline Json verdict_report(const Verdict& v, const Json& config = Json::object()) {
  Json doc;
  doc["format"] = kReportFormat;
  doc["kind"] = "verdict";
  doc["tool_version"] = kToolVersion;
  doc["machine_id"] = kMachineId;
  doc["machine_digest"] = machine_digest();
  doc["config"] = config;
  doc["verdict"] = verdict_json(v);
  return io::seal(std::move(doc));
}

}  // namespace ait
