#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace shiftlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kSchemaVersion = 1;

struct RunReport {
  int schema = kSchemaVersion;
  std::string version;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json violations = nlohmann::json::array();
  std::vector<std::uint64_t> seeds;
  double duration_seconds = 0.0;
  int exit_code = kExitOk;
  std::string error;

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// The report JSON without fields that legitimately differ between runs.
nlohmann::json stable_view(const nlohmann::json& report);

struct RunResult {
  int exit_code = kExitOk;
  RunReport report;
};

// args excludes the program name. Human-readable output goes to `out`
// (suppressed by --quiet), diagnostics to `err`.
RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shiftlab::cli
