#pragma once

// Run artifacts: the manifest that brackets a run (written before outputs,
// finalized after), the JSON report printed to stdout and stored in the run
// directory, and the flat per-replica CSV. Report and CSV content carry no
// timestamps, so a rerun from the same configuration and seed reproduces them
// byte for byte; wall-clock data lives only in the manifest.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bidosim/experiments.hpp"
#include "bidosim/ionic.hpp"
#include "bidosim/sim.hpp"

namespace bidosim {

inline constexpr const char* tool_version = "0.1.0";

struct RunManifest {
  std::string version = tool_version;
  std::string command;
  std::uint64_t master_seed = 0;
  std::string operator_fingerprint;
  std::string config_echo;  // canonical resolved configuration text
  std::string started_at;   // ISO 8601 UTC; empty until the run starts
  std::string finished_at;  // empty until finalized
  std::vector<std::string> outputs;
};

inline std::string iso_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Compact variant used in run-directory names.
inline std::string timestamp_token() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["version"] = m.version;
  j["command"] = m.command;
  j["master_seed"] = m.master_seed;
  j["operator_fingerprint"] = m.operator_fingerprint;
  j["config"] = m.config_echo;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  return j;
}

inline nlohmann::json report_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["name"] = rep.name;
  j["verdict"] = verdict_name(rep.verdict);
  j["bound"] = rep.bound;
  // Convenience top-level scalar: the estimate compared against the bound
  // (the first estimate when no single one plays that role).
  const int pick = rep.primary >= 0 ? rep.primary : (rep.estimates.empty() ? -1 : 0);
  if (pick >= 0) {
    j["estimate"] = rep.estimates[static_cast<std::size_t>(pick)].value;
    j["se"] = rep.estimates[static_cast<std::size_t>(pick)].se;
  } else {
    j["estimate"] = nullptr;
    j["se"] = nullptr;
  }
  nlohmann::json estimates = nlohmann::json::array();
  for (const auto& e : rep.estimates)
    estimates.push_back({{"label", e.label}, {"estimate", e.value}, {"se", e.se}});
  j["estimates"] = estimates;
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [key, value] : rep.inputs) inputs[key] = value;
  j["inputs"] = inputs;
  j["diagnostics"] = rep.diagnostics;
  j["replicas_used"] = rep.replicas_used;
  j["replicas_excluded"] = rep.replicas_excluded;
  return j;
}

// Flat per-replica statistics, one row per replica, %.17g values.
inline std::string replica_csv(const ExperimentReport& rep) {
  std::string out = "replica";
  for (const auto& col : rep.replica_columns) {
    out += ',';
    out += col;
  }
  out += '\n';
  char buf[40];
  for (std::size_t r = 0; r < rep.replica_stats.size(); ++r) {
    out += std::to_string(r);
    for (double v : rep.replica_stats[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json condition_report_json(const IonicModel& model,
                                            const ConditionReport& rep) {
  nlohmann::json j;
  j["name"] = "check_model";
  j["model"] = ionic_kind_name(model.kind);
  j["growth"] = {{"c", rep.growth.c},
                 {"unbounded", rep.growth.unbounded},
                 {"message", rep.growth.message}};
  j["coercivity"] = {{"a", rep.coercivity.a},
                     {"b", rep.coercivity.b},
                     {"c", rep.coercivity.c},
                     {"violated", rep.coercivity.violated},
                     {"message", rep.coercivity.message}};
  j["monotonicity"] = {{"c1", rep.monotonicity.c1},
                       {"c2", rep.monotonicity.c2},
                       {"violation", rep.monotonicity.violation},
                       {"message", rep.monotonicity.message}};
  j["coefficient_condition"] = {{"satisfied", rep.coefficient.satisfied},
                                {"alpha_criterion", rep.coefficient.alpha_criterion},
                                {"c3_criterion", rep.coefficient.c3_criterion},
                                {"requirement", rep.coefficient.requirement},
                                {"ratio", rep.coefficient.ratio},
                                {"margin", rep.coefficient.margin},
                                {"c1_used", rep.coefficient.c1_used},
                                {"c2_used", rep.coefficient.c2_used}};
  j["box"] = {{"u_lo", rep.box.u_lo},
              {"u_hi", rep.box.u_hi},
              {"w_lo", rep.box.w_lo},
              {"w_hi", rep.box.w_hi}};
  j["notes"] = rep.notes;
  // Certification summary: bounded growth, quartic dissipation, and the
  // coefficient condition all hold on the box.
  j["certified"] = !rep.growth.unbounded && !rep.coercivity.violated &&
                   !rep.monotonicity.violation && rep.coefficient.satisfied;
  return j;
}

}  // namespace bidosim
