#pragma once

#include <string>
#include <vector>

#include "kgloc/harness.hpp"

namespace kgloc::report {

using harness::json;
using harness::SuiteVerdict;

constexpr int kSchemaVersion = 1;

json to_json(const SuiteVerdict& v);
SuiteVerdict verdict_from_json(const json& j);

// report.json + <suite>.csv (one row per case) + <suite>_<series>.csv + summary.txt under dir.
// Returns the path of report.json. Throws std::runtime_error when dir is not writable.
std::string write_report(const std::vector<SuiteVerdict>& verdicts, const std::string& dir,
                         const cfg::RunConfig& config);

struct LoadedReport {
    int schema_version = 0;
    std::string config;  // canonical config text
    std::vector<SuiteVerdict> verdicts;
};
LoadedReport read_report(const std::string& path);

// fixed-width human-readable table
std::string summary_table(const std::vector<SuiteVerdict>& verdicts);

// one CSV row per case; header first
std::string cases_csv(const SuiteVerdict& v);

}  // namespace kgloc::report
