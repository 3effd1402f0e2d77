#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgloc/config.hpp"

namespace kgloc::harness {

using json = nlohmann::json;

// One tested relation. violated <=> violation > limit; limit is fail_multiplier * err for
// error-aware checks and a fixed tolerance otherwise.
struct Check {
    std::string name;
    std::string anchor;  // the identity or inequality under test
    double value = 0.0;
    double reference = 0.0;
    double violation = 0.0;
    double err = 0.0;
    double limit = 0.0;
    bool asserted = true;
    bool violated = false;
    bool failed = false;  // asserted && violated

    double margin() const;  // violation / err
    double slack() const;   // 1 - violation / limit (negative on failure)
    bool operator==(const Check&) const = default;
};

struct CaseRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string hash;  // FNV-1a of the scenario dump
    json scenario;
    std::vector<Check> checks;
    std::string note;
    bool failed = false;

    // the check with the smallest slack (asserted checks first)
    const Check* worst() const;
    bool operator==(const CaseRecord&) const = default;
};

struct Stats {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    bool operator==(const Stats&) const = default;
};

struct SuiteVerdict {
    std::string name;
    std::string anchor;
    bool asserted = true;          // exploratory suites report without a verdict
    bool expect_violation = false; // demo: success requires a detected violation
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::size_t violations_found = 0;  // violated non-asserted checks on the suite anchor
    bool passed = true;
    std::vector<CaseRecord> records;
    Stats slack;
    Stats err;
    Stats margin;
    std::map<std::string, std::vector<std::array<double, 2>>> series;  // plot data
    std::string summary;
    bool operator==(const SuiteVerdict&) const = default;
};

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);
std::uint64_t case_seed(std::uint64_t run_seed, const std::string& suite, std::size_t index);

// recompute counts, statistics and the pass flag from the records
void finalize(SuiteVerdict& v);

SuiteVerdict suite_normalization(const cfg::RunConfig& c);
SuiteVerdict suite_dual_formula(const cfg::RunConfig& c);
SuiteVerdict suite_moments(const cfg::RunConfig& c);
SuiteVerdict suite_current_causality(const cfg::RunConfig& c);
SuiteVerdict suite_mantle_flux(const cfg::RunConfig& c);
SuiteVerdict suite_causal_evolution(const cfg::RunConfig& c);
SuiteVerdict suite_castrigiano_m(const cfg::RunConfig& c);
SuiteVerdict demo_nw_violation(const cfg::RunConfig& c);
SuiteVerdict suite_almost_localized(const cfg::RunConfig& c);
SuiteVerdict suite_covariance(const cfg::RunConfig& c);
SuiteVerdict suite_exploratory_a(const cfg::RunConfig& c);

SuiteVerdict run_suite(const std::string& name, const cfg::RunConfig& c);
// enabled suites of the selection, in run order
std::vector<std::string> selected_suites(const cfg::RunConfig& c);

}  // namespace kgloc::harness
