#include "kgloc/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kgloc::report {

namespace fs = std::filesystem;
using harness::CaseRecord;
using harness::Check;
using harness::Stats;

namespace {

// json numbers cannot hold inf/nan; keep them as strings
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double num(const json& j) {
    if (j.is_number()) return j.get<double>();
    std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("bad number '" + s + "' in report");
}

json stats_json(const Stats& s) {
    return {{"min", num(s.min)}, {"median", num(s.median)}, {"max", num(s.max)}, {"count", s.count}};
}

Stats stats_from(const json& j) {
    return {num(j.at("min")), num(j.at("median")), num(j.at("max")), j.at("count").get<std::size_t>()};
}

json check_json(const Check& c) {
    return {{"name", c.name},           {"anchor", c.anchor},       {"value", num(c.value)},
            {"reference", num(c.reference)}, {"violation", num(c.violation)}, {"err_est", num(c.err)},
            {"limit", num(c.limit)},    {"asserted", c.asserted},   {"violated", c.violated},
            {"failed", c.failed},       {"margin", num(c.margin())}};
}

Check check_from(const json& j) {
    Check c;
    c.name = j.at("name");
    c.anchor = j.at("anchor");
    c.value = num(j.at("value"));
    c.reference = num(j.at("reference"));
    c.violation = num(j.at("violation"));
    c.err = num(j.at("err_est"));
    c.limit = num(j.at("limit"));
    c.asserted = j.at("asserted");
    c.violated = j.at("violated");
    c.failed = j.at("failed");
    return c;
}

json record_json(const CaseRecord& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    return {{"index", r.index}, {"seed", r.seed},     {"hash", r.hash},   {"scenario", r.scenario},
            {"checks", checks}, {"note", r.note},     {"failed", r.failed}};
}

CaseRecord record_from(const json& j) {
    CaseRecord r;
    r.index = j.at("index");
    r.seed = j.at("seed");
    r.hash = j.at("hash");
    r.scenario = j.at("scenario");
    for (const auto& c : j.at("checks")) r.checks.push_back(check_from(c));
    r.note = j.at("note");
    r.failed = j.at("failed");
    return r;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string g17(double x) {
    std::ostringstream o;
    o << std::setprecision(17) << x;
    return o.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

json to_json(const SuiteVerdict& v) {
    json recs = json::array();
    for (const auto& r : v.records) recs.push_back(record_json(r));
    json series = json::object();
    for (const auto& [k, pts] : v.series) {
        json a = json::array();
        for (const auto& p : pts) a.push_back({num(p[0]), num(p[1])});
        series[k] = a;
    }
    return {{"name", v.name},
            {"anchor", v.anchor},
            {"asserted", v.asserted},
            {"expect_violation", v.expect_violation},
            {"cases", v.cases},
            {"failures", v.failures},
            {"violations_found", v.violations_found},
            {"passed", v.passed},
            {"summary", v.summary},
            {"slack", stats_json(v.slack)},
            {"err_est", stats_json(v.err)},
            {"margin", stats_json(v.margin)},
            {"series", series},
            {"records", recs}};
}

SuiteVerdict verdict_from_json(const json& j) {
    SuiteVerdict v;
    v.name = j.at("name");
    v.anchor = j.at("anchor");
    v.asserted = j.at("asserted");
    v.expect_violation = j.at("expect_violation");
    v.cases = j.at("cases");
    v.failures = j.at("failures");
    v.violations_found = j.at("violations_found");
    v.passed = j.at("passed");
    v.summary = j.at("summary");
    v.slack = stats_from(j.at("slack"));
    v.err = stats_from(j.at("err_est"));
    v.margin = stats_from(j.at("margin"));
    for (const auto& [k, pts] : j.at("series").items()) {
        auto& dst = v.series[k];
        for (const auto& p : pts) dst.push_back({num(p.at(0)), num(p.at(1))});
    }
    for (const auto& r : j.at("records")) v.records.push_back(record_from(r));
    return v;
}

std::string cases_csv(const SuiteVerdict& v) {
    std::ostringstream o;
    o << "index,scenario_hash,seed,failed,worst_check,asserted,value,reference,violation,err_est,limit,margin,note\n";
    for (const auto& r : v.records) {
        const Check* w = r.worst();
        o << r.index << ',' << r.hash << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ',';
        if (w)
            o << csv_field(w->name) << ',' << (w->asserted ? 1 : 0) << ',' << g17(w->value) << ',' << g17(w->reference)
              << ',' << g17(w->violation) << ',' << g17(w->err) << ',' << g17(w->limit) << ',' << g17(w->margin());
        else
            o << ",,,,,,,";
        o << ',' << csv_field(r.note) << '\n';
    }
    return o.str();
}

std::string summary_table(const std::vector<SuiteVerdict>& verdicts) {
    std::ostringstream o;
    o << std::left << std::setw(20) << "suite" << std::setw(8) << "verdict" << std::right << std::setw(7) << "cases"
      << std::setw(9) << "failures" << std::setw(12) << "min slack" << std::setw(12) << "med err" << "\n";
    for (const auto& v : verdicts) {
        std::string verdict = !v.asserted ? "REPORT" : (v.passed ? "PASS" : "FAIL");
        o << std::left << std::setw(20) << v.name << std::setw(8) << verdict << std::right << std::setw(7) << v.cases
          << std::setw(9) << v.failures << std::setw(12) << std::setprecision(3) << v.slack.min << std::setw(12)
          << v.err.median;
        if (v.expect_violation) o << "  violations found: " << v.violations_found;
        o << "\n";
    }
    return o.str();
}

std::string write_report(const std::vector<SuiteVerdict>& verdicts, const std::string& dir,
                         const cfg::RunConfig& config) {
    fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
    json suites = json::array();
    bool all = true;
    for (const auto& v : verdicts) {
        suites.push_back(to_json(v));
        all = all && v.passed;
        write_file(root / (v.name + ".csv"), cases_csv(v));
        for (const auto& [k, pts] : v.series) {
            std::ostringstream s;
            s << "x,y\n";
            for (const auto& p : pts) s << g17(p[0]) << ',' << g17(p[1]) << '\n';
            write_file(root / (v.name + "_" + k + ".csv"), s.str());
        }
    }
    json rep = {{"schema_version", kSchemaVersion},
                {"tool", "kgloc"},
                {"seed", config.seed},
                {"config", cfg::dump_config(config)},
                {"all_passed", all},
                {"suites", suites}};
    fs::path out = root / "report.json";
    write_file(out, rep.dump(1) + "\n");
    write_file(root / "summary.txt", summary_table(verdicts));
    return out.string();
}

LoadedReport read_report(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw cfg::MissingFile(path);
    json j = json::parse(f);
    LoadedReport r;
    r.schema_version = j.at("schema_version");
    if (r.schema_version != kSchemaVersion)
        throw std::runtime_error("unsupported report schema " + std::to_string(r.schema_version));
    r.config = j.at("config");
    for (const auto& s : j.at("suites")) r.verdicts.push_back(verdict_from_json(s));
    return r;
}

}  // namespace kgloc::report
