// Acceptance run: every suite at the default configuration, then each criterion re-evaluated
// from the raw check records with the thresholds below. Exit status 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kgloc/config.hpp"
#include "kgloc/harness.hpp"
#include "kgloc/log.hpp"
#include "kgloc/report.hpp"

using namespace kgloc;
using harness::CaseRecord;
using harness::Check;
using harness::json;
using harness::SuiteVerdict;

namespace {

// pinned thresholds
constexpr double kNormTol = 1e-6;
constexpr double kNormSeconds = 60.0;
constexpr double kDualSeconds = 600.0;
constexpr double kErrMult = 3.0;
constexpr double kFirstRel = 1e-6;  // times the packet width
constexpr double kTightTol = 1e-3;
constexpr double kHeavyTol = 1e-3;
constexpr double kHeavyMass = 100.0;
constexpr double kTauC = 1e-10;
constexpr double kDivTol = 1e-6;
constexpr double kExactTol = 1e-9;
constexpr double kAlmostFloor = 0.95;
constexpr double kVMax = 0.5;

struct Run {
    SuiteVerdict v;
    double seconds = 0.0;
};

struct Outcome {
    bool pass = true;
    std::string detail;
};

bool is_curated(const CaseRecord& r) { return r.scenario.is_object() && r.scenario.contains("curated"); }
bool errored(const CaseRecord& r) { return r.note.rfind("error", 0) == 0; }

bool starts(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

// |violation| within mult * err (one-sided if the check is one-sided)
bool within_err(const Check& c, double mult = kErrMult, double extra = 0.0) {
    return c.violation <= mult * c.err + extra;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct Tally {
    std::size_t seen = 0, bad = 0;
    double worst = 0.0;  // violation / limit
    void add(bool ok, double ratio) {
        ++seen;
        bad += !ok;
        if (std::isfinite(ratio)) worst = std::max(worst, ratio);
    }
};

Outcome c1(const std::map<std::string, Run>& R) {
    const Run& run = R.at("normalization");
    Tally t;
    std::size_t states = 0, errors = 0;
    std::map<char, std::size_t> kinds;
    for (const auto& r : run.v.records) {
        errors += errored(r);
        ++states;
        for (const auto& c : r.checks) {
            if (c.anchor != run.v.anchor) continue;
            kinds[c.name[0]]++;
            t.add(c.violation <= kNormTol, c.violation / kNormTol);
        }
    }
    Outcome o;
    o.pass = errors == 0 && t.bad == 0 && states >= 20 && kinds['Q'] >= 20 && kinds['A'] >= 40 && kinds['M'] >= 40 &&
             run.seconds < kNormSeconds;
    o.detail = fmt("%.0f states, worst |P-1|/1e-6 = %.3g, %.1f s", double(states), t.worst, run.seconds);
    return o;
}

Outcome c2(const std::map<std::string, Run>& R) {
    const Run& run = R.at("dual_formula");
    Tally a, m;
    std::size_t errors = 0;
    for (const auto& r : run.v.records) {
        errors += errored(r);
        for (const auto& c : r.checks) {
            double ratio = c.err > 0 ? c.violation / (kErrMult * c.err) : (c.violation > 0 ? INFINITY : 0.0);
            if (c.name == "A multiplier form vs energy form") a.add(within_err(c), ratio);
            if (c.name == "M current form vs operator form") m.add(within_err(c), ratio);
        }
    }
    Outcome o;
    o.pass = errors == 0 && a.bad == 0 && m.bad == 0 && a.seen >= 50 && m.seen >= 50 && run.seconds < kDualSeconds;
    o.detail = fmt("A pairs %.0f (worst %.3g of 3 err), M pairs %.0f", double(a.seen), a.worst, double(m.seen)) +
               fmt(" (worst %.3g), %.1f s", m.worst, run.seconds);
    return o;
}

Outcome c3(const std::map<std::string, Run>& R) {
    Tally t;
    std::size_t states = 0, errors = 0;
    for (const auto& r : R.at("moments").v.records) {
        if (is_curated(r)) continue;
        errors += errored(r);
        if (errored(r)) continue;
        ++states;
        const auto& w = r.scenario.at("widths");
        std::size_t axis = 0;
        for (const auto& c : r.checks) {
            if (!starts(c.name, "first moment vs NW position")) continue;
            double lim = kFirstRel * w.at(axis++).get<double>();
            t.add(std::abs(c.value - c.reference) < lim, std::abs(c.value - c.reference) / lim);
        }
        if (axis != w.size() || axis == 0) ++errors;
    }
    Outcome o;
    o.pass = errors == 0 && t.bad == 0 && states >= 50;
    o.detail = fmt("%.0f states, %.0f axis checks, worst |diff|/(1e-6 width) = %.3g", double(states), double(t.seen), t.worst);
    return o;
}

Outcome c4(const std::map<std::string, Run>& R) {
    Tally res, pos;
    std::size_t states = 0, errors = 0;
    double tight = NAN;
    for (const auto& r : R.at("moments").v.records) {
        errors += errored(r);
        if (!is_curated(r)) ++states;
        for (const auto& c : r.checks) {
            if (starts(c.name, "second-moment residual"))
                res.add(within_err(c), c.err > 0 ? c.violation / (kErrMult * c.err) : 0.0);
            if (starts(c.name, "correction positive")) pos.add(c.value > 0.0, 0.0);
            if (c.name == "correction of a tight packet at rest") tight = c.value;
        }
    }
    double mass = 1.0;
    for (const auto& r : R.at("moments").v.records)
        if (is_curated(r) && r.scenario["curated"] == "tight packet at rest") mass = r.scenario["grid"]["mass"].get<double>();
    double target = 1.0 / (2.0 * mass * mass);
    bool tight_ok = std::abs(tight - target) <= kTightTol * target;
    Outcome o;
    o.pass = errors == 0 && res.bad == 0 && pos.bad == 0 && states >= 50 && pos.seen >= 50 && tight_ok;
    o.detail = fmt("residual worst %.3g of 3 err, %.0f positive corrections, ", res.worst, double(pos.seen)) +
               fmt("tight packet %.6f vs %.6f", tight, target);
    return o;
}

Outcome c5(const std::map<std::string, Run>& R) {
    Tally t;
    std::size_t states = 0, errors = 0;
    double heavy = NAN;
    for (const auto& r : R.at("moments").v.records) {
        errors += errored(r);
        bool counted = false;
        for (const auto& c : r.checks) {
            if (!starts(c.name, "Heisenberg bound")) continue;
            t.add(c.value >= c.reference - kErrMult * c.err, c.err > 0 ? c.violation / (kErrMult * c.err) : 0.0);
            counted = true;
        }
        states += counted && !is_curated(r);
        if (is_curated(r) && r.scenario["curated"] == "mass sweep") {
            const auto& ms = r.scenario["masses"];
            for (std::size_t k = 0; k < ms.size(); ++k)
                if (ms[k].get<double>() == kHeavyMass) heavy = r.scenario["rhs"][k].get<double>();
        }
    }
    Outcome o;
    o.pass = errors == 0 && t.bad == 0 && states >= 100 && std::abs(heavy - 0.5) < kHeavyTol;
    o.detail = fmt("%.0f states, worst %.3g of 3 err, rhs at m=100: %.6f", double(states), t.worst, heavy);
    return o;
}

Outcome c6(const std::map<std::string, Run>& R) {
    Tally fd, sub;
    std::size_t states = 0, errors = 0;
    for (const auto& r : R.at("moments").v.records) {
        if (is_curated(r)) continue;
        errors += errored(r);
        double dt = r.scenario.value("dt", 0.0);
        bool any = false;
        for (const auto& c : r.checks) {
            if (starts(c.name, "finite-difference velocity"))
                fd.add(within_err(c, kErrMult, dt * dt), c.violation / (kErrMult * c.err + dt * dt));
            if (c.name == "sum of squared velocities below 1") {
                sub.add(c.value < 1.0, c.value);
                any = true;
            }
        }
        states += any;
    }
    Outcome o;
    o.pass = errors == 0 && fd.bad == 0 && sub.bad == 0 && states >= 100;
    o.detail = fmt("%.0f states, finite difference worst %.3g of (3 err + dt^2), max sum v^2 %.4f", double(states), fd.worst,
                   sub.worst);
    return o;
}

Outcome c7(const std::map<std::string, Run>& R) {
    Tally cur, en, div;
    std::size_t errors = 0;
    for (const auto& r : R.at("current_causality").v.records) {
        errors += errored(r);
        for (const auto& c : r.checks) {
            if (c.name == "causal current at every grid point") cur.add(c.value == 1.0, 1.0 - c.value);
            if (c.name == "nonnegative energy density at every grid point") en.add(c.value == 1.0, 1.0 - c.value);
            if (c.name == "divergence relative to scale") div.add(c.value < kDivTol, c.value / kDivTol);
        }
    }
    Outcome o;
    o.pass = errors == 0 && cur.bad == 0 && en.bad == 0 && div.bad == 0 && cur.seen >= 50 && en.seen >= 50 && div.seen >= 50;
    o.detail = fmt("%.0f states at tau_c %.0e, worst divergence/1e-6 = %.3g", double(cur.seen), kTauC, div.worst);
    return o;
}

Outcome c8(const std::map<std::string, Run>& R) {
    Tally flux, bal, pt;
    std::size_t errors = 0;
    for (const auto& r : R.at("mantle_flux").v.records) {
        errors += errored(r);
        for (const auto& c : r.checks) {
            if (c.name == "flux nonnegative") flux.add(within_err(c), c.err > 0 ? c.violation / (kErrMult * c.err) : 0.0);
            if (c.name == "probability balance") bal.add(within_err(c), c.err > 0 ? c.violation / (kErrMult * c.err) : 0.0);
            if (c.name == "inward current fraction") pt.add(c.value == 1.0, 1.0 - c.value);
        }
    }
    Outcome o;
    o.pass = errors == 0 && flux.bad == 0 && bal.bad == 0 && pt.bad == 0 && flux.seen >= 30 && bal.seen >= 30 &&
             pt.seen >= 30;
    o.detail = fmt("%.0f scenarios, flux worst %.3g, balance worst %.3g of 3 err", double(flux.seen), flux.worst, bal.worst);
    return o;
}

Outcome c9(const std::map<std::string, Run>& R) {
    std::size_t d3 = 0, d1 = 0, bad = 0, errors = 0, fwd = 0, bwd = 0;
    for (const auto& r : R.at("causal_evolution").v.records) {
        errors += errored(r);
        if (errored(r) || is_curated(r)) {
            for (const auto& c : r.checks) bad += !within_err(c);
            continue;
        }
        int d = r.scenario["grid"]["dim"].get<int>();
        (d == 3 ? d3 : d1) += d == 3 || d == 1;
        bool later = r.scenario["t2"].get<double>() > r.scenario["t1"].get<double>();
        (later ? fwd : bwd)++;
        std::size_t orders = 0;
        for (const auto& c : r.checks) {
            bad += !within_err(c);
            orders += starts(c.name, "region at t");
        }
        bad += orders != 2;
    }
    Outcome o;
    o.pass = errors == 0 && bad == 0 && d3 >= 50 && d1 >= 500 && fwd > 0 && bwd > 0;
    o.detail = fmt("%.0f d=3 and %.0f d=1 scenarios, %.0f failures", double(d3), double(d1), double(bad));
    return o;
}

double frame_speed(const json& f) {
    double n0 = f[0].get<double>(), s = 0.0;
    for (int k = 1; k < 4; ++k) s += std::pow(f[k].get<double>() / n0, 2);
    return std::sqrt(s);
}

Outcome c10(const std::map<std::string, Run>& R) {
    std::size_t n = 0, bad = 0, errors = 0;
    double vmax = 0.0;
    for (const auto& r : R.at("castrigiano_m").v.records) {
        errors += errored(r);
        if (errored(r)) continue;
        ++n;
        const auto& sl = r.scenario["slices"];
        vmax = std::max({vmax, frame_speed(sl["source_slice"]["frame"]), frame_speed(sl["target_slice"]["frame"]),
                         frame_speed(r.scenario["generator"])});
        for (const auto& c : r.checks) bad += !within_err(c);
    }
    Outcome o;
    o.pass = errors == 0 && bad == 0 && n >= 30 && vmax <= kVMax + 1e-12;
    o.detail = fmt("%.0f scenarios, %.0f failures, max |v| %.3f", double(n), double(bad), vmax);
    return o;
}

Outcome c11(const std::map<std::string, Run>& R) {
    std::size_t hits = 0, errors = 0;
    double best = 0.0;
    for (const auto& r : R.at("nw_violation").v.records) {
        errors += errored(r);
        const Check* nw = nullptr;
        const Check* a = nullptr;
        for (const auto& c : r.checks) {
            if (c.name == "NW probability of the cone-expanded ball decreases") nw = &c;
            if (c.name == "Terno probability of the same scenario does not decrease") a = &c;
        }
        if (!nw || !a) continue;
        bool violation = nw->violation > kErrMult * nw->err;
        bool a_clean = within_err(*a);
        if (violation && a_clean) {
            ++hits;
            best = std::max(best, nw->violation / nw->err);
        }
    }
    Outcome o;
    o.pass = errors == 0 && hits >= 1;
    o.detail = fmt("%.0f scenarios with NW decrease above 3 err and Terno clean, largest %.3g err", double(hits), best);
    return o;
}

Outcome c12(const std::map<std::string, Run>& R) {
    const auto& recs = R.at("almost_localized").v.records;
    std::size_t errors = 0, bad_corr = 0;
    double first = NAN, last = NAN;
    int last_j = -1;
    for (const auto& r : recs) {
        errors += errored(r);
        if (errored(r)) continue;
        int j = r.scenario["j"].get<int>();
        double A = r.scenario["terno_probability"].get<double>();
        if (j == 0) first = A;
        if (j > last_j) last_j = j, last = A;
        for (const auto& c : r.checks)
            if (c.name == "correction magnitude nonincreasing in j") bad_corr += !within_err(c);
    }
    Outcome o;
    o.pass = errors == 0 && bad_corr == 0 && last_j == 16 && last > kAlmostFloor && last > first;
    o.detail = fmt("A(j=0) %.4f, A(j=16) %.4f, %.0f correction steps out of order", first, last, double(bad_corr));
    return o;
}

Outcome c13(const std::map<std::string, Run>& R) {
    Tally ex, bo;
    std::size_t errors = 0, boost_cases = 0;
    for (const auto& r : R.at("covariance").v.records) {
        errors += errored(r);
        bool b = false;
        for (const auto& c : r.checks) {
            if (c.name.find("exact transform") != std::string::npos) ex.add(c.violation <= kExactTol, c.violation / kExactTol);
            if (c.name.find("under a boost") != std::string::npos) {
                bo.add(within_err(c), c.err > 0 ? c.violation / (kErrMult * c.err) : 0.0);
                b = true;
            }
        }
        boost_cases += b;
    }
    Outcome o;
    o.pass = errors == 0 && ex.bad == 0 && bo.bad == 0 && ex.seen > 0 && boost_cases >= 20;
    o.detail = fmt("exact worst %.3g of 1e-9, %.0f boost cases, worst %.3g of 3 err", ex.worst, double(boost_cases), bo.worst);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    set_verbosity(0);
    auto config = cfg::default_config();
    std::string out = argc > 1 ? argv[1] : "acceptance_report";

    std::map<std::string, Run> runs;
    std::vector<SuiteVerdict> verdicts;
    for (const auto& name : cfg::suite_names()) {
        auto t0 = std::chrono::steady_clock::now();
        Run r;
        r.v = harness::run_suite(name, config);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("  suite %-18s %s (%.1f s)\n", name.c_str(), r.v.summary.c_str(), r.seconds);
        std::fflush(stdout);
        verdicts.push_back(r.v);
        runs[name] = std::move(r);
    }
    try {
        report::write_report(verdicts, out, config);
    } catch (const std::exception& e) {
        std::printf("  report not written: %s\n", e.what());
    }

    struct Criterion {
        const char* title;
        std::function<Outcome(const std::map<std::string, Run>&)> eval;
    };
    const std::vector<Criterion> criteria = {
        {"normalization of Q, A, M", c1},
        {"dual-formula agreement", c2},
        {"first-moment identity", c3},
        {"second-moment identity", c4},
        {"corrected Heisenberg bound", c5},
        {"Ehrenfest velocity and subluminality", c6},
        {"current causality and conservation", c7},
        {"mantle flux", c8},
        {"causal time evolution", c9},
        {"causality of M on boosted slices", c10},
        {"NW violation demo", c11},
        {"almost-localized states", c12},
        {"covariance", c13},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].eval(runs);
        } catch (const std::exception& e) {
            o = {false, std::string("evaluation error: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title, o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
