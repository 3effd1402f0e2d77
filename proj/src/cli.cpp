#include "kgloc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "kgloc/causality.hpp"
#include "kgloc/config.hpp"
#include "kgloc/log.hpp"
#include "kgloc/observables.hpp"
#include "kgloc/report.hpp"
#include "kgloc/wavefields.hpp"

namespace kgloc {

namespace {

using harness::json;

json prob_json(const obs::ProbabilityValue& p) {
    return {{"observable", obs::to_string(p.observable)},
            {"value", p.value},
            {"err_est", p.err},
            {"region", p.region},
            {"method", p.method},
            {"clamped", p.clamped},
            {"slice", {{"frame", {p.slice.frame.n[0], p.slice.frame.n[1], p.slice.frame.n[2], p.slice.frame.n[3]}},
                       {"time", p.slice.time}}}};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    return f;
}

struct Options {
    std::string config;
    std::string out;
    int threads = -1;
    long long seed = -1;
    std::string suite = "all";
    std::string observable;
    std::string what;
    std::string demo;
    double t2 = std::numeric_limits<double>::quiet_NaN();
};

cfg::RunConfig load(const Options& o) {
    cfg::RunConfig c = o.config.empty() ? cfg::default_config() : cfg::load_config(o.config);
    if (o.threads >= 0) c.threads = o.threads;
    if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

int run_suites(const cfg::RunConfig& c, const std::vector<std::string>& names, std::ostream& out) {
    std::vector<harness::SuiteVerdict> vs;
    for (const auto& n : names) {
        info("running suite " + n);
        vs.push_back(harness::run_suite(n, c));
        out << n << ": " << (vs.back().asserted ? (vs.back().passed ? "PASS" : "FAIL") : "REPORT") << " ("
            << vs.back().summary << ")\n"
            << std::flush;
    }
    std::string path = report::write_report(vs, c.output_dir, c);
    out << "\n" << report::summary_table(vs) << "report: " << path << "\n";
    for (const auto& v : vs)
        if (!v.passed) return kExitSuiteFailed;
    return kExitOk;
}

int cmd_suite(const Options& o, std::ostream& out) {
    cfg::RunConfig c = load(o);
    std::vector<std::string> names;
    if (o.suite == "all") {
        names = harness::selected_suites(c);
    } else {
        if (!cfg::is_suite(o.suite)) throw cfg::ConfigError("<command line>", 0, "suite", "unknown suite '" + o.suite + "'");
        names = {o.suite};
    }
    return run_suites(c, names, out);
}

int cmd_demo(const Options& o, std::ostream& out) {
    cfg::RunConfig c = load(o);
    return run_suites(c, {"nw_violation"}, out);
}

int cmd_prob(const Options& o, std::ostream& out) {
    cfg::RunConfig c = load(o);
    auto psi = cfg::build_state(c.state, c.grid, c.region);
    geom::Region r = c.region.build(c.grid.dim);
    geom::SliceRef sl = c.slice.build();
    json rep = {{"schema_version", report::kSchemaVersion}, {"config", cfg::dump_config(c)}};
    if (o.observable == "q") {
        // NW and Terno live on slices of the native frame
        rep["probability"] = prob_json(obs::nw_probability(psi, sl, r));
    } else if (o.observable == "a") {
        auto a = obs::terno_probability(psi, sl, r);
        auto b = obs::terno_probability_energy_form(psi, sl, r);
        rep["probability"] = prob_json(a);
        rep["energy_form"] = prob_json(b);
    } else {
        auto m = obs::m_povm_probability(psi, geom::Frame::from_velocity(c.generator), sl, r);
        rep["probability"] = prob_json(m.current_form);
        rep["operator_form"] = prob_json(m.operator_form);
        rep["difference"] = m.difference;
        rep["agree"] = m.agree;
        rep["flagged"] = m.flagged;
    }
    std::string text = rep.dump(1);
    if (o.out.empty()) {
        out << text << "\n";
    } else {
        auto f = open_out(o.out);
        f << text << "\n";
        out << "wrote " << o.out << "\n";
    }
    return kExitOk;
}

void position_columns(std::ostream& f, int d) {
    const char* names[3] = {"x", "y", "z"};
    for (int k = 0; k < d; ++k) f << names[k] << ',';
}

int cmd_export(const Options& o, std::ostream& out) {
    cfg::RunConfig c = load(o);
    if (o.out.empty()) throw cfg::ConfigError("<command line>", 0, "out", "export needs --out");
    auto psi = cfg::build_state(c.state, c.grid, c.region);
    const auto& g = psi.grid;
    const int d = g.dim();
    geom::Frame n0 = geom::Frame::from_velocity(c.generator);
    double t = c.slice.time;
    if (o.what == "state") {
        mom::save_state(psi, o.out);
    } else if (o.what == "field") {
        auto slab = wave::terno_field(psi, t, n0, 1);
        auto f = open_out(o.out);
        position_columns(f, d);
        f << "re_phi,im_phi\n";
        int i[3];
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            g.unravel(idx, i);
            for (int k = 0; k < d; ++k) f << g.position(i[k]) << ',';
            auto v = slab.fields[0][0][idx];
            f << v.real() << ',' << v.imag() << '\n';
        }
    } else if (o.what == "current") {
        auto slab = wave::terno_field(psi, t, n0, 1);
        auto J = wave::current(wave::stress_energy(slab), n0);
        auto f = open_out(o.out);
        position_columns(f, d);
        f << "j0,j1,j2,j3\n";
        int i[3];
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            g.unravel(idx, i);
            for (int k = 0; k < d; ++k) f << g.position(i[k]) << ',';
            const auto& j = J.J[idx];
            f << j[0] << ',' << j[1] << ',' << j[2] << ',' << j[3] << '\n';
        }
    } else {
        caus::MantleSpec spec;
        spec.source = c.region.build(d);
        spec.t1 = t;
        spec.t2 = std::isnan(o.t2) ? t + 1.0 : o.t2;
        spec.generator = n0;
        auto samples = caus::mantle_samples(psi, spec, true);
        auto f = open_out(o.out);
        f << "t,theta,phi,";
        position_columns(f, d);
        f << "weight,jv,abs_phi\n";
        for (const auto& s : samples) {
            f << s.t << ',' << s.theta << ',' << s.phi << ',';
            for (int k = 0; k < d; ++k) f << s.x[k] << ',';
            f << s.weight << ',' << s.jv << ',' << s.phi_abs << '\n';
        }
    }
    out << "wrote " << o.out << "\n";
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Localization observables of a free Klein-Gordon particle: probabilities, currents, causality suites",
                 "kgloc"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--config,-c", o.config, "config file");
        s->add_option("--out,-o", o.out, "output directory (suite, demo) or file (prob, export)");
        s->add_option("--threads", o.threads, "worker threads, overrides the config and KGLOC_THREADS");
        s->add_option("--seed", o.seed, "run seed, overrides the config");
    };
    auto* suite = app.add_subcommand("suite", "run property suites and write a report");
    suite->add_option("name", o.suite, "suite name or 'all'")->required();
    common(suite);
    auto* prob = app.add_subcommand("prob", "probability of the configured region for the configured state");
    prob->add_option("observable", o.observable, "q, a or m")->required()->check(CLI::IsMember({"q", "a", "m"}));
    common(prob);
    auto* demo = app.add_subcommand("demo", "demonstrations");
    demo->add_option("name", o.demo, "nw-violation")->required()->check(CLI::IsMember({"nw-violation"}));
    common(demo);
    auto* exp = app.add_subcommand("export", "dump field, current, mantle samples or the state");
    exp->add_option("what", o.what, "field, current, mantle or state")
        ->required()
        ->check(CLI::IsMember({"field", "current", "mantle", "state"}));
    exp->add_option("--t2", o.t2, "end time of the mantle band (default: slice time + 1)");
    common(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (*suite) return cmd_suite(o, out);
        if (*prob) return cmd_prob(o, out);
        if (*demo) return cmd_demo(o, out);
        return cmd_export(o, out);
    } catch (const cfg::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const cfg::MissingFile& e) {
        err << "missing file: " << e.path << "\n";
        return kExitMissingFile;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace kgloc
