#include "kgloc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

namespace kgloc::cfg {

ConfigError::ConfigError(const std::string& src, int ln, const std::string& k, const std::string& what)
    : std::runtime_error(src + (ln > 0 ? ":" + std::to_string(ln) : std::string()) + ": " + what),
      source(src),
      line(ln),
      key(k) {}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"normalization",  "dual_formula",     "moments",
                                                "current_causality", "mantle_flux",   "causal_evolution",
                                                "castrigiano_m",  "nw_violation",     "almost_localized",
                                                "covariance",     "exploratory_a"};
    return names;
}

bool is_suite(const std::string& name) {
    const auto& v = suite_names();
    return std::find(v.begin(), v.end(), name) != v.end();
}

namespace {

constexpr double kUnbounded = 1e300;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

// one "key = value" entry with its position
struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Reader {
    std::string source;
    const Entry* e = nullptr;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(source, e->line, e->key, "key '" + e->key + "': " + what);
    }
    double num() const {
        try {
            std::size_t pos = 0;
            double v = std::stod(e->value, &pos);
            if (trim(e->value.substr(pos)).empty() && std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        fail("expects a number, got '" + e->value + "'");
    }
    double positive() const {
        double v = num();
        if (!(v > 0.0)) fail("must be positive");
        return v;
    }
    long long integer() const {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(e->value, &pos);
            if (trim(e->value.substr(pos)).empty()) return v;
        } catch (const std::exception&) {
        }
        fail("expects an integer, got '" + e->value + "'");
    }
    int count() const {
        long long v = integer();
        if (v < 0 || v > 1000000) fail("must be between 0 and 1000000");
        return static_cast<int>(v);
    }
    bool boolean() const {
        std::string v = e->value;
        std::transform(v.begin(), v.end(), v.begin(), ::tolower);
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        fail("expects true or false, got '" + e->value + "'");
    }
    Vec3 vec(const std::string& text) const {
        auto parts = split(text, ',');
        if (parts.empty() || parts.size() > 3) fail("expects 1 to 3 comma-separated numbers");
        Vec3 v{};
        for (std::size_t i = 0; i < parts.size(); ++i) {
            try {
                std::size_t pos = 0;
                v[i] = std::stod(parts[i], &pos);
                if (!trim(parts[i].substr(pos)).empty() || !std::isfinite(v[i])) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail("bad number '" + parts[i] + "'");
            }
        }
        return v;
    }
    Vec3 vec() const { return vec(e->value); }
    std::vector<Vec3> vecs() const {
        std::vector<Vec3> out;
        for (const auto& p : split(e->value, ';'))
            if (!p.empty()) out.push_back(vec(p));
        return out;
    }
    std::vector<double> nums() const {
        std::vector<double> out;
        for (const auto& p : split(e->value, ',')) {
            Entry tmp{e->key, p, e->line};
            out.push_back(Reader{source, &tmp}.num());
        }
        return out;
    }
    std::string word(std::initializer_list<const char*> allowed) const {
        for (const char* a : allowed)
            if (e->value == a) return e->value;
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
        fail("expects one of " + list + ", got '" + e->value + "'");
    }
    void grid_n(int& n) const {
        long long v = integer();
        if (v < 8 || v > (1 << 16) || (v & (v - 1)) != 0) fail("must be a power of two between 8 and 65536");
        n = static_cast<int>(v);
    }
    void grid_dim(int& d) const {
        long long v = integer();
        if (v < 1 || v > 3) fail("must be 1, 2 or 3");
        d = static_cast<int>(v);
    }
    void velocity(Vec3& v) const {
        v = vec();
        if (geom::norm(v) >= 1.0) fail("velocity must have magnitude below 1");
    }
};

using Handler = std::function<void(const Reader&)>;
using Table = std::map<std::string, Handler>;

void apply_table(const Table& t, const std::string& section, const std::vector<Entry>& entries,
                 const std::string& source) {
    for (const auto& e : entries) {
        auto it = t.find(e.key);
        if (it == t.end())
            throw ConfigError(source, e.line, e.key, "unknown key '" + e.key + "' in [" + section + "]");
        it->second(Reader{source, &e});
    }
}

Table run_table(RunConfig& c, std::set<std::string>& explicit_keys) {
    Table t;
    t["seed"] = [&](const Reader& r) {
        long long v = r.integer();
        if (v < 0) r.fail("must be non-negative");
        c.seed = static_cast<std::uint64_t>(v);
    };
    t["mass"] = [&](const Reader& r) { c.grid.mass = r.positive(); explicit_keys.insert("mass"); };
    t["dim"] = [&](const Reader& r) { r.grid_dim(c.grid.dim); explicit_keys.insert("dim"); };
    t["n"] = [&](const Reader& r) { r.grid_n(c.grid.n); explicit_keys.insert("n"); };
    t["p_max"] = [&](const Reader& r) { c.grid.p_max = r.positive(); explicit_keys.insert("p_max"); };
    t["tau_c"] = [&](const Reader& r) { c.tau_c = r.positive(); };
    t["fail_multiplier"] = [&](const Reader& r) { c.fail_multiplier = r.positive(); };
    t["output_dir"] = [&](const Reader& r) {
        if (r.e->value.empty()) r.fail("must not be empty");
        c.output_dir = r.e->value;
    };
    t["suites"] = [&](const Reader& r) {
        c.suites.clear();
        for (const auto& s : split(r.e->value, ',')) {
            if (s == "all") {
                c.suites.clear();
                return;
            }
            if (!is_suite(s)) r.fail("unknown suite '" + s + "'");
            c.suites.push_back(s);
        }
    };
    t["threads"] = [&](const Reader& r) { c.threads = r.count(); };
    return t;
}

Table suite_table(SuiteConfig& s, std::set<std::string>& grid_keys) {
    Table t;
    const std::string& n = s.name;
    t["enabled"] = [&](const Reader& r) { s.enabled = r.boolean(); };
    if (n != "nw_violation" && n != "almost_localized") t["cases"] = [&](const Reader& r) { s.cases = r.count(); };
    t["dim"] = [&](const Reader& r) { r.grid_dim(s.grid.dim); grid_keys.insert("dim"); };
    t["n"] = [&](const Reader& r) { r.grid_n(s.grid.n); grid_keys.insert("n"); };
    t["p_max"] = [&](const Reader& r) { s.grid.p_max = r.positive(); grid_keys.insert("p_max"); };
    t["mass"] = [&](const Reader& r) { s.grid.mass = r.positive(); grid_keys.insert("mass"); };
    if (n == "nw_violation") {
        t["n_fine"] = [&](const Reader& r) { r.grid_n(s.grid_fine.n); };
        t["p_max_fine"] = [&](const Reader& r) { s.grid_fine.p_max = r.positive(); };
        t["radii"] = [&](const Reader& r) { s.radii = r.nums(); };
        t["times"] = [&](const Reader& r) { s.times = r.nums(); };
        return t;
    }
    if (n == "almost_localized") {
        t["j_list"] = [&](const Reader& r) {
            s.j_list.clear();
            for (double v : r.nums()) {
                if (v < 0 || v != std::floor(v)) r.fail("entries must be non-negative integers");
                s.j_list.push_back(static_cast<int>(v));
            }
            if (s.j_list.size() < 2) r.fail("needs at least two entries");
        };
        t["step"] = [&](const Reader& r) { s.step = r.vec(); };
        t["profile_radius"] = [&](const Reader& r) { s.profile_radius = r.positive(); };
        return t;
    }
    t["sigma_min"] = [&](const Reader& r) { s.sigma_min = r.positive(); };
    t["sigma_max"] = [&](const Reader& r) { s.sigma_max = r.positive(); };
    t["p0_max"] = [&](const Reader& r) { s.p0_max = std::abs(r.num()); };
    t["x0_max"] = [&](const Reader& r) { s.x0_max = std::abs(r.num()); };
    t["radius_min"] = [&](const Reader& r) { s.radius_min = r.positive(); };
    t["radius_max"] = [&](const Reader& r) { s.radius_max = r.positive(); };
    t["t_max"] = [&](const Reader& r) { s.t_max = r.positive(); };
    t["v_max"] = [&](const Reader& r) {
        double v = r.num();
        if (!(v >= 0.0 && v < 1.0)) r.fail("must lie in [0, 1)");
        s.v_max = v;
    };
    if (n == "causal_evolution") {
        t["cases_1d"] = [&](const Reader& r) { s.cases_1d = r.count(); };
        t["n_1d"] = [&](const Reader& r) { r.grid_n(s.grid_1d.n); };
        t["p_max_1d"] = [&](const Reader& r) { s.grid_1d.p_max = r.positive(); };
    } else if (n == "moments") {
        t["dt"] = [&](const Reader& r) { s.dt = r.positive(); };
        t["mass_sweep"] = [&](const Reader& r) {
            s.mass_sweep = r.nums();
            for (double m : s.mass_sweep)
                if (!(m > 0.0)) r.fail("masses must be positive");
        };
    } else if (n == "mantle_flux") {
        t["n_u"] = [&](const Reader& r) { s.mantle_hi.n_u = std::max(2, r.count()); };
        t["n_theta"] = [&](const Reader& r) { s.mantle_hi.n_theta = std::max(2, r.count()); };
        t["n_phi"] = [&](const Reader& r) { s.mantle_hi.n_phi = std::max(4, r.count()); };
    } else if (n == "castrigiano_m") {
        t["n0_velocity"] = [&](const Reader& r) { r.velocity(s.n0_velocity); };
        t["v_sweep"] = [&](const Reader& r) {
            s.v_sweep = r.nums();
            for (double v : s.v_sweep)
                if (!(std::abs(v) < 1.0)) r.fail("speeds must lie below 1");
        };
    } else if (n == "covariance") {
        t["exact_cases"] = [&](const Reader& r) { s.exact_cases = r.count(); };
    }
    return t;
}

Table state_table(StateSpec& s) {
    Table t;
    t["kind"] = [&](const Reader& r) { s.kind = r.word({"gaussian", "bump", "almost_localized", "nw_projected"}); };
    t["p0"] = [&](const Reader& r) { s.p0 = r.vec(); };
    t["x0"] = [&](const Reader& r) { s.x0 = r.vec(); };
    t["sigma"] = [&](const Reader& r) { s.sigma = r.positive(); };
    t["profile"] = [&](const Reader& r) { s.profile = r.word({"bump", "gaussian"}); };
    t["radius"] = [&](const Reader& r) { s.radius = r.positive(); };
    t["center"] = [&](const Reader& r) { s.center = r.vec(); };
    t["k"] = [&](const Reader& r) { s.k = r.vec(); };
    t["step"] = [&](const Reader& r) { s.step = r.vec(); };
    t["j"] = [&](const Reader& r) { s.j = r.count(); };
    return t;
}

Table region_table(RegionSpec& s) {
    Table t;
    t["kind"] = [&](const Reader& r) { s.kind = r.word({"whole", "ball", "box", "halfspace", "union"}); };
    t["center"] = [&](const Reader& r) { s.center = r.vec(); };
    t["radius"] = [&](const Reader& r) { s.radius = r.positive(); };
    t["lo"] = [&](const Reader& r) { s.lo = r.vec(); };
    t["hi"] = [&](const Reader& r) { s.hi = r.vec(); };
    t["normal"] = [&](const Reader& r) { s.normal = r.vec(); };
    t["offset"] = [&](const Reader& r) { s.offset = r.num(); };
    t["centers"] = [&](const Reader& r) { s.centers = r.vecs(); };
    t["radii"] = [&](const Reader& r) {
        s.radii = r.nums();
        for (double v : s.radii)
            if (!(v > 0.0)) r.fail("radii must be positive");
    };
    return t;
}

SuiteConfig suite_defaults(const std::string& name) {
    SuiteConfig s;
    s.name = name;
    static const std::map<std::string, int> cases{{"normalization", 20},     {"dual_formula", 50},
                                                  {"moments", 100},          {"current_causality", 50},
                                                  {"mantle_flux", 30},       {"causal_evolution", 50},
                                                  {"castrigiano_m", 30},     {"covariance", 20},
                                                  {"exploratory_a", 10}};
    auto it = cases.find(name);
    s.cases = it == cases.end() ? 0 : it->second;
    if (name == "nw_violation") s.grid = {1, 4096, 64.0, 1.0};
    if (name == "almost_localized") s.grid = {3, 64, 16.0, 1.0};
    if (name == "mantle_flux") s.radius_max = 1.2;
    return s;
}

// suites that run on the desk grid of [run] unless they override it
bool uses_run_grid(const std::string& name) { return name != "nw_violation" && name != "almost_localized"; }

}  // namespace

RunConfig default_config() {
    RunConfig c;
    for (const auto& n : suite_names()) c.suite[n] = suite_defaults(n);
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    // pass 1: sections and entries
    std::vector<std::pair<std::string, std::vector<Entry>>> sections;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::string current;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        auto hash = s.find('#');  // ';' separates vectors inside values
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(source, line, "", "malformed section header '" + s + "'");
            current = trim(s.substr(1, s.size() - 2));
            bool known = current == "run" || current == "state" || current == "region" || current == "slice" ||
                         current == "generator";
            if (current.rfind("suite.", 0) == 0) {
                std::string name = current.substr(6);
                if (!is_suite(name)) throw ConfigError(source, line, name, "unknown suite '" + name + "'");
                known = true;
            }
            if (!known) throw ConfigError(source, line, current, "unknown section [" + current + "]");
            if (seen.count(current))
                throw ConfigError(source, line, current,
                                  "section [" + current + "] repeated (first at line " +
                                      std::to_string(seen[current]) + ")");
            seen[current] = line;
            sections.push_back({current, {}});
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, s, "expected 'key = value', got '" + s + "'");
        if (sections.empty()) throw ConfigError(source, line, trim(s.substr(0, eq)), "entry outside of any section");
        Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty()) throw ConfigError(source, line, "", "empty key");
        for (const auto& prev : sections.back().second)
            if (prev.key == e.key)
                throw ConfigError(source, line, e.key, "key '" + e.key + "' repeated in [" + current + "]");
        sections.back().second.push_back(e);
    }

    // pass 2: typed values; [run] first so suites inherit the desk grid
    RunConfig c = default_config();
    c.source = source;
    std::set<std::string> run_grid_keys;
    for (const auto& [name, entries] : sections)
        if (name == "run") {
            Table t = run_table(c, run_grid_keys);
            apply_table(t, name, entries, source);
        }
    for (auto& [name, s] : c.suite) {
        if (uses_run_grid(name)) {
            s.grid = c.grid;
        } else if (run_grid_keys.count("mass")) {
            s.grid.mass = c.grid.mass;
        }
        if (run_grid_keys.count("mass")) {
            s.grid_1d.mass = c.grid.mass;
            s.grid_fine.mass = c.grid.mass;
        }
    }
    for (const auto& [name, entries] : sections) {
        if (name == "run") continue;
        if (name.rfind("suite.", 0) == 0) {
            SuiteConfig& s = c.suite[name.substr(6)];
            std::set<std::string> keys;
            Table t = suite_table(s, keys);
            apply_table(t, name, entries, source);
            if (keys.count("mass")) {
                s.grid_1d.mass = s.grid.mass;
                s.grid_fine.mass = s.grid.mass;
            }
            const Entry* last = entries.empty() ? nullptr : &entries.back();
            auto bad = [&](const std::string& what) {
                throw ConfigError(source, last ? last->line : 0, name, "[" + name + "]: " + what);
            };
            if (s.sigma_min > s.sigma_max) bad("sigma_min exceeds sigma_max");
            if (s.radius_min > s.radius_max) bad("radius_min exceeds radius_max");
            if (s.radii.size() != s.times.size()) bad("radii and times need the same length");
        } else if (name == "state") {
            apply_table(state_table(c.state), name, entries, source);
        } else if (name == "region") {
            apply_table(region_table(c.region), name, entries, source);
            if (c.region.kind == "union" && (c.region.centers.empty() || c.region.centers.size() != c.region.radii.size()))
                throw ConfigError(source, entries.empty() ? 0 : entries.front().line, "centers",
                                  "union regions need matching 'centers' and 'radii'");
        } else if (name == "slice") {
            Table t;
            t["velocity"] = [&](const Reader& r) { r.velocity(c.slice.velocity); };
            t["time"] = [&](const Reader& r) { c.slice.time = r.num(); };
            apply_table(t, name, entries, source);
        } else if (name == "generator") {
            Table t;
            t["velocity"] = [&](const Reader& r) { r.velocity(c.generator); };
            apply_table(t, name, entries, source);
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw MissingFile(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

namespace {
std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}
std::string fmt(const Vec3& v) { return fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]); }
template <class T>
std::string fmt_list(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(static_cast<double>(v[i]));
    return s;
}
}  // namespace

std::string dump_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[run]\nseed = " << c.seed << "\nmass = " << fmt(c.grid.mass) << "\ndim = " << c.grid.dim
      << "\nn = " << c.grid.n << "\np_max = " << fmt(c.grid.p_max) << "\ntau_c = " << fmt(c.tau_c)
      << "\nfail_multiplier = " << fmt(c.fail_multiplier) << "\noutput_dir = " << c.output_dir << "\nsuites = ";
    if (c.suites.empty()) o << "all";
    for (std::size_t i = 0; i < c.suites.size(); ++i) o << (i ? ", " : "") << c.suites[i];
    o << "\nthreads = " << c.threads << "\n";
    for (const auto& name : suite_names()) {
        const SuiteConfig& s = c.suite.at(name);
        o << "\n[suite." << name << "]\nenabled = " << (s.enabled ? "true" : "false") << "\n";
        if (name != "nw_violation" && name != "almost_localized") o << "cases = " << s.cases << "\n";
        o << "dim = " << s.grid.dim << "\nn = " << s.grid.n << "\np_max = " << fmt(s.grid.p_max)
          << "\nmass = " << fmt(s.grid.mass) << "\n";
        if (name == "nw_violation") {
            o << "n_fine = " << s.grid_fine.n << "\np_max_fine = " << fmt(s.grid_fine.p_max)
              << "\nradii = " << fmt_list(s.radii) << "\ntimes = " << fmt_list(s.times) << "\n";
            continue;
        }
        if (name == "almost_localized") {
            o << "j_list = " << fmt_list(s.j_list) << "\nstep = " << fmt(s.step)
              << "\nprofile_radius = " << fmt(s.profile_radius) << "\n";
            continue;
        }
        o << "sigma_min = " << fmt(s.sigma_min) << "\nsigma_max = " << fmt(s.sigma_max) << "\np0_max = " << fmt(s.p0_max)
          << "\nx0_max = " << fmt(s.x0_max) << "\nradius_min = " << fmt(s.radius_min)
          << "\nradius_max = " << fmt(s.radius_max) << "\nt_max = " << fmt(s.t_max) << "\nv_max = " << fmt(s.v_max)
          << "\n";
        if (name == "causal_evolution")
            o << "cases_1d = " << s.cases_1d << "\nn_1d = " << s.grid_1d.n << "\np_max_1d = " << fmt(s.grid_1d.p_max)
              << "\n";
        if (name == "moments") o << "dt = " << fmt(s.dt) << "\nmass_sweep = " << fmt_list(s.mass_sweep) << "\n";
        if (name == "mantle_flux")
            o << "n_u = " << s.mantle_hi.n_u << "\nn_theta = " << s.mantle_hi.n_theta << "\nn_phi = " << s.mantle_hi.n_phi
              << "\n";
        if (name == "castrigiano_m")
            o << "n0_velocity = " << fmt(s.n0_velocity) << "\nv_sweep = " << fmt_list(s.v_sweep) << "\n";
        if (name == "covariance") o << "exact_cases = " << s.exact_cases << "\n";
    }
    const auto& st = c.state;
    o << "\n[state]\nkind = " << st.kind << "\np0 = " << fmt(st.p0) << "\nx0 = " << fmt(st.x0)
      << "\nsigma = " << fmt(st.sigma) << "\nprofile = " << st.profile << "\nradius = " << fmt(st.radius)
      << "\ncenter = " << fmt(st.center) << "\nk = " << fmt(st.k) << "\nstep = " << fmt(st.step) << "\nj = " << st.j
      << "\n";
    const auto& r = c.region;
    o << "\n[region]\nkind = " << r.kind << "\ncenter = " << fmt(r.center) << "\nradius = " << fmt(r.radius)
      << "\nlo = " << fmt(r.lo) << "\nhi = " << fmt(r.hi) << "\nnormal = " << fmt(r.normal)
      << "\noffset = " << fmt(r.offset) << "\n";
    if (!r.centers.empty()) {
        o << "centers = ";
        for (std::size_t i = 0; i < r.centers.size(); ++i) o << (i ? "; " : "") << fmt(r.centers[i]);
        o << "\nradii = " << fmt_list(r.radii) << "\n";
    }
    o << "\n[slice]\nvelocity = " << fmt(c.slice.velocity) << "\ntime = " << fmt(c.slice.time) << "\n";
    o << "\n[generator]\nvelocity = " << fmt(c.generator) << "\n";
    return o.str();
}

geom::Region RegionSpec::build(int dim) const {
    auto clip = [dim](Vec3 v) {
        for (int k = dim; k < 3; ++k) v[k] = 0.0;
        return v;
    };
    if (kind == "whole") return geom::Region(geom::Whole{});
    if (kind == "ball") return geom::make_ball(clip(center), radius);
    if (kind == "box") {
        geom::Box b{lo, hi};
        for (int k = dim; k < 3; ++k) {
            b.lo[k] = -kUnbounded;
            b.hi[k] = kUnbounded;
        }
        for (int k = 0; k < dim; ++k)
            if (!(b.lo[k] < b.hi[k])) throw std::invalid_argument("box needs lo < hi on every axis");
        return geom::Region(b);
    }
    if (kind == "halfspace") {
        Vec3 nrm = clip(normal);
        double l = geom::norm(nrm);
        if (!(l > 0.0)) throw std::invalid_argument("halfspace normal must be nonzero within the grid dimension");
        return geom::Region(geom::HalfSpace{geom::scale(nrm, 1.0 / l), offset / l});
    }
    std::vector<geom::Region> parts;
    for (std::size_t i = 0; i < centers.size(); ++i) parts.push_back(geom::make_ball(clip(centers[i]), radii.at(i)));
    return geom::make_union(parts);
}

mom::MassShellState build_state(const StateSpec& s, const GridSpec& gs, const RegionSpec& region) {
    mom::MomentumGrid g = gs.make();
    mom::SpatialProfile chi;
    chi.kind = s.profile == "gaussian" ? mom::SpatialProfile::Kind::Gaussian : mom::SpatialProfile::Kind::Bump;
    chi.radius = s.radius;
    chi.center = s.center;
    if (s.kind == "gaussian") return mom::make_gaussian(s.p0, s.sigma, g, s.x0);
    if (s.kind == "bump") return mom::make_profile_state(chi, s.k, g);
    if (s.kind == "almost_localized") return mom::almost_localized_sequence(chi, s.step, s.j, g);
    auto base = mom::make_gaussian(s.p0, s.sigma, g, s.x0);
    return mom::nw_project(base, region.build(gs.dim), geom::SliceRef{});
}

}  // namespace kgloc::cfg
