#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgloc/causality.hpp"

namespace kgloc::cfg {

using geom::Vec3;

// malformed or unknown entries; line is 0 when the problem is not tied to one line
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& source, int line, const std::string& key, const std::string& what);
    std::string source;
    int line = 0;
    std::string key;
};

// the config file (or another input) does not exist
struct MissingFile : std::runtime_error {
    explicit MissingFile(const std::string& path) : std::runtime_error("cannot open " + path), path(path) {}
    std::string path;
};

struct GridSpec {
    int dim = 3;
    int n = 64;
    double p_max = 8.0;
    double mass = 1.0;
    mom::MomentumGrid make() const { return mom::MomentumGrid(dim, n, p_max, mass); }
};

struct StateSpec {
    std::string kind = "gaussian";  // gaussian | bump | almost_localized | nw_projected
    Vec3 p0{};
    Vec3 x0{};
    double sigma = 0.5;
    std::string profile = "bump";  // bump | gaussian (profile states)
    double radius = 1.0;
    Vec3 center{};
    Vec3 k{};
    Vec3 step{0.5, 0.0, 0.0};  // almost_localized a
    int j = 0;
};

struct RegionSpec {
    std::string kind = "ball";  // whole | ball | box | halfspace | union
    Vec3 center{};
    double radius = 1.0;
    Vec3 lo{-1.0, -1.0, -1.0};
    Vec3 hi{1.0, 1.0, 1.0};
    Vec3 normal{1.0, 0.0, 0.0};
    double offset = 0.0;
    std::vector<Vec3> centers;  // union of balls
    std::vector<double> radii;
    geom::Region build(int dim) const;
};

struct SliceSpec {
    Vec3 velocity{};
    double time = 0.0;
    geom::SliceRef build() const { return {geom::Frame::from_velocity(velocity), time}; }
};

struct SuiteConfig {
    std::string name;
    bool enabled = true;
    int cases = 0;
    GridSpec grid;
    double sigma_min = 0.35, sigma_max = 0.7;  // momentum width of random gaussians
    double p0_max = 1.5;                       // per-axis mean momentum bound
    double x0_max = 1.5;                       // per-axis centre bound
    double radius_min = 0.5, radius_max = 1.5;
    double t_max = 1.0;
    double v_max = 0.5;
    // causal_evolution
    int cases_1d = 500;
    GridSpec grid_1d{1, 4096, 32.0, 1.0};
    // nw_violation
    GridSpec grid_fine{1, 8192, 128.0, 1.0};
    std::vector<double> radii{1.0, 0.5, 2.0, 1.0};
    std::vector<double> times{0.5, 0.25, 0.5, 1.0};
    // almost_localized
    std::vector<int> j_list{0, 1, 2, 4, 8, 16};
    Vec3 step{0.5, 0.0, 0.0};
    double profile_radius = 2.0;
    // moments
    double dt = 1e-3;
    std::vector<double> mass_sweep{0.5, 1.0, 10.0, 100.0};
    // mantle_flux
    caus::MantleGrid mantle_hi{8, 12, 24};
    // castrigiano_m
    Vec3 n0_velocity{0.2, -0.1, 0.1};
    std::vector<double> v_sweep{0.1, 0.3, 0.5};
    // covariance
    int exact_cases = 20;
};

struct RunConfig {
    std::uint64_t seed = 20240607;
    GridSpec grid;
    double tau_c = 1e-10;
    double fail_multiplier = 3.0;
    std::string output_dir = "kgloc_report";
    std::vector<std::string> suites;  // selection; empty means all
    int threads = 0;                  // 0: KGLOC_THREADS
    std::map<std::string, SuiteConfig> suite;
    StateSpec state;
    RegionSpec region;
    SliceSpec slice;
    Vec3 generator{};  // velocity of the generator frame n0
    std::string source = "<defaults>";
};

// suite names in run order
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

RunConfig default_config();
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);
// canonical text form; parse_config(dump_config(c)) reproduces c
std::string dump_config(const RunConfig& c);

mom::MassShellState build_state(const StateSpec& s, const GridSpec& g, const RegionSpec& region);

}  // namespace kgloc::cfg
