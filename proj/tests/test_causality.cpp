#include <doctest.h>

#include <cmath>

#include "kgloc/causality.hpp"
#include "kgloc/log.hpp"

using namespace kgloc;
using namespace kgloc::caus;
using geom::Frame;

namespace {

struct Quiet {
    int v = verbosity();
    Quiet() { set_verbosity(0); }
    ~Quiet() { set_verbosity(v); }
};

const mom::MomentumGrid& grid3() {
    static const mom::MomentumGrid g(3, 32, 8.0, 1.0);
    return g;
}

MantleSpec spec_for(const mom::MassShellState& psi, double r, double t1, double t2) {
    MantleSpec s;
    s.source = geom::make_ball(wave::nw_centroid(psi, t1), r);
    s.t1 = t1;
    s.t2 = t2;
    return s;
}

}  // namespace

TEST_CASE("gauss-legendre rule") {
    for (int n : {1, 4, 9}) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        // exact through degree 2n - 1
        for (int deg = 0; deg < 2 * n; ++deg) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], deg);
            double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("mantle flux with no elapsed time") {
    Quiet q;
    auto psi = mom::make_gaussian({0.2, 0, 0}, 0.5, grid3());
    auto f = mantle_flux(psi, spec_for(psi, 1.0, 0.5, 0.5));
    CHECK(f.flux == 0.0);
}

TEST_CASE("mantle flux is non-negative and balances") {
    Quiet q;
    struct Case {
        geom::Vec3 p0, x0;
        double sigma, r, t1, t2;
    };
    for (const Case& c : {Case{{0.3, 0, 0}, {}, 0.5, 1.0, 0.0, 1.0}, Case{{-0.5, 0.4, 0}, {0.5, 0, 0}, 0.6, 1.5, 0.2, 0.9},
                          Case{{0, 0, 0.8}, {0, -0.3, 0}, 0.45, 0.8, 0.0, -0.7}}) {
        auto psi = mom::make_gaussian(c.p0, c.sigma, grid3(), c.x0);
        auto f = mantle_flux(psi, spec_for(psi, c.r, c.t1, c.t2));
        INFO("flux " << f.flux << " err " << f.err << " residual " << f.balance_residual);
        CHECK(f.flux >= -f.err);
        CHECK(f.balance_residual <= f.balance_err);
        CHECK(f.p2 >= f.p1 - f.p1_err - f.p2_err);
        CHECK(f.points > 0);
    }
}

TEST_CASE("mantle refinement") {
    Quiet q;
    auto psi = mom::make_gaussian({0.4, -0.2, 0}, 0.5, grid3());
    auto base = spec_for(psi, 1.2, 0.0, 1.0);
    auto fine = base;
    fine.hi = {2 * base.hi.n_u, 2 * base.hi.n_theta, 2 * base.hi.n_phi};
    fine.lo = base.hi;
    auto a = mantle_flux(psi, base), b = mantle_flux(psi, fine);
    CHECK(std::abs(a.flux - b.flux) <= a.err);
}

TEST_CASE("pointwise causality on the mantle") {
    Quiet q;
    auto psi = mom::make_gaussian({0.3, 0.1, 0}, 0.5, grid3());
    auto c = pointwise_mantle_causality(psi, spec_for(psi, 1.0, 0.0, 1.0));
    CHECK(c.fraction == 1.0);
    CHECK(c.max_jv <= 1e-10);
    CHECK(c.points > 0);

    mom::MassShellState zero(grid3());
    MantleSpec z;
    z.source = geom::make_ball({}, 1.0);
    CHECK(pointwise_mantle_causality(zero, z).fraction == 1.0);

    auto both = mantle_check(psi, spec_for(psi, 1.0, 0.0, 1.0));
    CHECK(both.causal.fraction == c.fraction);
    CHECK(both.flux.points == both.causal.points);
}

TEST_CASE("strict margin for a compact profile") {
    Quiet q;
    mom::MomentumGrid grid(3, 32, 16.0, 1.0);
    mom::SpatialProfile chi;
    chi.radius = 1.0;
    auto psi = mom::almost_localized_sequence(chi, {0.5, 0, 0}, 0, grid);
    MantleSpec s;
    s.source = geom::make_ball({}, 1.5);
    s.t1 = 0.0;
    s.t2 = 0.8;
    auto c = pointwise_mantle_causality(psi, s);
    CHECK(c.scale > 0.0);
    CHECK(c.delta >= 0.0);
    CHECK(c.fraction == 1.0);
}

TEST_CASE("mantle samples") {
    Quiet q;
    auto psi = mom::make_gaussian({}, 0.5, grid3());
    auto s = spec_for(psi, 1.0, 0.0, 1.0);
    auto hi = mantle_samples(psi, s, true), lo = mantle_samples(psi, s, false);
    CHECK(hi.size() > lo.size());
    // every sample lies on the expanding sphere r = R + (t - t1)
    for (const auto& m : hi) {
        double r = geom::norm(geom::sub(m.x, geom::make_ball(wave::nw_centroid(psi, 0.0), 1.0).ball()->center));
        CHECK(r == doctest::Approx(1.0 + m.t).epsilon(1e-12));
        CHECK(m.weight > 0.0);
    }
}
