#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "kgloc/log.hpp"
#include "kgloc/states.hpp"

using namespace kgloc;
using namespace kgloc::mom;
using geom::PoincareTransform;

namespace {

double max_diff(const MassShellState& a, const MassShellState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.psi.size(); ++i) m = std::max(m, std::abs(a.psi[i] - b.psi[i]));
    return m;
}

// unnormalized gaussian norm^2 by a direct midpoint sum on an n^3 grid
double gaussian_norm2(int n, double p_max, const Vec3& p0, double sigma) {
    MomentumGrid g(3, n, p_max, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 p = g.momentum(i);
        double r2 = 0.0;
        for (int k = 0; k < 3; ++k) r2 += (p[k] - p0[k]) * (p[k] - p0[k]);
        s += std::exp(-r2 / (2.0 * sigma * sigma)) / g.energy(i);
    }
    return s * g.cell();
}

MassShellState random_state(std::mt19937_64& g, const MomentumGrid& grid) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec3 p0{u(g), u(g), u(g)}, x0{u(g), u(g), u(g)};
    return make_gaussian(p0, 0.5 + 0.2 * u(g), grid, x0);
}

struct Quiet {
    int v = verbosity();
    Quiet() { set_verbosity(0); }
    ~Quiet() { set_verbosity(v); }
};

}  // namespace

TEST_CASE("energies") {
    CHECK(energy({0, 0, 0}, 1.0) == 1.0);
    CHECK(energy({3, 0, 0}, 1.0) == doctest::Approx(3.16227766).epsilon(1e-9));
    CHECK(energy({0, 4, 3}, 0.5) == doctest::Approx(5.02494).epsilon(1e-6));
    MomentumGrid g(2, 16, 4.0, 2.0);
    CHECK(g.dp() == 0.5);
    CHECK(g.coord(8) == 0.0);
    CHECK(g.energy(0) == doctest::Approx(energy({-4, -4, 0}, 2.0)));
}

TEST_CASE("inner product") {
    Quiet q;
    MomentumGrid grid(3, 32, 8.0, 1.0);
    auto psi = make_gaussian({0.3, 0, -0.2}, 0.6, grid, {0.5, 0, 0});
    CHECK(std::abs(inner_product(psi, psi) - 1.0) < 1e-12);
    // refinement oracle: the same norm at twice the resolution
    double n1 = gaussian_norm2(64, 8.0, {0.3, 0, -0.2}, 0.6), n2 = gaussian_norm2(128, 8.0, {0.3, 0, -0.2}, 0.6);
    CHECK(std::abs(n1 / n2 - 1.0) < 1e-9);

    MassShellState a(grid), b(grid);
    a.psi[10] = 1.0;
    b.psi[11] = 1.0;
    CHECK(std::abs(inner_product(a, b)) == 0.0);
    auto ipsi = psi.scaled({0.0, 1.0});
    auto z = inner_product(psi, ipsi);
    CHECK(std::abs(z - std::complex<double>(0.0, psi.norm2())) < 1e-14);
    MomentumGrid line(1, 256, 8.0, 1.0);
    auto far = make_gaussian({}, 1.0, line, {10.0, 0, 0}), near = make_gaussian({}, 1.0, line, {-10.0, 0, 0});
    CHECK(std::abs(inner_product(far, near)) < 1e-8);
}

TEST_CASE("inner product symmetry and linearity") {
    Quiet q;
    std::mt19937_64 g(1);
    MomentumGrid grid(2, 32, 8.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        auto a = random_state(g, grid), b = random_state(g, grid), c = random_state(g, grid);
        std::complex<double> al(0.3, -1.1), be(-0.7, 0.2);
        MassShellState lin(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) lin.psi[i] = al * b.psi[i] + be * c.psi[i];
        auto lhs = inner_product(a, lin), rhs = al * inner_product(a, b) + be * inner_product(a, c);
        CHECK(std::abs(lhs - rhs) < 1e-14);
        CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-15);
    }
}

TEST_CASE("multipliers") {
    Quiet q;
    std::mt19937_64 g(2);
    MomentumGrid grid(3, 32, 8.0, 1.0);
    auto psi = random_state(g, grid);
    auto back = apply_multiplier(apply_multiplier(psi, Multiplier::inv_energy()), Multiplier::energy());
    CHECK(max_diff(back, psi) < 1e-14);
    CHECK(max_diff(apply_multiplier(psi, Multiplier::evolve_phase(0.0)), psi) == 0.0);

    auto ab = apply_multiplier(apply_multiplier(psi, Multiplier::mom_over_energy(1)), Multiplier::evolve_phase(0.7));
    auto ba = apply_multiplier(apply_multiplier(psi, Multiplier::evolve_phase(0.7)), Multiplier::mom_over_energy(1));
    CHECK(max_diff(ab, ba) < 1e-15);

    // |p_k/E| < 1 bounds the norm; the oracle is the direct sum
    for (int c = 0; c < 100; ++c) {
        auto s = random_state(g, grid);
        for (int k = 0; k < 3; ++k) {
            double direct = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double r = grid.momentum(i)[k] / grid.energy(i);
                direct += std::norm(s.psi[i]) * r * r / grid.energy(i);
            }
            direct *= grid.cell();
            double n = apply_multiplier(s, Multiplier::mom_over_energy(k)).norm2();
            CHECK(n == doctest::Approx(direct).epsilon(1e-12));
            CHECK(n <= s.norm2());
        }
    }
}

TEST_CASE("gaussian constructor") {
    Quiet q;
    MomentumGrid grid(3, 64, 8.0, 1.0);
    Vec3 p0{1.0, -0.5, 0.25};
    const double sigma = 0.3;
    auto psi = make_gaussian(p0, sigma, grid);
    CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double w = std::norm(psi.psi[i]) / grid.energy(i);
            num += w * grid.momentum(i)[k];
            den += w;
        }
        double e = expectation(psi, Multiplier::momentum(k));
        CHECK(e == doctest::Approx(num / den).epsilon(1e-12));
        CHECK(std::abs(e - p0[k]) < 3.0 * sigma * grid.dp());
    }
    CHECK_THROWS(make_gaussian({7.5, 0, 0}, 0.5, grid));
}

TEST_CASE("exact poincare actions") {
    Quiet q;
    std::mt19937_64 g(3);
    MomentumGrid grid(3, 32, 8.0, 1.0);
    auto psi = random_state(g, grid);
    auto same = apply_poincare_state(psi, PoincareTransform::identity());
    CHECK(max_diff(same, psi) < 1e-15);
    CHECK(same.resample_err == 0.0);

    const double tau = 0.8;
    auto evolved = apply_poincare_state(psi, PoincareTransform::translation({tau, 0, 0, 0}));
    auto phased = apply_multiplier(psi, Multiplier::evolve_phase(tau));
    CHECK(max_diff(evolved, phased) < 1e-14);

    auto h1 = geom::compose(PoincareTransform::translation({0.3, 1, -1, 0.5}), PoincareTransform::quarter_turn(0, 2));
    auto h2 = geom::compose(PoincareTransform::quarter_turn(1, 0), PoincareTransform::translation({-0.2, 0, 2, 0}));
    auto u1 = apply_poincare_state(psi, h1);
    CHECK(std::abs(u1.norm2() - psi.norm2()) < 1e-12);
    auto lhs = apply_poincare_state(apply_poincare_state(psi, h2), h1);
    auto rhs = apply_poincare_state(psi, geom::compose(h1, h2));
    CHECK(max_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("boosted states") {
    Quiet q;
    MomentumGrid grid(3, 64, 8.0, 1.0);
    auto psi = make_gaussian({0.2, 0, 0}, 0.7, grid);
    auto u = apply_poincare_state(psi, PoincareTransform::boost({0.3, 0, 0}));
    CHECK(std::abs(u.norm2() - 1.0) < 1e-3);
    CHECK(u.resample_err < 1e-3);
    CHECK(u.native.same_as(psi.native));
}

TEST_CASE("almost-localized sequence") {
    Quiet q;
    MomentumGrid grid(3, 32, 16.0, 1.0);
    SpatialProfile chi;
    chi.radius = 2.0;
    auto s0 = almost_localized_sequence(chi, {0.5, 0, 0}, 0, grid);
    CHECK(s0.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    // psi_0 / sqrt(E) is the transform of a real even profile: peaked at p = 0 and even
    std::size_t peak = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double a = std::abs(s0.psi[i]) / std::sqrt(grid.energy(i));
        if (a > best) best = a, peak = i;
    }
    CHECK(geom::norm(grid.momentum(peak)) == 0.0);
    auto s4 = almost_localized_sequence(chi, {0.5, 0, 0}, 4, grid);
    CHECK(s4.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(almost_localized_sequence(chi, {0, 0, 0}, 1, grid));
}

TEST_CASE("nw projection") {
    Quiet q;
    MomentumGrid grid(2, 64, 8.0, 1.0);
    auto psi = make_gaussian({0.3, 0, 0}, 0.5, grid);
    geom::SliceRef s{geom::Frame{}, 0.3};
    auto whole = nw_project(psi, geom::Region{}, s);
    CHECK(max_diff(whole, psi) < 1e-12);
    auto ball = geom::make_ball({0.2, 0, 0}, 1.0);
    auto p1 = nw_project(psi, ball, s);
    auto p2 = nw_project(p1, ball, s);
    CHECK(max_diff(p1, p2) < 1e-10);
    CHECK_THROWS(nw_project(psi, ball, geom::SliceRef{geom::Frame::from_velocity({0.2, 0, 0}), 0.0}));
}

TEST_CASE("state files") {
    Quiet q;
    MomentumGrid grid(2, 16, 4.0, 1.5);
    auto psi = make_gaussian({0.3, 0, 0}, 0.4, grid);
    psi.native = geom::Frame::from_velocity({0.1, 0.2, 0});
    std::string path = "kgloc_state_roundtrip.bin";
    save_state(psi, path);
    auto back = load_state(path);
    std::remove(path.c_str());
    CHECK(back.grid.same_as(psi.grid));
    CHECK(back.native.same_as(psi.native));
    CHECK(max_diff(back, psi) == 0.0);
    CHECK_THROWS(load_state("no_such_state.bin"));
}
