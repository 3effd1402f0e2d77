#include <doctest.h>

#include <cmath>
#include <random>

#include "kgloc/log.hpp"
#include "kgloc/observables.hpp"

using namespace kgloc;
using namespace kgloc::obs;
using geom::Frame;
using geom::Region;
using geom::SliceRef;
using geom::Vec3;

namespace {

struct Quiet {
    int v = verbosity();
    Quiet() { set_verbosity(0); }
    ~Quiet() { set_verbosity(v); }
};

mom::MassShellState random_state(std::mt19937_64& g, const mom::MomentumGrid& grid) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec3 p0{u(g), u(g), u(g)}, x0{u(g), u(g), u(g)};
    for (int k = grid.dim(); k < 3; ++k) p0[k] = x0[k] = 0.0;
    return mom::make_gaussian(p0, 0.5 + 0.15 * u(g), grid, x0);
}

const mom::MomentumGrid& grid3() {
    static const mom::MomentumGrid g(3, 32, 8.0, 1.0);
    return g;
}

}  // namespace

TEST_CASE("nw probability") {
    Quiet q;
    std::mt19937_64 g(1);
    auto psi = random_state(g, grid3());
    SliceRef s{Frame{}, 0.4};
    CHECK(nw_probability(psi, s, Region{}).value == doctest::Approx(1.0).epsilon(1e-9));
    Region ball = geom::make_ball({0.3, -0.2, 0.1}, 1.1);
    auto in = nw_probability(psi, s, ball), out = nw_probability(psi, s, geom::complement(ball));
    CHECK(in.value + out.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(in.value > 0.0);
    CHECK(in.value < 1.0);
    // the projected state sits on the ball's lattice points
    ObsOptions lat{quad::Quadrature::Lattice, 2};
    auto proj = mom::nw_project(psi, ball, s);
    CHECK(nw_probability(proj, s, ball, lat).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("terno probability") {
    Quiet q;
    std::mt19937_64 g(2);
    SliceRef s{Frame{}, 0.2};
    auto psi = random_state(g, grid3());
    CHECK(terno_probability(psi, s, Region{}).value == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 0; k < 100; ++k) {
        auto st = random_state(g, mom::MomentumGrid(1, 256, 8.0, 1.0));
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        double a = u(g), b = a + std::abs(u(g)) + 0.1;
        auto p = terno_probability(st, s, Region(geom::Box::interval(a, b)));
        CHECK(p.value >= -p.err);
        CHECK(p.value <= 1.0 + p.err);
        CHECK(!p.clamped);
    }
    // a slow packet: the deformation multipliers collapse to one
    mom::MomentumGrid line(1, 4096, 8.0, 1.0);
    auto slow = mom::make_gaussian({}, 0.02, line, {3.0, 0, 0});
    Region iv = geom::Box::interval(-10.0, 10.0);
    CHECK(std::abs(terno_probability(slow, s, iv).value - nw_probability(slow, s, iv).value) < 1e-3);
}

TEST_CASE("terno energy form") {
    Quiet q;
    std::mt19937_64 g(3);
    SliceRef s{Frame{}, 0.3};
    auto psi = random_state(g, grid3());
    CHECK(terno_probability_energy_form(psi, s, Region{}).value == doctest::Approx(1.0).epsilon(1e-6));
    for (int k = 0; k < 3; ++k) {
        auto st = random_state(g, grid3());
        Region b = geom::make_ball(wave::nw_centroid(st, 0.3), 0.9);
        auto x = terno_probability(st, s, b), y = terno_probability_energy_form(st, s, b);
        CHECK(std::abs(x.value - y.value) <= 3.0 * (x.err + y.err));
    }
    mom::MassShellState zero(grid3());
    CHECK(terno_probability_energy_form(zero, s, geom::make_ball({}, 1.0)).value == 0.0);
}

TEST_CASE("two-frame observable") {
    Quiet q;
    std::mt19937_64 g(4);
    auto psi = random_state(g, grid3());
    SliceRef s{Frame{}, 0.5};
    Region b = geom::make_ball(wave::nw_centroid(psi, 0.5), 1.0);
    auto a = terno_probability(psi, s, b);
    auto m = m_povm_current(psi, Frame{}, s, b);
    CHECK(std::abs(a.value - m.value) < 1e-9);

    Frame n0 = Frame::from_velocity({0.2, 0, 0});
    SliceRef sb{Frame::from_velocity({0.0, 0.3, 0}), 0.4};
    auto whole = m_povm_probability(psi, n0, sb, Region{});
    CHECK(std::abs(whole.current_form.value - 1.0) <= whole.current_form.err + 1e-6);
    CHECK(std::abs(whole.operator_form.value - 1.0) <= whole.operator_form.err + 1e-6);
    auto both = m_povm_probability(psi, n0, SliceRef{Frame{}, 0.5}, b);
    CHECK(std::abs(both.difference) <= 3.0 * (both.current_form.err + both.operator_form.err));
    CHECK(both.agree);
}

TEST_CASE("first moments") {
    Quiet q;
    std::mt19937_64 g(5);
    auto psi = random_state(g, mom::MomentumGrid(1, 1024, 8.0, 1.0));
    SliceRef s{Frame{}, 0.6};
    {
        const int k = 1;
        auto x = first_moment(psi, s, k), n = nw_expectation(psi, s, k);
        INFO("errs " << x.err << " " << n.err);
        CHECK(x.err < 1e-6);
        CHECK(std::abs(x.value - n.value) <= x.err + n.err);
    }
    CHECK(first_moment(psi, s, 0).value == 0.6);

    auto even = mom::make_gaussian({}, 0.5, grid3());
    for (int k = 1; k <= 3; ++k) {
        auto x = first_moment(even, SliceRef{}, k);
        CHECK(std::abs(x.value) <= x.err + 1e-12);
        auto n = nw_expectation(even, SliceRef{}, k);
        CHECK(std::abs(n.value) <= n.err + 1e-12);
    }
}

TEST_CASE("position expectation in time and under translations") {
    Quiet q;
    std::mt19937_64 g(6);
    auto psi = random_state(g, mom::MomentumGrid(1, 1024, 8.0, 1.0));
    Vec3 v = velocity(psi);
    for (int k = 1; k <= 1; ++k) {
        auto x0 = nw_expectation(psi, SliceRef{}, k), x1 = nw_expectation(psi, SliceRef{Frame{}, 0.8}, k);
        CHECK(std::abs(x1.value - (x0.value + 0.8 * v[k - 1])) <= x0.err + x1.err);
    }
    geom::FourVector a{0.0, 0.7, -0.4, 0.2};
    auto moved = mom::apply_poincare_state(psi, geom::PoincareTransform::translation(a));
    for (int k = 1; k <= 1; ++k) {
        auto before = nw_expectation(psi, SliceRef{}, k), after = nw_expectation(moved, SliceRef{}, k);
        CHECK(std::abs(after.value - before.value - a[k]) <= before.err + after.err);
    }
    // central difference, exact for a linear trajectory
    const double dt = 1e-2;
    for (int k = 1; k <= 1; ++k) {
        double vp = nw_expectation(psi, SliceRef{Frame{}, dt}, k).value;
        double vm = nw_expectation(psi, SliceRef{Frame{}, -dt}, k).value;
        CHECK(std::abs((vp - vm) / (2.0 * dt) - v[k - 1]) < 1e-6);
    }
}

TEST_CASE("second moments") {
    Quiet q;
    std::mt19937_64 g(7);
    for (int c = 0; c < 3; ++c) {
        auto psi = random_state(g, grid3());
        SliceRef s{Frame{}, 0.3};
        for (int k = 1; k <= 3; ++k) {
            auto sm = second_moment(psi, s, k);
            CHECK(std::abs(sm.residual) <= 3.0 * sm.err);
            CHECK(sm.correction > 0.0);
            double first = first_moment(psi, s, k).value;
            CHECK(sm.terno_second >= first * first - sm.err);
        }
    }
    // tight packet at rest: (E^2 - p^2) / (2 E^4) -> 1/(2 m^2)
    mom::MomentumGrid line(1, 4096, 8.0, 1.0);
    auto rest = mom::make_gaussian({}, 0.01, line);
    CHECK(second_moment(rest, SliceRef{}, 1).correction == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("corrected heisenberg inequality") {
    Quiet q;
    std::mt19937_64 g(8);
    for (int c = 0; c < 3; ++c) {
        auto psi = random_state(g, grid3());
        for (int k = 1; k <= 3; ++k) {
            auto h = heisenberg_check(psi, SliceRef{}, k);
            CHECK(h.lhs >= h.rhs - 3.0 * h.err);
            CHECK(h.rhs >= 0.5);
        }
    }
    mom::MomentumGrid heavy(1, 512, 8.0, 100.0);
    auto psi = mom::make_gaussian({}, 0.5, heavy);
    auto h = heisenberg_check(psi, SliceRef{}, 1);
    CHECK(std::abs(h.rhs - 0.5) < 1e-3);
    CHECK(h.nw_lhs >= 0.5 - 3.0 * h.err);
}

TEST_CASE("velocities") {
    Quiet q;
    std::mt19937_64 g(9);
    auto rest = mom::make_gaussian({}, 0.5, grid3());
    for (double c : velocity(rest)) CHECK(std::abs(c) < 1e-14);
    mom::MomentumGrid plane(2, 64, 8.0, 1.0);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        auto psi = mom::make_gaussian({u(g), u(g), 0}, 0.4, plane);
        Vec3 v = velocity(psi);
        CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1.0);
    }
}

TEST_CASE("moment report") {
    Quiet q;
    std::mt19937_64 g(10);
    auto psi = random_state(g, grid3());
    auto r = moment_report(psi, SliceRef{Frame{}, 0.2});
    for (int k = 0; k < 3; ++k) {
        CHECK(r.second[k] >= r.first[k] * r.first[k] - r.second_err[k]);
        CHECK(r.correction[k] > 0.0);
        CHECK(r.heisenberg_lhs[k] >= r.heisenberg_rhs[k] - 3.0 * r.heisenberg_err[k]);
    }
}
