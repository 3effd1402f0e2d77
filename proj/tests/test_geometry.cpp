#include <doctest.h>

#include <cmath>
#include <random>

#include "kgloc/geometry.hpp"

using namespace kgloc::geom;

namespace {

Vec3 rand_point(std::mt19937_64& g, double r) {
    std::uniform_real_distribution<double> u(-r, r);
    return {u(g), u(g), u(g)};
}

FourVector diff(const FourVector& a, const FourVector& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }

}  // namespace

TEST_CASE("minkowski dot") {
    CHECK(minkowski_dot({1, 0, 0, 0}, {1, 0, 0, 0}) == -1.0);
    CHECK(minkowski_dot({1, 1, 0, 0}, {1, 1, 0, 0}) == 0.0);
    CHECK(minkowski_dot({0, 1, 0, 0}, {0, 0, 1, 0}) == 0.0);
}

TEST_CASE("causal classes") {
    CHECK(classify_causal({2, 1, 0, 0}) == CausalClass::TimelikeFuture);
    CHECK(classify_causal({-2, 0, 1, 0}) == CausalClass::TimelikePast);
    CHECK(classify_causal({-1, 1, 0, 0}) == CausalClass::NullPast);
    CHECK(classify_causal({1, 0, 0, 1}) == CausalClass::NullFuture);
    CHECK(classify_causal({0, 1, 0, 0}) == CausalClass::Spacelike);
    CHECK(classify_causal({0, 0, 0, 0}) == CausalClass::Zero);
}

TEST_CASE("causal class is boost invariant") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        FourVector v{u(g), u(g), u(g), u(g)};
        auto h = PoincareTransform::boost({0.3 * u(g) / 2, 0.2 * u(g) / 2, -0.1 * u(g) / 2});
        FourVector w = kgloc::geom::apply(h.lambda, v);
        CHECK(classify_causal(v, 1e-10, 10.0) == classify_causal(w, 1e-10, 10.0));
    }
}

TEST_CASE("poincare action on events") {
    FourVector e{0.3, -1.0, 2.0, 0.5};
    auto same = apply_poincare_event(PoincareTransform::identity(), e);
    for (int k = 0; k < 4; ++k) CHECK(same[k] == e[k]);
    FourVector a{1.0, 2.0, -3.0, 4.0};
    auto tr = apply_poincare_event(PoincareTransform::translation(a), {0, 0, 0, 0});
    for (int k = 0; k < 4; ++k) CHECK(tr[k] == a[k]);

    // standard boost matrix with gamma = 1.25
    auto b = apply_poincare_event(PoincareTransform::boost({0.6, 0, 0}), {1, 0, 0, 0});
    const double gamma = 1.0 / std::sqrt(1.0 - 0.36);
    CHECK(b[0] == doctest::Approx(gamma).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(-0.6 * gamma).epsilon(1e-14));
    CHECK(b[0] == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(b[2] == 0.0);
    CHECK(b[3] == 0.0);
}

TEST_CASE("poincare group law") {
    std::mt19937_64 g(11);
    auto h1 = compose(PoincareTransform::translation({0.5, 1, 0, -1}), PoincareTransform::boost({0.2, -0.3, 0.1}));
    auto h2 = compose(PoincareTransform::rotation({0, 0, 1}, 0.7), PoincareTransform::boost({-0.4, 0, 0.2}));
    h1.validate();
    h2.validate();
    auto h12 = compose(h1, h2);
    auto id = compose(h12, h12.inverse());
    for (int k = 0; k < 50; ++k) {
        Vec3 x = rand_point(g, 3.0);
        FourVector e{x[0] * 0.5, x[0], x[1], x[2]};
        auto lhs = apply_poincare_event(h12, e);
        auto rhs = apply_poincare_event(h1, apply_poincare_event(h2, e));
        auto back = apply_poincare_event(id, e);
        for (int m = 0; m < 4; ++m) {
            CHECK(lhs[m] == doctest::Approx(rhs[m]).epsilon(1e-12));
            CHECK(back[m] == doctest::Approx(e[m]).epsilon(1e-12).scale(1.0));
        }
    }
    auto q = PoincareTransform::quarter_turn(0, 1);
    auto r = kgloc::geom::apply(q.lambda, {0, 1, 0, 0});
    CHECK(r[2] == doctest::Approx(1.0));
    CHECK(std::abs(r[1]) < 1e-15);
}

TEST_CASE("transformed slices") {
    SliceRef s{Frame::from_velocity({0.3, -0.2, 0.1}), 0.7};
    auto same = transformed_slice(PoincareTransform::identity(), s);
    CHECK(same.frame.same_as(s.frame));
    CHECK(same.time == doctest::Approx(s.time).epsilon(1e-14));

    const double tau = 1.3;
    FourVector a{tau * s.frame.n[0], tau * s.frame.n[1], tau * s.frame.n[2], tau * s.frame.n[3]};
    auto later = transformed_slice(PoincareTransform::translation(a), s);
    CHECK(later.frame.same_as(s.frame, 1e-14));
    CHECK(later.time == doctest::Approx(s.time + tau).epsilon(1e-14));

    SliceRef rest{Frame{}, 0.4};
    auto rot = transformed_slice(PoincareTransform::rotation({1, 1, 0}, 0.9), rest);
    CHECK(rot.frame.same_as(rest.frame, 1e-14));
    CHECK(rot.time == doctest::Approx(0.4));

    // the image of the slice contains the images of its events
    auto h = compose(PoincareTransform::translation({0.2, 1, 0, 0}), PoincareTransform::boost({0.4, 0.1, 0}));
    auto hs = transformed_slice(h, s);
    double t2 = 0.0;
    slice_coords(hs.frame, apply_poincare_event(h, slice_event(s, {0.5, -1.0, 2.0})), &t2);
    CHECK(t2 == doctest::Approx(hs.time).epsilon(1e-12));
}

TEST_CASE("cone expansion of same-frame balls") {
    SliceRef s0{Frame{}, 0.0}, s2{Frame{}, 2.0};
    Vec3 c{0.5, -0.25, 1.0};
    Region grown = cone_expand(make_ball(c, 1.0), s0, s2);
    REQUIRE(grown.ball());
    CHECK(grown.ball()->radius == doctest::Approx(3.0));
    CHECK(norm(sub(grown.ball()->center, c)) < 1e-14);

    // identity case
    Region box = Box{{-1, -1, -1}, {1, 2, 0.5}};
    Region same = cone_expand(box, s0, s0);
    std::mt19937_64 g(3);
    for (int k = 0; k < 500; ++k) {
        Vec3 y = rand_point(g, 3.0);
        CHECK(same.contains(y) == box.contains(y));
    }
}

TEST_CASE("cone expansion onto a boosted slice against a brute-force oracle") {
    SliceRef src{Frame{}, 0.0};
    SliceRef dst{Frame::from_velocity({0.5, 0, 0}), 1.0};
    Region grown = cone_expand(make_ball({}, 1.0), src, dst);

    std::mt19937_64 g(20240607);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FourVector> cloud;
    while (cloud.size() < 100000) {
        Vec3 x{u(g), u(g), u(g)};
        if (norm(x) <= 1.0) cloud.push_back({0.0, x[0], x[1], x[2]});
    }
    // the discretized ball resolves the boundary to about 0.03
    const double guard = 0.05;
    int tested = 0, inside = 0;
    for (int k = 0; k < 200; ++k) {
        Vec3 y = rand_point(g, 3.0);
        FourVector e = slice_event(dst, y);
        double best = 1e300;  // min |dx| - |dt| over the cloud
        for (const auto& x : cloud) {
            FourVector d = diff(e, x);
            best = std::min(best, std::sqrt(d[1] * d[1] + d[2] * d[2] + d[3] * d[3]) - std::abs(d[0]));
        }
        if (std::abs(best) < guard) continue;
        ++tested;
        inside += best < 0.0;
        CHECK(grown.contains(y) == (best < 0.0));
    }
    CHECK(tested > 150);
    CHECK(inside > 10);
}

TEST_CASE("cone expansion commutes with poincare maps") {
    std::mt19937_64 g(5);
    SliceRef s1{Frame{}, 0.2}, dst{Frame::from_velocity({0.2, 0.3, 0}), 1.5};
    Region src = make_union({make_ball({0.3, 0, 0}, 0.8), make_ball({-0.5, 0.4, 0.1}, 0.5)});
    auto h = compose(PoincareTransform::translation({0.3, -1, 0.5, 0}),
                     compose(PoincareTransform::boost({-0.3, 0.1, 0.2}), PoincareTransform::rotation({0, 0, 1}, 0.4)));
    Region grown = cone_expand(src, s1, dst);
    SliceRef hs1 = transformed_slice(h, s1), hdst = transformed_slice(h, dst);
    Region hgrown = cone_expand(transform_region(h, src, s1), hs1, hdst);
    int compared = 0;
    for (int k = 0; k < 400; ++k) {
        Vec3 y = rand_point(g, 3.5);
        if (std::abs(grown.signed_distance(y)) < 1e-3) continue;
        Vec3 hy = slice_coords(hdst.frame, apply_poincare_event(h, slice_event(dst, y)));
        CHECK(grown.contains(y) == hgrown.contains(hy));
        ++compared;
    }
    CHECK(compared > 300);
}

TEST_CASE("cone expansion is monotone and nests") {
    std::mt19937_64 g(9);
    SliceRef s0{Frame{}, 0.0};
    SliceRef s1{Frame::from_velocity({0.3, 0, 0}), 0.6};
    SliceRef s2{Frame::from_velocity({0, -0.4, 0.1}), 1.4};
    Region small = make_ball({0.2, 0, 0}, 0.5), big = make_ball({0.0, 0, 0}, 1.0);
    Region es = cone_expand(small, s0, s2), eb = cone_expand(big, s0, s2);
    Region direct = cone_expand(big, s0, s2);
    Region nested = cone_expand(cone_expand(big, s0, s1), s1, s2);
    for (int k = 0; k < 400; ++k) {
        Vec3 y = rand_point(g, 3.5);
        if (es.contains(y)) CHECK(eb.contains(y));
        if (direct.contains(y) && direct.signed_distance(y) < -1e-3) CHECK(nested.contains(y));
    }
    // same frame: expansions compose exactly
    SliceRef r1{Frame{}, 0.5}, r2{Frame{}, 1.25};
    Region a = cone_expand(cone_expand(big, s0, r1), r1, r2), b = cone_expand(big, s0, r2);
    REQUIRE(a.ball());
    REQUIRE(b.ball());
    CHECK(a.ball()->radius == doctest::Approx(b.ball()->radius));
}

TEST_CASE("regions") {
    Region u = make_union({make_ball({-1, 0, 0}, 0.5), make_ball({1, 0, 0}, 0.5)});
    CHECK(u.contains({-1.2, 0, 0}));
    CHECK(!u.contains({0, 0, 0}));
    CHECK(u.distance({0, 0, 0}) == doctest::Approx(0.5));
    Region c = complement(u);
    CHECK(c.contains({0, 0, 0}));
    CHECK(Region(HalfSpace{{0, 1, 0}, 0.5}).contains({0, 1, 0}));
    CHECK(Region(Box::interval(-1, 1)).contains({0.5, 100, -100}));
    CHECK(!Region(Box::interval(-1, 1)).contains({1.0, 0, 0}));
    CHECK(Region(Whole{}).contains({1e6, 0, 0}));
    CHECK(!make_ball({}, 1.0).describe().empty());
}
