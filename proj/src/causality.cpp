#include "kgloc/causality.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgloc/log.hpp"

namespace kgloc::caus {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    if (!t) throw std::runtime_error("gauss-legendre table allocation failed");
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x[i], &w[i], t);
    gsl_integration_glfixed_table_free(t);
}

namespace {

std::vector<geom::Ball> balls_of(const Region& r) {
    if (auto* b = r.ball()) return {*b};
    if (auto* u = std::get_if<geom::Union>(&r.v)) {
        std::vector<geom::Ball> out;
        for (const auto& p : u->parts) {
            auto sub = balls_of(p);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    throw std::invalid_argument("mantle source must be a ball or a union of balls");
}

struct Node {
    geom::FourVector e;
    geom::Vec3 rhat;
    double weight;
    double theta, phi;
};

std::vector<Node> mantle_nodes(const MantleSpec& spec, int dim, const MantleGrid& g) {
    std::vector<Node> nodes;
    const double dt = spec.t2 - spec.t1;
    if (dt == 0.0) return nodes;
    const auto balls = balls_of(spec.source);
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(dt) / spec.panel)));
    std::vector<double> xu, wu, xc, wc;
    gauss_legendre(g.n_u, xu, wu);
    if (dim == 3) gauss_legendre(g.n_theta, xc, wc);
    const double hp = std::abs(dt) / panels;
    for (int p = 0; p < panels; ++p) {
        for (int a = 0; a < g.n_u; ++a) {
            double tau = hp * (p + 0.5 * (xu[a] + 1.0));  // |t - t1|
            double t = spec.t1 + (dt > 0 ? tau : -tau);
            double wt = 0.5 * hp * wu[a];
            for (std::size_t i = 0; i < balls.size(); ++i) {
                const auto& b = balls[i];
                double r = b.radius + tau;
                auto push = [&](const geom::Vec3& rh, double w, double th, double ph) {
                    geom::Vec3 x = geom::add(b.center, geom::scale(rh, r));
                    for (std::size_t j = 0; j < balls.size(); ++j) {
                        if (j == i) continue;
                        if (geom::norm(geom::sub(x, balls[j].center)) < balls[j].radius + tau) return;
                    }
                    nodes.push_back({{t, x[0], x[1], x[2]}, rh, w, th, ph});
                };
                if (dim == 1) {
                    push({1.0, 0.0, 0.0}, wt, 0.0, 0.0);
                    push({-1.0, 0.0, 0.0}, wt, M_PI, 0.0);
                } else if (dim == 2) {
                    for (int k = 0; k < g.n_phi; ++k) {
                        double ph = 2.0 * M_PI * k / g.n_phi;
                        push({std::cos(ph), std::sin(ph), 0.0}, wt * r * 2.0 * M_PI / g.n_phi, 0.5 * M_PI, ph);
                    }
                } else {
                    for (int c = 0; c < g.n_theta; ++c) {
                        double ct = xc[c], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                        for (int k = 0; k < g.n_phi; ++k) {
                            double ph = 2.0 * M_PI * k / g.n_phi;
                            push({st * std::cos(ph), st * std::sin(ph), ct}, wt * wc[c] * r * r * 2.0 * M_PI / g.n_phi,
                                 std::acos(ct), ph);
                        }
                    }
                }
            }
        }
    }
    return nodes;
}

void check_window(const MassShellState& psi, const MantleSpec& spec) {
    double half = 0.5 * psi.grid.length();
    double tau = std::abs(spec.t2 - spec.t1);
    for (const auto& b : balls_of(spec.source)) {
        for (int k = psi.grid.dim(); k < 3; ++k)
            if (b.center[k] != 0.0) throw std::invalid_argument("ball center has components beyond the grid dimension");
        for (int k = 0; k < psi.grid.dim(); ++k)
            if (std::abs(b.center[k]) + b.radius + tau >= half)
                throw std::invalid_argument("mantle exits the position window of the grid");
    }
}

std::vector<MantleSample> evaluate(const MassShellState& psi, const MantleSpec& spec, const MantleGrid& g) {
    check_window(psi, spec);
    auto nodes = mantle_nodes(spec, psi.grid.dim(), g);
    std::vector<MantleSample> out;
    if (nodes.empty()) return out;
    wave::EventEvaluator ev(psi, spec.generator);
    std::vector<geom::FourVector> events(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) events[i] = nodes[i].e;
    auto fp = ev.evaluate(events);
    const double s = spec.t2 > spec.t1 ? 1.0 : -1.0;
    out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        geom::FourVector J = wave::current_vector(fp[i], psi.grid.mass(), spec.generator.n);
        double jr = J[1] * nodes[i].rhat[0] + J[2] * nodes[i].rhat[1] + J[3] * nodes[i].rhat[2];
        auto& m = out[i];
        m.t = nodes[i].e[0];
        m.theta = nodes[i].theta;
        m.phi = nodes[i].phi;
        m.x = {nodes[i].e[1], nodes[i].e[2], nodes[i].e[3]};
        m.weight = nodes[i].weight;
        m.jv = J[0] - s * jr;
        m.phi_abs = std::abs(fp[i].phi);
    }
    return out;
}

double integrate_samples(const std::vector<MantleSample>& v) {
    double f = 0.0;
    for (const auto& m : v) f -= m.jv * m.weight;
    return f;
}

}  // namespace

std::vector<MantleSample> mantle_samples(const MassShellState& psi, const MantleSpec& spec, bool hi) {
    return evaluate(psi, spec, hi ? spec.hi : spec.lo);
}

namespace {

FluxResult flux_from(const MassShellState& psi, const MantleSpec& spec, const std::vector<MantleSample>& hi) {
    FluxResult r;
    auto lo = evaluate(psi, spec, spec.lo);
    r.points = hi.size();
    r.flux = integrate_samples(hi);
    double mag = 0.0;
    for (const auto& m : hi) mag += std::abs(m.jv * m.weight);
    r.err = std::abs(r.flux - integrate_samples(lo)) + 1e-13 * mag;

    SliceRef s1{psi.native, spec.t1}, s2{psi.native, spec.t2};
    obs::ProbabilityValue p1 = obs::m_povm_current(psi, spec.generator, s1, spec.source);
    Region expanded = geom::cone_expand(spec.source, s1, s2);
    obs::ProbabilityValue p2 = obs::m_povm_current(psi, spec.generator, s2, expanded);
    r.p1 = p1.value;
    r.p1_err = p1.err;
    r.p2 = p2.value;
    r.p2_err = p2.err;
    r.balance_residual = std::abs(r.p2 - r.p1 - r.flux);
    r.balance_err = r.err + r.p1_err + r.p2_err;
    return r;
}

CausalityFraction fraction_from(const std::vector<MantleSample>& v, double tau_c) {
    CausalityFraction c;
    c.points = v.size();
    if (v.empty()) return c;
    double phimax = 0.0;
    for (const auto& m : v) {
        c.scale = std::max(c.scale, std::abs(m.jv));
        phimax = std::max(phimax, m.phi_abs);
    }
    if (c.scale == 0.0) return c;
    std::size_t ok = 0;
    double maxjv = -1e300, maxsupp = -1e300;
    for (const auto& m : v) {
        if (m.jv <= tau_c * c.scale) ++ok;
        maxjv = std::max(maxjv, m.jv);
        if (m.phi_abs > 1e-6 * phimax) maxsupp = std::max(maxsupp, m.jv);
    }
    c.fraction = static_cast<double>(ok) / v.size();
    c.max_jv = maxjv / c.scale;
    c.delta = -maxsupp / c.scale;
    return c;
}

}  // namespace

FluxResult mantle_flux(const MassShellState& psi, const MantleSpec& spec) {
    return flux_from(psi, spec, evaluate(psi, spec, spec.hi));
}

CausalityFraction pointwise_mantle_causality(const MassShellState& psi, const MantleSpec& spec, double tau_c) {
    return fraction_from(evaluate(psi, spec, spec.hi), tau_c);
}

MantleCheck mantle_check(const MassShellState& psi, const MantleSpec& spec, double tau_c) {
    auto hi = evaluate(psi, spec, spec.hi);
    return {flux_from(psi, spec, hi), fraction_from(hi, tau_c)};
}

}  // namespace kgloc::caus
