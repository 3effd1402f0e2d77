#include "kgloc/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace kgloc::obs {

using cplx = std::complex<double>;

const char* to_string(Observable o) {
    switch (o) {
        case Observable::Q: return "Q";
        case Observable::A: return "A";
        case Observable::M: return "M";
    }
    return "?";
}

namespace {

void require_native(const MassShellState& psi, const SliceRef& s) {
    if (!s.frame.same_as(psi.native, 1e-12))
        throw std::invalid_argument("slice frame differs from the state's native frame; transform the state first");
}

void require_rest_native(const MassShellState& psi) {
    if (!psi.native.same_as(Frame::rest(), 1e-14))
        throw std::invalid_argument("two-frame evaluation needs a state given in rest coordinates");
}

double upstream_err(const MassShellState& psi) {
    double e = psi.resample_err;
    return psi.edge_mass() + 2.0 * e + e * e;
}

quad::DensityField empty_field(const MassShellState& psi, int pad) {
    quad::DensityField f;
    f.dim = psi.grid.dim();
    f.shape = psi.grid.shape(pad);
    for (int k = 0; k < 3; ++k) f.h[k] = psi.grid.dx() / pad;
    f.lattice_stride = pad;
    f.values.assign(fft::volume(f.shape), 0.0);
    return f;
}

void finish(quad::DensityField& f, const MassShellState& psi) {
    f.finalize(true);
    f.extra_err = upstream_err(psi) * f.abs_total;
}

wave::Weight nw_weight(const wave::Weight& mult) {
    return [mult](std::size_t i, double E, const geom::Vec3& p) { return mult(i, E, p) / std::sqrt(E); };
}

// the multipliers 1, p_k/E, m/E of the Terno decomposition
std::vector<wave::Weight> terno_multipliers(const mom::MomentumGrid& g) {
    std::vector<wave::Weight> w;
    w.push_back([](std::size_t, double, const geom::Vec3&) { return cplx(1.0, 0.0); });
    for (int k = 0; k < g.dim(); ++k)
        w.push_back([k](std::size_t, double E, const geom::Vec3& p) { return cplx(p[k] / E, 0.0); });
    double m = g.mass();
    w.push_back([m](std::size_t, double E, const geom::Vec3&) { return cplx(m / E, 0.0); });
    return w;
}

ProbabilityValue make_prob(const quad::IntegralValue& I, Observable o, const SliceRef& s, const Region& r) {
    ProbabilityValue p;
    p.value = I.value;
    p.err = I.err;
    p.observable = o;
    p.slice = s;
    p.region = r.describe();
    p.method = I.method;
    p.clamped = I.value < -I.err || I.value > 1.0 + I.err;
    return p;
}

}  // namespace

quad::DensityField nw_density(const MassShellState& psi, double t, int pad) {
    quad::DensityField f = empty_field(psi, pad);
    wave::CVec F = wave::weighted_field(
        psi, t, [](std::size_t, double E, const geom::Vec3&) { return cplx(1.0 / std::sqrt(E), 0.0); }, pad);
    for (std::size_t i = 0; i < F.size(); ++i) f.values[i] = std::norm(F[i]);
    finish(f, psi);
    return f;
}

quad::DensityField terno_density(const MassShellState& psi, double t, int pad) {
    quad::DensityField f = empty_field(psi, pad);
    for (const auto& w : terno_multipliers(psi.grid)) {
        wave::CVec F = wave::weighted_field(psi, t, nw_weight(w), pad);
        for (std::size_t i = 0; i < F.size(); ++i) f.values[i] += 0.5 * std::norm(F[i]);
    }
    finish(f, psi);
    return f;
}

quad::DensityField energy_density(const MassShellState& psi, double t, int pad) {
    quad::DensityField f = empty_field(psi, pad);
    wave::FieldSlab slab = wave::terno_field(psi, t, psi.native, pad);
    wave::StressEnergyField T = wave::stress_energy(slab);
    for (std::size_t i = 0; i < T.T.size(); ++i) f.values[i] = T.at(i, 0, 0);
    finish(f, psi);
    return f;
}

ProbabilityValue nw_probability(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                const ObsOptions& opt) {
    require_native(psi, slice);
    auto f = nw_density(psi, slice.time, opt.pad);
    return make_prob(quad::integrate(f, r, opt.quadrature), Observable::Q, slice, r);
}

ProbabilityValue terno_probability(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                   const ObsOptions& opt) {
    require_native(psi, slice);
    auto f = terno_density(psi, slice.time, opt.pad);
    return make_prob(quad::integrate(f, r, opt.quadrature), Observable::A, slice, r);
}

ProbabilityValue terno_probability_energy_form(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                               const ObsOptions& opt) {
    require_native(psi, slice);
    auto f = energy_density(psi, slice.time, opt.pad);
    auto p = make_prob(quad::integrate(f, r, opt.quadrature), Observable::A, slice, r);
    p.method += "+energy";
    return p;
}

// ------------------------------------------------------------------- M-POVM

MassShellState to_frame(const MassShellState& psi, const Frame& f, const mom::ResampleOptions& opt) {
    if (f.same_as(psi.native, 1e-14)) return psi;
    require_rest_native(psi);
    geom::PoincareTransform h;
    h.lambda = geom::frame_boost(f);
    h = h.inverse();  // Lambda^-1 = L(f)
    MassShellState r = mom::apply_poincare_state(psi, h, opt);
    r.native = f;
    return r;
}

ProbabilityValue m_povm_current(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                const MOptions& opt) {
    require_rest_native(psi);
    n0.validate();
    slice.frame.validate();
    wave::QuadForm q = wave::stress_form(slice.frame.n, n0.n, psi.grid.mass());
    quad::DensityField f;
    if (slice.frame.same_as(psi.native, 1e-14)) {
        f = wave::native_slice_density(psi, n0, slice.time, q, opt.obs.pad);
    } else {
        if (opt.obs.quadrature == quad::Quadrature::Lattice)
            throw std::invalid_argument("lattice quadrature is not available on boosted slices");
        f = wave::boosted_slice_density(psi, n0, slice, q, opt.slab);
    }
    auto p = make_prob(quad::integrate(f, r, opt.obs.quadrature), Observable::M, slice, r);
    p.method += "+current";
    return p;
}

namespace {

ProbabilityValue operator_form_in_frame(const MassShellState& psi_p, const Frame& n0, const SliceRef& slice,
                                        const Region& r, const MOptions& opt) {
    const auto& g = psi_p.grid;
    const int pad = opt.obs.pad;
    const double t = slice.time;
    // generator frame in the rest coordinates of the slice frame
    geom::FourVector n0p = n0.n;
    if (!slice.frame.same_as(Frame::rest(), 1e-14))
        n0p = geom::apply(geom::PoincareTransform{geom::frame_boost(slice.frame), {}}.inverse().lambda, n0.n);
    const double gam = n0p[0];
    auto En0 = [n0p](double E, const geom::Vec3& q) { return n0p[0] * E - n0p[1] * q[0] - n0p[2] * q[1] - n0p[3] * q[2]; };
    auto base = [En0](double E, const geom::Vec3& q) { return 1.0 / (E * std::sqrt(En0(E, q))); };

    quad::DensityField f = empty_field(psi_p, pad);
    wave::CVec A = wave::weighted_field(
        psi_p, t, [&](std::size_t, double E, const geom::Vec3& q) { return cplx(E * base(E, q), 0.0); }, pad);
    wave::CVec B = wave::weighted_field(
        psi_p, t, [&](std::size_t, double E, const geom::Vec3& q) { return cplx(En0(E, q) * base(E, q), 0.0); }, pad);
    for (std::size_t i = 0; i < A.size(); ++i)
        f.values[i] = (std::conj(A[i]) * B[i]).real() - 0.5 * gam * std::norm(A[i]);
    B = wave::CVec();
    A = wave::CVec();
    for (int k = 0; k <= g.dim(); ++k) {
        wave::CVec C = wave::weighted_field(
            psi_p, t,
            [&](std::size_t, double E, const geom::Vec3& q) {
                double mult = k < g.dim() ? q[k] : g.mass();
                return cplx(mult * base(E, q), 0.0);
            },
            pad);
        for (std::size_t i = 0; i < C.size(); ++i) f.values[i] += 0.5 * gam * std::norm(C[i]);
    }
    finish(f, psi_p);
    auto p = make_prob(quad::integrate(f, r, opt.obs.quadrature), Observable::M, slice, r);
    p.method += "+operator";
    return p;
}

}  // namespace

ProbabilityValue m_povm_operator(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                 const MOptions& opt) {
    require_rest_native(psi);
    MassShellState psi_p = to_frame(psi, slice.frame, opt.resample);
    return operator_form_in_frame(psi_p, n0, slice, r, opt);
}

MProbability m_povm_probability(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                const MOptions& opt) {
    MProbability m;
    m.current_form = m_povm_current(psi, n0, slice, r, opt);
    MassShellState psi_p = to_frame(psi, slice.frame, opt.resample);
    m.operator_form = operator_form_in_frame(psi_p, n0, slice, r, opt);
    m.difference = m.current_form.value - m.operator_form.value;
    m.agree = std::abs(m.difference) <= 3.0 * (m.current_form.err + m.operator_form.err);
    m.flagged = psi_p.resample_err > opt.resample_tol;
    return m;
}

// ------------------------------------------------------------------ moments

namespace {

struct AxisSums {
    double nw0 = 0, nw1 = 0, nw2 = 0;  // integrals of 1, x, x^2 against |Psi|^2
    double a0 = 0, a1 = 0, a2 = 0;     // same against the Terno density
    double tail_nw = 0, tail_a = 0;    // mass beyond 3/4 of the half box along the axis
};

struct MomentSums {
    std::array<AxisSums, 3> ax;
    double half = 0;  // half box length
};

MomentSums moment_sums(const MassShellState& psi, double t, int pad) {
    const auto& g = psi.grid;
    const int d = g.dim();
    MomentSums s;
    s.half = 0.5 * g.length();
    const double cell = std::pow(g.dx() / pad, d);
    fft::Shape sh = g.shape(pad);
    const int M = sh[0];
    std::vector<double> x(M);
    std::vector<char> tail(M);
    for (int j = 0; j < M; ++j) {
        x[j] = g.position(j, pad);
        tail[j] = std::abs(x[j]) > 0.75 * s.half;
    }
    auto mults = terno_multipliers(g);
    for (std::size_t m = 0; m < mults.size(); ++m) {
        wave::CVec F = wave::weighted_field(psi, t, nw_weight(mults[m]), pad);
        std::array<AxisSums, 3> acc{};
        int j[3] = {0, 0, 0};
        for (std::size_t i = 0; i < F.size(); ++i) {
            double w = std::norm(F[i]);
            for (int k = 0; k < d; ++k) {
                double xk = x[j[k]];
                acc[k].nw0 += w;
                acc[k].nw1 += w * xk;
                acc[k].nw2 += w * xk * xk;
                if (tail[j[k]]) acc[k].tail_nw += w;
            }
            for (int k = 2; k >= 0; --k) {
                if (++j[k] < sh[k]) break;
                j[k] = 0;
            }
        }
        for (int k = 0; k < d; ++k) {
            auto& a = acc[k];
            a.nw0 *= cell;
            a.nw1 *= cell;
            a.nw2 *= cell;
            a.tail_nw *= cell;
            auto& o = s.ax[k];
            if (m == 0) {
                o.nw0 = a.nw0;
                o.nw1 = a.nw1;
                o.nw2 = a.nw2;
                o.tail_nw = a.tail_nw;
            }
            o.a0 += 0.5 * a.nw0;
            o.a1 += 0.5 * a.nw1;
            o.a2 += 0.5 * a.nw2;
            o.tail_a += 0.5 * a.tail_nw;
        }
    }
    return s;
}

void check_axis(const MassShellState& psi, int axis) {
    if (axis < 0 || axis > psi.grid.dim()) throw std::invalid_argument("moment axis out of range");
}

// momentum-space averages in the measure |psi|^2 / E
struct MomentumStats {
    double norm = 0, p1 = 0, p2 = 0, corr = 0, ratio = 0;  // corr = <(E^2-p^2)/(2E^4)>, ratio = <(E^2-p^2)/E^4>
};

MomentumStats momentum_stats(const MassShellState& psi, int k) {
    MomentumStats m;
    const auto& g = psi.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double E = g.energy(i);
        double p = g.momentum(i)[k];
        double w = std::norm(psi.psi[i]) / E;
        double c = (E * E - p * p) / (E * E * E * E);
        m.norm += w;
        m.p1 += w * p;
        m.p2 += w * p * p;
        m.ratio += w * c;
    }
    double cell = g.cell();
    m.norm *= cell;
    m.p1 *= cell;
    m.p2 *= cell;
    m.ratio *= cell;
    m.corr = 0.5 * m.ratio;
    return m;
}

// Periodic images fold the tails back across the box; a folded unit of mass moves by up to
// the full box, so the tail shell times the weight at the edge bounds the moment error.
double moment_err(const MomentSums& c, const MomentSums& f, const MassShellState& psi, int k, int power, bool terno) {
    const AxisSums& a = c.ax[k];
    const AxisSums& b = f.ax[k];
    double hp = std::pow(c.half, power);
    double v1 = terno ? (power == 1 ? a.a1 : a.a2) : (power == 1 ? a.nw1 : a.nw2);
    double v2 = terno ? (power == 1 ? b.a1 : b.a2) : (power == 1 ? b.nw1 : b.nw2);
    double tail = terno ? a.tail_a : a.tail_nw;
    double tot = std::max(a.a0, a.nw0);
    return std::abs(v1 - v2) + 2.0 * std::pow(2.0, power) * tail * hp + 1e-13 * hp * tot +
           upstream_err(psi) * hp * tot;
}

MomentReport build_report(const MassShellState& psi, const SliceRef& slice) {
    MomentReport r;
    r.dim = psi.grid.dim();
    r.time = slice.time;
    MomentSums c = moment_sums(psi, slice.time, 1);
    MomentSums f = moment_sums(psi, slice.time, 2);
    for (int k = 0; k < r.dim; ++k) {
        const AxisSums& a = c.ax[k];
        MomentumStats ms = momentum_stats(psi, k);
        r.first[k] = a.a1;
        r.first_err[k] = moment_err(c, f, psi, k, 1, true);
        r.nw_expectation[k] = a.nw1;
        r.nw_err[k] = moment_err(c, f, psi, k, 1, false);
        r.second[k] = a.a2;
        r.nw_second[k] = a.nw2;
        r.correction[k] = ms.corr;
        r.residual[k] = a.a2 - a.nw2 - ms.corr;
        r.second_err[k] = moment_err(c, f, psi, k, 2, true) + moment_err(c, f, psi, k, 2, false);

        double mean_p = ms.p1 / ms.norm;
        double dP2 = std::max(ms.p2 / ms.norm - mean_p * mean_p, 0.0);
        double dP = std::sqrt(dP2);
        double ratio = ms.ratio / ms.norm;
        double mx = a.a1 / a.a0, mn = a.nw1 / a.nw0;
        double varX = a.a2 / a.a0 - mx * mx;
        double varN = a.nw2 / a.nw0 - mn * mn;
        double dvar = (r.second_err[k] + 2.0 * std::abs(mx) * r.first_err[k]) / a.a0;
        r.delta_p[k] = dP;
        r.heisenberg_lhs[k] = std::sqrt(std::max(varX, 0.0)) * dP;
        r.nw_heisenberg_lhs[k] = std::sqrt(std::max(varN, 0.0)) * dP;
        r.heisenberg_rhs[k] = 0.5 * std::sqrt(1.0 + 2.0 * dP2 * ratio);
        r.heisenberg_err[k] = varX > 0.0 ? dP * dvar / (2.0 * std::sqrt(varX)) : dP * std::sqrt(dvar);
    }
    return r;
}

}  // namespace

MomentReport moment_report(const MassShellState& psi, const SliceRef& slice) {
    require_native(psi, slice);
    return build_report(psi, slice);
}

MomentValue first_moment(const MassShellState& psi, const SliceRef& slice, int axis) {
    require_native(psi, slice);
    check_axis(psi, axis);
    if (axis == 0) return {slice.time, 0.0};
    MomentReport r = build_report(psi, slice);
    return {r.first[axis - 1], r.first_err[axis - 1]};
}

MomentValue nw_expectation(const MassShellState& psi, const SliceRef& slice, int axis) {
    require_native(psi, slice);
    check_axis(psi, axis);
    if (axis == 0) return {slice.time * psi.norm2(), 0.0};
    MomentReport r = build_report(psi, slice);
    return {r.nw_expectation[axis - 1], r.nw_err[axis - 1]};
}

SecondMoment second_moment(const MassShellState& psi, const SliceRef& slice, int axis) {
    require_native(psi, slice);
    if (axis < 1 || axis > psi.grid.dim()) throw std::invalid_argument("second moment needs a spatial axis");
    MomentReport r = build_report(psi, slice);
    int k = axis - 1;
    SecondMoment s;
    s.terno_second = r.second[k];
    s.nw_second = r.nw_second[k];
    s.correction = r.correction[k];
    s.residual = r.residual[k];
    s.err = r.second_err[k];
    return s;
}

HeisenbergValue heisenberg_check(const MassShellState& psi, const SliceRef& slice, int axis) {
    require_native(psi, slice);
    if (axis < 1 || axis > psi.grid.dim()) throw std::invalid_argument("heisenberg check needs a spatial axis");
    MomentReport r = build_report(psi, slice);
    int k = axis - 1;
    HeisenbergValue h;
    h.lhs = r.heisenberg_lhs[k];
    h.rhs = r.heisenberg_rhs[k];
    h.nw_lhs = r.nw_heisenberg_lhs[k];
    h.err = r.heisenberg_err[k];
    return h;
}

geom::Vec3 velocity(const MassShellState& psi) {
    geom::Vec3 v{};
    double n = psi.norm2();
    if (!(n > 0.0)) return v;
    for (int k = 0; k < psi.grid.dim(); ++k)
        v[k] = mom::inner_product(mom::apply_multiplier(psi, mom::Multiplier::mom_over_energy(k)), psi).real() / n;
    return v;
}

}  // namespace kgloc::obs
