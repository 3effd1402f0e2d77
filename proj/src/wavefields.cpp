#include "kgloc/wavefields.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kgloc::wave {

namespace {

double two_pi_factor(int d) { return std::pow(2.0 * M_PI, -0.5 * d); }

// E_n(p) = -n.p for on-shell p = (E, p)
double frame_energy(const Frame& n, double E, const geom::Vec3& p) {
    return n.n[0] * E - n.n[1] * p[0] - n.n[2] * p[1] - n.n[3] * p[2];
}

// i p_mu for field component f (0: Phi, 1 + mu: d_mu)
cplx component_factor(int f, double E, const geom::Vec3& p) {
    if (f == 0) return {1.0, 0.0};
    if (f == 1) return {0.0, -E};
    return {0.0, p[f - 2]};
}

}  // namespace

CVec to_position(const MomentumGrid& g, const cplx* c, int pad) {
    const int d = g.dim(), n = g.n(), M = pad * n;
    fft::Shape sh = g.shape(pad);
    CVec buf(fft::volume(sh), cplx(0.0, 0.0));
    const int off = (M - n) / 2;
    int i[3];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        g.unravel(idx, i);
        std::size_t t = 0;
        for (int k = 0; k < 3; ++k) t = t * sh[k] + (k < d ? i[k] + off : 0);
        buf[t] = c[idx];
    }
    fft::centered_dft(d, sh, buf.data(), +1);
    double s = g.cell() * two_pi_factor(d);
    for (auto& z : buf) z *= s;
    return buf;
}

std::vector<cplx> to_momentum(const MomentumGrid& g, const cplx* F) {
    const int d = g.dim();
    fft::Shape sh = g.shape(1);
    CVec buf(F, F + g.size());
    fft::centered_dft(d, sh, buf.data(), -1);
    double s = std::pow(g.dx(), d) * two_pi_factor(d);
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = buf[i] * s;
    return out;
}

CVec weighted_field(const MassShellState& psi, double t, const Weight& w, int pad) {
    const auto& g = psi.grid;
    std::vector<cplx> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double E = g.energy(i);
        c[i] = w(i, E, g.momentum(i)) * psi.psi[i] * (t == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, -E * t));
    }
    return to_position(g, c.data(), pad);
}

double SpatialAmplitude::norm2() const {
    double s = 0.0;
    for (const auto& z : values) s += std::norm(z);
    return s * std::pow(grid.dx() / pad, grid.dim());
}

SpatialAmplitude nw_amplitude(const MassShellState& psi, double t, int pad) {
    SpatialAmplitude a{psi.grid, {psi.native, t}, AmplitudeKind::NW, pad, {}};
    a.values = weighted_field(psi, t, [](std::size_t, double E, const geom::Vec3&) { return cplx(1.0 / std::sqrt(E), 0.0); },
                              pad);
    return a;
}

SpatialAmplitude covariant_wavefunction(const MassShellState& psi, double t, int pad) {
    SpatialAmplitude a{psi.grid, {psi.native, t}, AmplitudeKind::Covariant, pad, {}};
    a.values = weighted_field(psi, t, [](std::size_t, double E, const geom::Vec3&) { return cplx(1.0 / E, 0.0); }, pad);
    return a;
}

double FieldSlab::scale() const {
    double m = 0.0;
    for (const auto& f : fields)
        for (const auto& z : f[0]) m = std::max(m, std::abs(z));
    return m;
}

FieldSlab terno_field(const MassShellState& psi, const std::vector<double>& times, const Frame& gen, int pad) {
    FieldSlab s{psi.grid, gen, pad, times, {}};
    const int nf = psi.grid.dim() + 2;
    for (double t : times) {
        std::array<CVec, 5> f;
        for (int c = 0; c < nf; ++c) {
            f[c] = weighted_field(
                psi, t,
                [&](std::size_t, double E, const geom::Vec3& p) {
                    return component_factor(c, E, p) / (E * std::sqrt(frame_energy(gen, E, p)));
                },
                pad);
        }
        s.fields.push_back(std::move(f));
    }
    return s;
}

FieldSlab terno_field(const MassShellState& psi, double t, const Frame& gen, int pad) {
    return terno_field(psi, std::vector<double>{t}, gen, pad);
}

namespace {
constexpr double kEta[4] = {-1.0, 1.0, 1.0, 1.0};

FieldPoint point_from(const std::array<CVec, 5>& f, int nf, std::size_t i) {
    FieldPoint v;
    v.phi = f[0][i];
    for (int c = 1; c < nf; ++c) v.d[c - 1] = f[c][i];
    return v;
}

double lagrangian(const FieldPoint& v, double mass) {
    double L = mass * mass * std::norm(v.phi);
    for (int m = 0; m < 4; ++m) L += kEta[m] * std::norm(v.d[m]);
    return L;
}
}  // namespace

StressEnergyField stress_energy(const FieldSlab& slab, std::size_t ti) {
    if (ti >= slab.fields.size()) throw std::out_of_range("stress_energy: time index");
    StressEnergyField T{slab.grid, slab.generator, slab.pad, slab.times[ti], {}};
    const auto& f = slab.fields[ti];
    const int nf = slab.grid.dim() + 2;
    const double m = slab.grid.mass();
    std::size_t npts = f[0].size();
    T.T.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        FieldPoint v = point_from(f, nf, i);
        double L = lagrangian(v, m);
        auto& t = T.T[i];
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) {
                double val = (std::conj(v.d[a]) * v.d[b]).real();
                if (a == b) val -= 0.5 * kEta[a] * L;
                t[4 * a + b] = val;
                t[4 * b + a] = val;
            }
    }
    return T;
}

double CurrentField::scale() const {
    double m = 0.0;
    for (const auto& j : J) m = std::max(m, std::abs(j[0]));
    return m;
}

CurrentField current(const StressEnergyField& T, const Frame& n) {
    CurrentField c{T.grid, T.generator, n, T.pad, {}};
    c.J.resize(T.T.size());
    for (std::size_t i = 0; i < T.T.size(); ++i) {
        const auto& t = T.T[i];
        for (int mu = 0; mu < 4; ++mu) {
            double s = 0.0;
            for (int nu = 0; nu < 4; ++nu) s += t[4 * mu + nu] * n.n[nu];
            c.J[i][mu] = kEta[mu] * s;
        }
    }
    return c;
}

DivergenceResult current_divergence(const MassShellState& psi, double t, const Frame& n) {
    const auto& g = psi.grid;
    const int d = g.dim();
    const int nd = d + 1;  // number of derivative directions
    const double m = g.mass();
    auto base = [&](double E, const geom::Vec3& p) { return 1.0 / (E * std::sqrt(frame_energy(n, E, p))); };
    auto ip = [&](int mu, double E, const geom::Vec3& p) -> cplx {
        return mu == 0 ? cplx(0.0, -E) : cplx(0.0, p[mu - 1]);
    };
    CVec phi = weighted_field(psi, t, [&](std::size_t, double E, const geom::Vec3& p) { return cplx(base(E, p), 0.0); });
    std::vector<CVec> d1(nd);
    for (int mu = 0; mu < nd; ++mu)
        d1[mu] = weighted_field(psi, t, [&](std::size_t, double E, const geom::Vec3& p) { return ip(mu, E, p) * base(E, p); });
    std::vector<std::vector<CVec>> d2(nd, std::vector<CVec>(nd));
    for (int mu = 0; mu < nd; ++mu)
        for (int nu = mu; nu < nd; ++nu) {
            d2[mu][nu] = weighted_field(psi, t, [&](std::size_t, double E, const geom::Vec3& p) {
                return ip(mu, E, p) * ip(nu, E, p) * base(E, p);
            });
        }
    auto D2 = [&](int a, int b, std::size_t i) { return a <= b ? d2[a][b][i] : d2[b][a][i]; };

    DivergenceResult r;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double dL[4] = {0, 0, 0, 0};
        for (int mu = 0; mu < nd; ++mu) {
            cplx s = m * m * std::conj(d1[mu][i]) * phi[i];
            for (int b = 0; b < nd; ++b) s += kEta[b] * std::conj(D2(mu, b, i)) * d1[b][i];
            dL[mu] = 2.0 * s.real();
        }
        double div = 0.0, mag = 0.0;
        for (int mu = 0; mu < nd; ++mu) {
            // d_mu T_{mu nu} n^nu
            double term = 0.0;
            for (int nu = 0; nu < nd; ++nu) {
                double dT = (std::conj(D2(mu, mu, i)) * d1[nu][i] + std::conj(d1[mu][i]) * D2(mu, nu, i)).real();
                if (nu == mu) dT -= 0.5 * kEta[mu] * dL[mu];
                term += dT * n.n[nu];
            }
            term *= kEta[mu];
            div += term;
            mag += std::abs(term);
        }
        r.max_residual = std::max(r.max_residual, std::abs(div));
        r.scale = std::max(r.scale, mag);
    }
    return r;
}

QuadForm stress_form(const FourVector& a, const FourVector& b, double mass) {
    QuadForm q;
    double ab = geom::minkowski_dot(a, b);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) q.S[1 + mu][1 + nu] += 0.5 * (a[mu] * b[nu] + b[mu] * a[nu]);
    for (int mu = 0; mu < 4; ++mu) q.S[1 + mu][1 + mu] -= 0.5 * ab * kEta[mu];
    q.S[0][0] -= 0.5 * ab * mass * mass;
    return q;
}

double eval_form(const QuadForm& q, const FieldPoint& v) {
    cplx x[5] = {v.phi, v.d[0], v.d[1], v.d[2], v.d[3]};
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
        if (q.S[i][i] != 0.0) s += q.S[i][i] * std::norm(x[i]);
        for (int j = i + 1; j < 5; ++j)
            if (q.S[i][j] != 0.0) s += 2.0 * q.S[i][j] * (std::conj(x[i]) * x[j]).real();
    }
    return s;
}

FourVector current_vector(const FieldPoint& v, double mass, const FourVector& n) {
    double L = lagrangian(v, mass);
    cplx nd = n[0] * v.d[0] + n[1] * v.d[1] + n[2] * v.d[2] + n[3] * v.d[3];
    FourVector J{};
    for (int mu = 0; mu < 4; ++mu) {
        double t = (std::conj(v.d[mu]) * nd).real() - 0.5 * kEta[mu] * n[mu] * L;
        J[mu] = kEta[mu] * t;
    }
    return J;
}

namespace {

double upstream_err(const MassShellState& psi) {
    double e = psi.resample_err;
    return psi.edge_mass() + 2.0 * e + e * e;
}

}  // namespace

quad::DensityField native_slice_density(const MassShellState& psi, const Frame& gen, double t, const QuadForm& q,
                                        int pad) {
    const auto& g = psi.grid;
    const int d = g.dim();
    const int nf = d + 2;
    Eigen::MatrixXd S(nf, nf);
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) S(i, j) = q.S[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();

    quad::DensityField f;
    f.dim = d;
    f.shape = g.shape(pad);
    for (int k = 0; k < 3; ++k) f.h[k] = g.dx() / pad;
    f.lattice_stride = pad;
    f.values.assign(fft::volume(f.shape), 0.0);
    for (int e = 0; e < nf; ++e) {
        double lam = es.eigenvalues()(e);
        if (std::abs(lam) <= 1e-14 * lmax) continue;
        Eigen::VectorXd u = es.eigenvectors().col(e);
        CVec F = weighted_field(
            psi, t,
            [&](std::size_t, double E, const geom::Vec3& p) {
                cplx w(0.0, 0.0);
                for (int c = 0; c < nf; ++c) w += u(c) * component_factor(c, E, p);
                return w / (E * std::sqrt(frame_energy(gen, E, p)));
            },
            pad);
        for (std::size_t i = 0; i < F.size(); ++i) f.values[i] += lam * std::norm(F[i]);
    }
    f.finalize(true);
    f.extra_err = upstream_err(psi) * f.abs_total;
    return f;
}

// ---------------------------------------------------------------- direct sums

EventEvaluator::EventEvaluator(const MassShellState& psi, const Frame& gen, double prune_rel) : grid_(psi.grid) {
    const auto& g = psi.grid;
    const int d = g.dim(), n = g.n();
    nfields_ = d + 2;
    double amax = 0.0;
    for (const auto& z : psi.psi) amax = std::max(amax, std::abs(z));
    double thr = prune_rel * amax;
    const double pref = g.cell() * two_pi_factor(d);
    int n0 = d >= 2 ? n : 1, n1 = d >= 3 ? n : 1;
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n1; ++b) {
            int lo = n, hi = -1;
            for (int c = 0; c < n; ++c) {
                int i[3] = {0, 0, 0};
                if (d == 1) i[0] = c;
                else if (d == 2) { i[0] = a; i[1] = c; }
                else { i[0] = a; i[1] = b; i[2] = c; }
                std::size_t idx = (static_cast<std::size_t>(i[0]) * (d > 1 ? n : 1) + i[1]) * (d > 2 ? n : 1) + i[2];
                if (std::abs(psi.psi[idx]) > thr) {
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
            }
            if (hi < lo) continue;
            Row r{a, b, lo, hi, energy_.size()};
            for (int c = lo; c <= hi; ++c) {
                int i[3] = {0, 0, 0};
                if (d == 1) i[0] = c;
                else if (d == 2) { i[0] = a; i[1] = c; }
                else { i[0] = a; i[1] = b; i[2] = c; }
                std::size_t idx = (static_cast<std::size_t>(i[0]) * (d > 1 ? n : 1) + i[1]) * (d > 2 ? n : 1) + i[2];
                double E = g.energy(idx);
                geom::Vec3 p = g.momentum(idx);
                double w = pref / (E * std::sqrt(frame_energy(gen, E, p)));
                energy_.push_back(E);
                for (int f = 0; f < nfields_; ++f) coef_[f].push_back(component_factor(f, E, p) * w * psi.psi[idx]);
            }
            rows_.push_back(r);
        }
}

std::vector<FieldPoint> EventEvaluator::evaluate(const std::vector<FourVector>& events) const {
    const int d = grid_.dim(), n = grid_.n();
    const int nf = nfields_;
    std::vector<FieldPoint> out(events.size());
    std::vector<std::size_t> order(events.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return events[a][0] < events[b][0]; });

    const std::size_t ns = energy_.size();
    std::array<std::vector<cplx>, 5> ct;
    for (int f = 0; f < nf; ++f) ct[f].resize(ns);
    std::vector<cplx> X[3];
    for (auto& x : X) x.resize(n);
    double cur_t = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const FourVector& e = events[order[oi]];
        if (!(e[0] == cur_t)) {
            cur_t = e[0];
            for (std::size_t s = 0; s < ns; ++s) {
                cplx ph = std::polar(1.0, -energy_[s] * cur_t);
                for (int f = 0; f < nf; ++f) ct[f][s] = coef_[f][s] * ph;
            }
        }
        for (int k = 0; k < d; ++k) {
            double xk = e[k + 1];
            cplx step = std::polar(1.0, grid_.dp() * xk);
            cplx z = std::polar(1.0, grid_.coord(0) * xk);
            for (int i = 0; i < n; ++i) {
                X[k][i] = z;
                z *= step;
                if ((i & 31) == 31) z = std::polar(1.0, grid_.coord(i + 1) * xk);
            }
        }
        cplx acc[5] = {};
        const std::vector<cplx>& Xl = X[d - 1];
        for (const Row& r : rows_) {
            cplx pref(1.0, 0.0);
            if (d == 2) pref = X[0][r.i0];
            if (d == 3) pref = X[0][r.i0] * X[1][r.i1];
            cplx row[5] = {};
            const std::size_t len = static_cast<std::size_t>(r.hi - r.lo + 1);
            const cplx* xl = Xl.data() + r.lo;
            for (int f = 0; f < nf; ++f) {
                const cplx* c = ct[f].data() + r.offset;
                double re = 0.0, im = 0.0;
                for (std::size_t q = 0; q < len; ++q) {
                    re += c[q].real() * xl[q].real() - c[q].imag() * xl[q].imag();
                    im += c[q].real() * xl[q].imag() + c[q].imag() * xl[q].real();
                }
                row[f] = cplx(re, im);
            }
            for (int f = 0; f < nf; ++f) acc[f] += pref * row[f];
        }
        FieldPoint& v = out[order[oi]];
        v.phi = acc[0];
        for (int f = 1; f < nf; ++f) v.d[f - 1] = acc[f];
    }
    return out;
}

geom::Vec3 nw_centroid(const MassShellState& psi, double t) {
    SpatialAmplitude a = nw_amplitude(psi, t, 1);
    const auto& g = psi.grid;
    geom::Vec3 c{};
    double tot = 0.0;
    int i[3];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        g.unravel(idx, i);
        double w = std::norm(a.values[idx]);
        tot += w;
        for (int k = 0; k < g.dim(); ++k) c[k] += w * g.position(i[k]);
    }
    if (tot > 0.0)
        for (auto& x : c) x /= tot;
    return c;
}

quad::DensityField boosted_slice_density(const MassShellState& psi, const Frame& gen, const geom::SliceRef& slice,
                                         const QuadForm& q, const SlabOptions& opt) {
    const auto& g = psi.grid;
    const int d = g.dim(), n = g.n();
    const int nf = d + 2;
    const Frame& nf_ = slice.frame;
    nf_.validate();
    int axis = 0;
    double big = 0.0;
    for (int k = 0; k < 3; ++k)
        if (std::abs(nf_.n[k + 1]) > big) {
            big = std::abs(nf_.n[k + 1]);
            axis = k;
        }
    for (int k = 0; k < 3; ++k)
        if (k != axis && std::abs(nf_.n[k + 1]) > 1e-12 * nf_.n[0])
            throw std::invalid_argument("slab evaluation needs a slice frame boosted along a native axis");
    if (axis >= d) throw std::invalid_argument("slice boost axis exceeds the grid dimension");
    const double gam = nf_.n[0];
    const double v = nf_.n[axis + 1] / gam;
    const double tp = slice.time;

    // support
    double amax = 0.0;
    for (const auto& z : psi.psi) amax = std::max(amax, std::abs(z));
    double thr = opt.prune_rel * amax;
    const double pref = g.cell() * two_pi_factor(d);
    const int nt = 2 * n;  // transverse samples per axis
    int tdims = d - 1;
    std::size_t tsize = 1;
    for (int k = 0; k < tdims; ++k) tsize *= nt;

    struct Sup {
        std::size_t tidx;
        double q, Ep;
    };
    std::vector<Sup> sup;
    std::array<std::vector<cplx>, 5> coef;
    double Q = 0.0;
    int i[3];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!(std::abs(psi.psi[idx]) > thr)) continue;
        g.unravel(idx, i);
        double E = g.energy(idx);
        geom::Vec3 p = g.momentum(idx);
        double qa = gam * (p[axis] - v * E);
        double Ep = gam * (E - v * p[axis]);
        std::size_t t = 0;
        for (int k = 0; k < d; ++k)
            if (k != axis) t = t * nt + (i[k] + n / 2);
        sup.push_back({t, qa, Ep});
        Q = std::max(Q, std::abs(qa));
        double w = pref / (E * std::sqrt(frame_energy(gen, E, p)));
        for (int f = 0; f < nf; ++f) coef[f].push_back(component_factor(f, E, p) * w * psi.psi[idx]);
    }
    if (sup.empty()) throw std::invalid_argument("slab evaluation of a zero state");

    // window along the boost axis
    geom::Vec3 x0 = nw_centroid(psi, 0.0);
    double u = 0.0, nn = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double E = g.energy(idx);
        double w = std::norm(psi.psi[idx]) / E;
        u += w * g.momentum(idx)[axis] / E;
        nn += w;
    }
    u = nn > 0.0 ? u / nn : 0.0;
    double yc = (x0[axis] / gam + (u - v) * tp) / (1.0 - u * v);
    double La = opt.window_factor * g.length() / (gam * (1.0 + std::abs(v)));
    double hn = M_PI / (2.0 * std::max(Q, 1e-12));
    int Ma = std::max(8, 4 * static_cast<int>(std::ceil(La / (4.0 * opt.safety * hn))));
    double ha = La / Ma;

    quad::DensityField f;
    f.dim = d;
    for (int k = 0; k < 3; ++k) {
        f.shape[k] = k >= d ? 1 : (k == axis ? Ma : nt);
        f.h[k] = k == axis ? ha : 0.5 * g.dx();
    }
    f.origin[axis] = yc;
    f.lattice_stride = 0;
    f.values.assign(fft::volume(f.shape), 0.0);

    const double y0 = yc - (Ma / 2) * ha;
    const std::size_t ns = sup.size();
    std::vector<cplx> ph(ns), step(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        ph[s] = std::polar(1.0, sup[s].q * y0 - sup[s].Ep * tp);
        step[s] = std::polar(1.0, sup[s].q * ha);
    }
    std::array<CVec, 5> bins;
    for (int c = 0; c < nf; ++c) bins[c].assign(tsize, cplx(0.0, 0.0));
    fft::Shape tshape{tdims > 0 ? nt : 1, tdims > 1 ? nt : 1, 1};

    // strides of the output array
    std::size_t stride[3];
    stride[2] = 1;
    stride[1] = f.shape[2];
    stride[0] = static_cast<std::size_t>(f.shape[1]) * f.shape[2];
    int taxes[2] = {-1, -1};
    for (int k = 0, c = 0; k < d; ++k)
        if (k != axis) taxes[c++] = k;

    for (int j = 0; j < Ma; ++j) {
        if (j % 64 == 0 && j > 0) {
            double y = y0 + j * ha;
            for (std::size_t s = 0; s < ns; ++s) ph[s] = std::polar(1.0, sup[s].q * y - sup[s].Ep * tp);
        }
        for (int c = 0; c < nf; ++c) std::fill(bins[c].begin(), bins[c].end(), cplx(0.0, 0.0));
        for (std::size_t s = 0; s < ns; ++s) {
            const cplx z = ph[s];
            const std::size_t t = sup[s].tidx;
            for (int c = 0; c < nf; ++c) bins[c][t] += coef[c][s] * z;
            ph[s] *= step[s];
        }
        if (tdims > 0)
            for (int c = 0; c < nf; ++c) fft::centered_dft(tdims, tshape, bins[c].data(), +1);
        for (std::size_t t = 0; t < tsize; ++t) {
            FieldPoint fp;
            fp.phi = bins[0][t];
            for (int c = 1; c < nf; ++c) fp.d[c - 1] = bins[c][t];
            double val = eval_form(q, fp);
            std::size_t out = static_cast<std::size_t>(j) * stride[axis];
            if (tdims == 1) {
                out += t * stride[taxes[0]];
            } else if (tdims == 2) {
                out += (t / nt) * stride[taxes[0]] + (t % nt) * stride[taxes[1]];
            }
            f.values[out] = val;
        }
    }
    f.finalize(true);
    f.extra_err = upstream_err(psi) * f.abs_total;
    return f;
}

}  // namespace kgloc::wave
