#include "kgloc/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace kgloc::quad {

using fft::cplx;
using geom::Region;
using geom::Vec3;

namespace {
constexpr double kUnbounded = 1e300;

int ext(const DensityField& f, int k) { return k < f.dim ? f.shape[k] : 1; }

void unravel(const DensityField& f, std::size_t idx, int* j) {
    int n1 = ext(f, 1), n2 = ext(f, 2);
    j[2] = static_cast<int>(idx % n2);
    idx /= n2;
    j[1] = static_cast<int>(idx % n1);
    j[0] = static_cast<int>(idx / n1);
}

double wavenumber(const DensityField& f, int k, int m) { return 2.0 * M_PI * (m - f.shape[k] / 2) / f.length(k); }
}  // namespace

double DensityField::cell() const {
    double c = 1.0;
    for (int k = 0; k < dim; ++k) c *= h[k];
    return c;
}

Vec3 DensityField::point(std::size_t idx) const {
    int j[3];
    unravel(*this, idx, j);
    Vec3 y{};
    for (int k = 0; k < dim; ++k) y[k] = origin[k] + (j[k] - shape[k] / 2) * h[k];
    return y;
}

double DensityField::roundoff() const {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(size())) * abs_total +
           1e-300;
}

void DensityField::finalize(bool with_spectrum) {
    for (int k = dim; k < 3; ++k) shape[k] = 1;
    if (values.size() != size()) throw std::logic_error("density sample count does not match its shape");
    double c = cell();
    double s = 0.0, a = 0.0, e = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += values[i];
        a += std::abs(values[i]);
    }
    // wrap-around proxy: mass in the outer shell of the window
    int j[3];
    for (std::size_t i = 0; i < values.size(); ++i) {
        unravel(*this, i, j);
        bool outer = false;
        for (int k = 0; k < dim; ++k)
            if (std::abs(j[k] - shape[k] / 2) > 0.42 * shape[k]) outer = true;
        if (outer) e += std::abs(values[i]);
    }
    total = s * c;
    abs_total = a * c;
    edge_mass = e * c;
    if (with_spectrum) {
        spectrum.assign(values.begin(), values.end());
        fft::centered_dft(dim, shape, spectrum.data(), -1);
        for (auto& z : spectrum) z *= c;
    }
}

double ball_transform(int dim, double k, double R) {
    double x = k * R;
    if (dim == 1) {
        if (std::abs(x) < 1e-4) return 2.0 * R * (1.0 - x * x / 6.0);
        return 2.0 * std::sin(x) / k;
    }
    if (dim == 2) {
        if (std::abs(x) < 1e-4) return M_PI * R * R * (1.0 - x * x / 8.0);
        return 2.0 * M_PI * R * std::cyl_bessel_j(1.0, x) / k;
    }
    if (std::abs(x) < 1e-3) return 4.0 * M_PI * R * R * R / 3.0 * (1.0 - x * x / 10.0 + x * x * x * x / 280.0);
    return 4.0 * M_PI * (std::sin(x) - x * std::cos(x)) / (k * k * k);
}

namespace {

// per-axis phase tables exp(i k_m (c - origin))
std::array<std::vector<cplx>, 3> phase_tables(const DensityField& f, const Vec3& c) {
    std::array<std::vector<cplx>, 3> t;
    for (int k = 0; k < 3; ++k) {
        int n = ext(f, k);
        t[k].resize(n, cplx(1.0, 0.0));
        if (k >= f.dim) continue;
        for (int m = 0; m < n; ++m) t[k][m] = std::polar(1.0, wavenumber(f, k, m) * (c[k] - f.origin[k]));
    }
    return t;
}

bool uniform_axes(const DensityField& f) {
    for (int k = 1; k < f.dim; ++k)
        if (f.shape[k] != f.shape[0] || std::abs(f.length(k) - f.length(0)) > 1e-12 * f.length(0)) return false;
    return true;
}

}  // namespace

double integrate_ball_spectral(const DensityField& f, const geom::Ball& b) {
    if (f.spectrum.size() != f.size()) throw std::logic_error("density spectrum not computed");
    auto ph = phase_tables(f, b.center);
    int n0 = ext(f, 0), n1 = ext(f, 1), n2 = ext(f, 2);
    double vol = 1.0;
    for (int k = 0; k < f.dim; ++k) vol *= f.length(k);

    // radial factor: tabulate over integer |m|^2 when all axes agree
    bool uni = uniform_axes(f);
    std::unordered_map<long, double> radial;
    double k0 = 2.0 * M_PI / f.length(0);
    auto rad = [&](int m0, int m1, int m2) -> double {
        if (uni) {
            long key = static_cast<long>(m0) * m0 + static_cast<long>(m1) * m1 + static_cast<long>(m2) * m2;
            auto it = radial.find(key);
            if (it != radial.end()) return it->second;
            double v = ball_transform(f.dim, k0 * std::sqrt(static_cast<double>(key)), b.radius);
            radial.emplace(key, v);
            return v;
        }
        double kk = 0.0;
        int ms[3] = {m0, m1, m2};
        for (int k = 0; k < f.dim; ++k) {
            double w = 2.0 * M_PI * ms[k] / f.length(k);
            kk += w * w;
        }
        return ball_transform(f.dim, std::sqrt(kk), b.radius);
    };

    double acc = 0.0;
    std::size_t idx = 0;
    for (int a = 0; a < n0; ++a) {
        int m0 = a - n0 / 2;
        for (int c = 0; c < n1; ++c) {
            int m1 = f.dim > 1 ? c - n1 / 2 : 0;
            cplx p01 = ph[0][a] * ph[1][c];
            double row = 0.0;
            for (int e = 0; e < n2; ++e, ++idx) {
                int m2 = f.dim > 2 ? e - n2 / 2 : 0;
                cplx z = f.spectrum[idx] * p01 * ph[2][e];
                row += z.real() * rad(m0, m1, m2);
            }
            acc += row;
        }
    }
    return acc / vol;
}

double integrate_box_spectral(const DensityField& f, const geom::Box& b) {
    if (f.spectrum.size() != f.size()) throw std::logic_error("density spectrum not computed");
    std::array<std::vector<cplx>, 3> tab;
    double vol = 1.0;
    for (int k = 0; k < 3; ++k) {
        int n = ext(f, k);
        tab[k].assign(n, cplx(1.0, 0.0));
        if (k >= f.dim) continue;
        vol *= f.length(k);
        double wlo = f.origin[k] - 0.5 * f.length(k), whi = f.origin[k] + 0.5 * f.length(k);
        double lo = std::max(b.lo[k], wlo), hi = std::min(b.hi[k], whi);
        if (!(hi > lo)) return 0.0;
        lo -= f.origin[k];
        hi -= f.origin[k];
        for (int m = 0; m < n; ++m) {
            double w = wavenumber(f, k, m);
            if (m == n / 2)
                tab[k][m] = hi - lo;
            else
                tab[k][m] = (std::polar(1.0, w * hi) - std::polar(1.0, w * lo)) / cplx(0.0, w);
        }
    }
    int n0 = ext(f, 0), n1 = ext(f, 1), n2 = ext(f, 2);
    double acc = 0.0;
    std::size_t idx = 0;
    for (int a = 0; a < n0; ++a)
        for (int c = 0; c < n1; ++c) {
            cplx p01 = tab[0][a] * tab[1][c];
            for (int e = 0; e < n2; ++e, ++idx) acc += (f.spectrum[idx] * p01 * tab[2][e]).real();
        }
    return acc / vol;
}

double integrate_subsampled(const DensityField& f, const Region& r, int stride) {
    int n[3] = {ext(f, 0), ext(f, 1), ext(f, 2)};
    int m[3];
    for (int k = 0; k < 3; ++k) m[k] = k < f.dim ? n[k] / stride : 1;
    std::size_t count = static_cast<std::size_t>(m[0]) * m[1] * m[2];
    std::vector<char> inside(count);
    auto sample_point = [&](int a, int b, int c) {
        int j[3] = {a * stride, b * stride, c * stride};
        Vec3 y{};
        for (int k = 0; k < f.dim; ++k) y[k] = f.origin[k] + (j[k] - f.shape[k] / 2) * f.h[k];
        return y;
    };
    auto flat = [&](int a, int b, int c) { return (static_cast<std::size_t>(a) * m[1] + b) * m[2] + c; };
    for (int a = 0; a < m[0]; ++a)
        for (int b = 0; b < m[1]; ++b)
            for (int c = 0; c < m[2]; ++c) inside[flat(a, b, c)] = r.contains(sample_point(a, b, c)) ? 1 : 0;

    double hc[3];
    for (int k = 0; k < 3; ++k) hc[k] = k < f.dim ? f.h[k] * stride : 0.0;
    int nsub = 1 << f.dim;
    double acc = 0.0;
    for (int a = 0; a < m[0]; ++a)
        for (int b = 0; b < m[1]; ++b)
            for (int c = 0; c < m[2]; ++c) {
                char in = inside[flat(a, b, c)];
                bool boundary = false;
                int idx3[3] = {a, b, c};
                for (int k = 0; k < f.dim && !boundary; ++k)
                    for (int s : {-1, 1}) {
                        int q[3] = {a, b, c};
                        q[k] = (idx3[k] + s + m[k]) % m[k];
                        if (inside[flat(q[0], q[1], q[2])] != in) {
                            boundary = true;
                            break;
                        }
                    }
                std::size_t src = (static_cast<std::size_t>(a * stride) * n[1] + b * (f.dim > 1 ? stride : 0)) * n[2] +
                                  c * (f.dim > 2 ? stride : 0);
                double g = f.values[src];
                if (!boundary) {
                    if (in) acc += g;
                    continue;
                }
                Vec3 y = sample_point(a, b, c);
                int hits = 0;
                for (int s = 0; s < nsub; ++s) {
                    Vec3 z = y;
                    for (int k = 0; k < f.dim; ++k) z[k] += ((s >> k) & 1 ? 0.25 : -0.25) * hc[k];
                    if (r.contains(z)) ++hits;
                }
                acc += g * hits / nsub;
            }
    double cell = 1.0;
    for (int k = 0; k < f.dim; ++k) cell *= hc[k];
    return acc * cell;
}

double integrate_lattice(const DensityField& f, const Region& r) {
    int s = f.lattice_stride;
    if (s < 1) throw std::invalid_argument("density samples do not contain a base lattice");
    int n[3] = {ext(f, 0), ext(f, 1), ext(f, 2)};
    double acc = 0.0;
    for (int a = 0; a < n[0]; a += s)
        for (int b = 0; b < n[1]; b += (f.dim > 1 ? s : 1))
            for (int c = 0; c < n[2]; c += (f.dim > 2 ? s : 1)) {
                int j[3] = {a, b, c};
                Vec3 y{};
                for (int k = 0; k < f.dim; ++k) y[k] = f.origin[k] + (j[k] - f.shape[k] / 2) * f.h[k];
                if (r.contains(y)) acc += f.values[(static_cast<std::size_t>(a) * n[1] + b) * n[2] + c];
            }
    double cell = 1.0;
    for (int k = 0; k < f.dim; ++k) cell *= f.h[k] * s;
    return acc * cell;
}

namespace {

bool disjoint_analytic(const Region& a, const Region& b) {
    auto* ba = a.ball();
    auto* bb = b.ball();
    auto* xa = std::get_if<geom::Box>(&a.v);
    auto* xb = std::get_if<geom::Box>(&b.v);
    if (ba && bb) return geom::norm(geom::sub(ba->center, bb->center)) >= ba->radius + bb->radius;
    if (ba && xb) return b.distance(ba->center) >= ba->radius;
    if (xa && bb) return a.distance(bb->center) >= bb->radius;
    if (xa && xb) {
        for (int k = 0; k < 3; ++k)
            if (xa->hi[k] <= xb->lo[k] || xb->hi[k] <= xa->lo[k]) return true;
        return false;
    }
    return false;
}

// exact evaluation when the region reduces to balls and boxes; returns false otherwise
// 1-d pieces of balls, boxes and their unions as [a, b) intervals on the x axis
bool collect_intervals(const Region& r, std::vector<std::pair<double, double>>& iv) {
    if (auto* b = r.ball()) {
        double h2 = b->radius * b->radius - b->center[1] * b->center[1] - b->center[2] * b->center[2];
        if (h2 > 0.0) iv.push_back({b->center[0] - std::sqrt(h2), b->center[0] + std::sqrt(h2)});
        return true;
    }
    if (auto* x = std::get_if<geom::Box>(&r.v)) {
        for (int k = 1; k < 3; ++k)
            if (!(x->lo[k] <= 0.0 && 0.0 < x->hi[k])) return true;
        if (x->lo[0] < x->hi[0]) iv.push_back({x->lo[0], x->hi[0]});
        return true;
    }
    if (auto* u = std::get_if<geom::Union>(&r.v)) {
        for (const auto& p : u->parts)
            if (!collect_intervals(p, iv)) return false;
        return true;
    }
    return false;
}

bool spectral_value(const DensityField& f, const Region& r, double& out) {
    if (std::holds_alternative<geom::Whole>(r.v)) {
        out = f.total;
        return true;
    }
    if (auto* b = r.ball()) {
        out = integrate_ball_spectral(f, *b);
        return true;
    }
    if (auto* x = std::get_if<geom::Box>(&r.v)) {
        out = integrate_box_spectral(f, *x);
        return true;
    }
    if (auto* h = std::get_if<geom::HalfSpace>(&r.v)) {
        int axis = -1;
        double nn = geom::norm(h->normal);
        for (int k = 0; k < 3; ++k)
            if (std::abs(std::abs(h->normal[k]) - nn) < 1e-15 * nn) axis = k;
        if (axis < 0 || axis >= f.dim) return false;
        geom::Box bx{{-kUnbounded, -kUnbounded, -kUnbounded}, {kUnbounded, kUnbounded, kUnbounded}};
        if (h->normal[axis] > 0)
            bx.lo[axis] = h->offset / nn;
        else
            bx.hi[axis] = -h->offset / nn;
        out = integrate_box_spectral(f, bx);
        return true;
    }
    if (auto* c = std::get_if<geom::Complement>(&r.v)) {
        double inner = 0.0;
        if (!spectral_value(f, *c->inner, inner)) return false;
        out = f.total - inner;
        return true;
    }
    if (auto* m = std::get_if<geom::Mapped>(&r.v)) {
        if (auto* b = m->inner->ball()) {
            geom::Vec3 c{};
            for (int i = 0; i < 3; ++i)
                c[i] = m->rot[i][0] * b->center[0] + m->rot[i][1] * b->center[1] + m->rot[i][2] * b->center[2] +
                       m->shift[i];
            out = integrate_ball_spectral(f, geom::Ball{c, b->radius});
            return true;
        }
        return false;
    }
    if (auto* u = std::get_if<geom::Union>(&r.v)) {
        std::vector<std::pair<double, double>> iv;
        if (f.dim == 1 && collect_intervals(r, iv)) {
            std::sort(iv.begin(), iv.end());
            double s = 0.0;
            for (std::size_t i = 0; i < iv.size();) {
                double a = iv[i].first, b = iv[i].second;
                std::size_t j = i + 1;
                while (j < iv.size() && iv[j].first <= b) b = std::max(b, iv[j++].second);
                s += integrate_box_spectral(f, geom::Box::interval(a, b));
                i = j;
            }
            out = s;
            return true;
        }
        for (std::size_t i = 0; i < u->parts.size(); ++i)
            for (std::size_t j = i + 1; j < u->parts.size(); ++j)
                if (!disjoint_analytic(u->parts[i], u->parts[j])) return false;
        double s = 0.0;
        for (const auto& p : u->parts) {
            double v = 0.0;
            if (!spectral_value(f, p, v)) return false;
            s += v;
        }
        out = s;
        return true;
    }
    if (auto* cs = std::get_if<geom::ConeSection>(&r.v)) {
        // analytic whenever the section collapses to a ball
        Region e = geom::cone_expand(*cs->source, cs->source_slice, cs->target);
        if (!std::holds_alternative<geom::ConeSection>(e.v)) return spectral_value(f, e, out);
        return false;
    }
    return false;
}

}  // namespace

IntegralValue integrate(const DensityField& f, const Region& r, Quadrature q) {
    IntegralValue res;
    double base_err = f.roundoff() + f.edge_mass + f.extra_err;
    double smooth = 0.0;
    bool exact = spectral_value(f, r, smooth);
    double smooth_err = base_err;
    if (!exact) {
        int s = 1;
        double fine = integrate_subsampled(f, r, s);
        double coarse = integrate_subsampled(f, r, 2 * s);
        smooth = fine;
        smooth_err += std::abs(fine - coarse);
        res.method = "subsampled";
    } else {
        res.method = "spectral";
    }
    if (q == Quadrature::Smooth) {
        res.value = smooth;
        res.err = smooth_err;
        return res;
    }
    double lat = integrate_lattice(f, r);
    res.value = lat;
    res.err = std::abs(lat - smooth) + smooth_err;
    res.method = "lattice";
    return res;
}

}  // namespace kgloc::quad
