#include "kgloc/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kgloc/log.hpp"
#include "kgloc/wavefields.hpp"

namespace kgloc::mom {

MomentumGrid::MomentumGrid(int dim, int n, double p_max, double mass) : dim_(dim), n_(n), p_max_(p_max), mass_(mass) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be 1, 2 or 3");
    if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size must be a power of two >= 8");
    if (!(p_max > 0.0)) throw std::invalid_argument("p_max must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    size_ = 1;
    for (int k = 0; k < dim; ++k) size_ *= static_cast<std::size_t>(n);
    auto E = std::make_shared<std::vector<double>>(size_);
    for (std::size_t idx = 0; idx < size_; ++idx) (*E)[idx] = mom::energy(momentum(idx), mass_);
    E_ = E;
}

double MomentumGrid::cell() const { return std::pow(dp(), dim_); }

fft::Shape MomentumGrid::shape(int pad) const {
    int m = pad * n_;
    return {m, dim_ > 1 ? m : 1, dim_ > 2 ? m : 1};
}

void MomentumGrid::unravel(std::size_t idx, int* i) const {
    i[0] = i[1] = i[2] = 0;
    for (int k = dim_ - 1; k >= 0; --k) {
        i[k] = static_cast<int>(idx % n_);
        idx /= n_;
    }
}

Vec3 MomentumGrid::momentum(std::size_t idx) const {
    int i[3];
    unravel(idx, i);
    Vec3 p{};
    for (int k = 0; k < dim_; ++k) p[k] = coord(i[k]);
    return p;
}

bool MomentumGrid::same_as(const MomentumGrid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && p_max_ == o.p_max_ && mass_ == o.mass_;
}

std::string MomentumGrid::describe() const {
    std::ostringstream s;
    s << "d=" << dim_ << " n=" << n_ << " p_max=" << p_max_ << " m=" << mass_;
    return s.str();
}

double energy(const Vec3& p, double mass) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + mass * mass); }

double MassShellState::norm2() const {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::norm(psi[i]) / grid.energy(i);
    return s * grid.cell();
}

namespace {
// distance in index units from the nearest grid face
int face_distance(const MomentumGrid& g, std::size_t idx) {
    int i[3];
    g.unravel(idx, i);
    int d = g.n();
    for (int k = 0; k < g.dim(); ++k) d = std::min({d, i[k], g.n() - 1 - i[k]});
    return d;
}
}  // namespace

double MassShellState::edge_ratio() const {
    double mx = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double a = std::abs(psi[i]);
        mx = std::max(mx, a);
        if (face_distance(grid, i) == 0) edge = std::max(edge, a);
    }
    return mx > 0.0 ? edge / mx : 0.0;
}

double MassShellState::edge_mass() const {
    double tot = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double w = std::norm(psi[i]) / grid.energy(i);
        tot += w;
        if (face_distance(grid, i) <= 1) edge += w;
    }
    return tot > 0.0 ? edge / tot : 0.0;
}

MassShellState MassShellState::scaled(cplx a) const {
    MassShellState r = *this;
    for (auto& z : r.psi) z *= a;
    return r;
}

MassShellState MassShellState::normalized() const {
    double n = norm2();
    if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero state");
    return scaled(1.0 / std::sqrt(n));
}

cplx Multiplier::value(const MomentumGrid& g, std::size_t idx) const {
    double E = g.energy(idx);
    switch (kind) {
        case Kind::Energy: return E;
        case Kind::InvEnergy: return 1.0 / E;
        case Kind::MomOverEnergy: return g.momentum(idx)[axis] / E;
        case Kind::MassOverEnergy: return g.mass() / E;
        case Kind::EvolvePhase: return std::polar(1.0, tau * E);
        case Kind::TranslatePhase: {
            Vec3 p = g.momentum(idx);
            return std::polar(1.0, E * a[0] - p[0] * a[1] - p[1] * a[2] - p[2] * a[3]);
        }
        case Kind::SqrtEnergy: return std::sqrt(E);
        case Kind::InvSqrtEnergy: return 1.0 / std::sqrt(E);
        case Kind::Momentum: return g.momentum(idx)[axis];
    }
    return 1.0;
}

namespace {
void require_same(const MassShellState& a, const MassShellState& b) {
    if (!a.grid.same_as(b.grid)) throw std::invalid_argument("states live on different grids");
    if (!a.native.same_as(b.native)) throw std::invalid_argument("states have different native frames");
}
}  // namespace

cplx inner_product(const MassShellState& a, const MassShellState& b) {
    require_same(a, b);
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.psi.size(); ++i) s += std::conj(a.psi[i]) * b.psi[i] / a.grid.energy(i);
    return s * a.grid.cell();
}

MassShellState apply_multiplier(const MassShellState& psi, const Multiplier& m) {
    MassShellState r = psi;
    for (std::size_t i = 0; i < r.psi.size(); ++i) r.psi[i] *= m.value(psi.grid, i);
    return r;
}

double expectation(const MassShellState& psi, const Multiplier& m) {
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < psi.psi.size(); ++i) {
        double w = std::norm(psi.psi[i]) / psi.grid.energy(i);
        num += w * m.value(psi.grid, i);
        den += w;
    }
    return den > 0.0 ? num.real() / den : 0.0;
}

// ------------------------------------------------------------ Poincare action

namespace {

bool near(double a, double b, double tol = 1e-13) { return std::abs(a - b) <= tol; }

// spatial signed permutation acting within the first d axes, or false
bool signed_permutation(const geom::Mat4& L, int d, int perm[3], int sign[3]) {
    if (!near(L[0][0], 1.0)) return false;
    for (int k = 1; k < 4; ++k)
        if (!near(L[0][k], 0.0) || !near(L[k][0], 0.0)) return false;
    for (int r = 0; r < 3; ++r) {
        int hits = 0;
        for (int c = 0; c < 3; ++c) {
            double v = L[r + 1][c + 1];
            if (near(v, 0.0)) continue;
            if (near(std::abs(v), 1.0)) {
                perm[r] = c;
                sign[r] = v > 0 ? 1 : -1;
                ++hits;
            } else {
                return false;
            }
        }
        if (hits != 1) return false;
        if (r >= d && (perm[r] != r || sign[r] != 1)) return false;
        if (r < d && perm[r] >= d) return false;
    }
    return true;
}

// trigonometric 2x refinement of the momentum samples (zero padding of the position transform)
std::vector<cplx> upsample2(const MomentumGrid& g, const std::vector<cplx>& psi) {
    const int d = g.dim(), n = g.n();
    fft::Shape s1 = g.shape(1), s2 = g.shape(2);
    fft::CVec a(psi.begin(), psi.end());
    fft::centered_dft(d, s1, a.data(), +1);
    fft::CVec b(fft::volume(s2), cplx(0.0, 0.0));
    const int off = n / 2;
    int i[3];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        g.unravel(idx, i);
        std::size_t t = 0;
        for (int k = 0; k < 3; ++k) t = t * s2[k] + (k < d ? i[k] + off : 0);
        b[t] = a[idx];
    }
    fft::centered_dft(d, s2, b.data(), -1);
    double sc = std::pow(static_cast<double>(n), -d);
    std::vector<cplx> out(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out[k] = b[k] * sc;
    return out;
}

void lagrange4(double s, double w[4]) {
    // nodes at -1, 0, 1, 2 relative to floor
    double a = s + 1.0, b = s, c = s - 1.0, e = s - 2.0;
    w[0] = -b * c * e / 6.0;
    w[1] = a * c * e / 2.0;
    w[2] = -a * b * e / 2.0;
    w[3] = a * b * c / 6.0;
}

MassShellState resample(const MassShellState& psi, const geom::PoincareTransform& h, bool upsample) {
    const auto& g = psi.grid;
    const int d = g.dim();
    const int m = upsample ? 2 * g.n() : g.n();
    const double hh = upsample ? 0.5 * g.dp() : g.dp();
    const double lo = -g.p_max();
    std::vector<cplx> fine = upsample ? upsample2(g, psi.psi) : psi.psi;
    geom::Mat4 Li = h.inverse().lambda;

    MassShellState r(g);
    r.native = psi.native;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        Vec3 p = g.momentum(idx);
        double E = g.energy(idx);
        geom::FourVector P{E, p[0], p[1], p[2]};
        geom::FourVector q = geom::apply(Li, P);
        int base[3] = {0, 0, 0};
        double w[3][4];
        bool outside = false;
        for (int k = 0; k < d; ++k) {
            double s = (q[k + 1] - lo) / hh;
            double f = std::floor(s);
            base[k] = static_cast<int>(f);
            if (base[k] < -2 || base[k] > m) {
                outside = true;
                break;
            }
            lagrange4(s - f, w[k]);
        }
        if (outside) continue;
        cplx v(0.0, 0.0);
        int r0 = d > 0 ? 4 : 1, r1 = d > 1 ? 4 : 1, r2 = d > 2 ? 4 : 1;
        for (int a = 0; a < r0; ++a) {
            int ia = base[0] - 1 + a;
            if (ia < 0 || ia >= m) continue;
            for (int b = 0; b < r1; ++b) {
                int ib = d > 1 ? base[1] - 1 + b : 0;
                if (ib < 0 || ib >= m) continue;
                for (int c = 0; c < r2; ++c) {
                    int ic = d > 2 ? base[2] - 1 + c : 0;
                    if (ic < 0 || ic >= m) continue;
                    double ww = w[0][a] * (d > 1 ? w[1][b] : 1.0) * (d > 2 ? w[2][c] : 1.0);
                    std::size_t f = (static_cast<std::size_t>(ia) * (d > 1 ? m : 1) + ib) * (d > 2 ? m : 1) + ic;
                    v += ww * fine[f];
                }
            }
        }
        r.psi[idx] = v * std::polar(1.0, -geom::minkowski_dot(P, h.a));
    }
    return r;
}

// Lambda^-1 acts only in the (t, axis) plane, with axis < d
int boost_axis(const geom::Mat4& Li, int d) {
    int found = -1;
    for (int a = 0; a < 3; ++a) {
        bool plane = true;
        for (int k = 0; k < 3 && plane; ++k) {
            if (k == a) continue;
            for (int j = 0; j < 4; ++j) {
                double want = (j == k + 1) ? 1.0 : 0.0;
                if (!near(Li[k + 1][j], want) || !near(Li[j][k + 1], want)) plane = false;
            }
        }
        if (plane) {
            found = a;
            break;
        }
    }
    return found >= 0 && found < d ? found : -1;
}

// Trigonometric interpolation along one axis: the source value at q_a is the band-limited
// interpolant of the line, evaluated by a direct sum over its position transform.
MassShellState resample_axis(const MassShellState& psi, const geom::PoincareTransform& h, int axis) {
    const auto& g = psi.grid;
    const int d = g.dim(), n = g.n();
    geom::Mat4 Li = h.inverse().lambda;
    MassShellState r(g);
    r.native = psi.native;
    std::size_t stride = 1;
    for (int k = d - 1; k > axis; --k) stride *= n;
    fft::Shape line{n, 1, 1};
    fft::CVec G(n);
    const double dx = g.dx();
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = g.position(j);
    int i[3];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        g.unravel(idx, i);
        if (i[axis] != 0) continue;  // one pass per line
        for (int j = 0; j < n; ++j) G[j] = psi.psi[idx + j * stride];
        fft::centered_dft(1, line, G.data(), +1);
        for (int j = 0; j < n; ++j) {
            std::size_t t = idx + j * stride;
            Vec3 p = g.momentum(t);
            double E = g.energy(t);
            geom::FourVector P{E, p[0], p[1], p[2]};
            double qa = Li[axis + 1][0] * E + Li[axis + 1][axis + 1] * p[axis];
            cplx v(0.0, 0.0);
            if (std::abs(qa) < g.p_max()) {
                cplx z = std::polar(1.0, -qa * x[0]);
                const cplx step = std::polar(1.0, -qa * dx);
                for (int m = 0; m < n; ++m) {
                    v += G[m] * z;
                    z *= step;
                }
                v /= static_cast<double>(n);
            }
            r.psi[t] = v * std::polar(1.0, -geom::minkowski_dot(P, h.a));
        }
    }
    return r;
}

MassShellState resample_any(const MassShellState& psi, const geom::PoincareTransform& h, bool upsample) {
    int a = boost_axis(h.inverse().lambda, psi.grid.dim());
    if (a >= 0) return resample_axis(psi, h, a);
    return resample(psi, h, upsample);
}

}  // namespace

MassShellState apply_poincare_state(const MassShellState& psi, const geom::PoincareTransform& h,
                                    const ResampleOptions& opt) {
    h.validate();
    const auto& g = psi.grid;
    const int d = g.dim(), n = g.n();
    int perm[3], sign[3];
    if (signed_permutation(h.lambda, d, perm, sign)) {
        // (Lambda^-1 p)_c = sum_r L[r][c] p_r, so component perm[r] of the source is sign[r] p_r
        MassShellState r(g);
        r.native = psi.native;
        r.resample_err = psi.resample_err;
        int i[3], j[3];
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            g.unravel(idx, i);
            j[0] = j[1] = j[2] = 0;
            for (int k = 0; k < d; ++k) {
                int c = i[k] - n / 2;
                int src = sign[k] * c + n / 2;
                j[perm[k]] = ((src % n) + n) % n;
            }
            std::size_t s = 0;
            for (int k = 0; k < d; ++k) s = s * n + j[k];
            Vec3 p = g.momentum(idx);
            geom::FourVector P{g.energy(idx), p[0], p[1], p[2]};
            r.psi[idx] = psi.psi[s] * std::polar(1.0, -geom::minkowski_dot(P, h.a));
        }
        return r;
    }
    MassShellState r = resample_any(psi, h, opt.upsample);
    double e = 0.0;
    if (opt.estimate_error) {
        MassShellState back = resample_any(r, h.inverse(), opt.upsample);
        double num = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) num += std::norm(back.psi[i] - psi.psi[i]) / g.energy(i);
        num *= g.cell();
        double den = psi.norm2();
        e = den > 0.0 ? std::sqrt(num / den) : 0.0;
    }
    r.resample_err = psi.resample_err + e;
    return r;
}

// --------------------------------------------------------------- constructors

MassShellState make_gaussian(const Vec3& p0, double sigma, const MomentumGrid& grid, const Vec3& x0) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    MassShellState s(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec3 p = grid.momentum(idx);
        double r2 = 0.0, ph = 0.0;
        for (int k = 0; k < grid.dim(); ++k) {
            r2 += (p[k] - p0[k]) * (p[k] - p0[k]);
            ph -= p[k] * x0[k];
        }
        s.psi[idx] = std::polar(std::exp(-r2 / (4.0 * sigma * sigma)), ph);
    }
    double bm = s.edge_mass();
    if (bm > 1e-6) {
        std::ostringstream m;
        m << "gaussian support overflows the grid (boundary mass " << bm << ")";
        throw std::invalid_argument(m.str());
    }
    if (s.edge_ratio() > 1e-8) warn("gaussian amplitude at the grid boundary above 1e-8 of its peak");
    double xr = 0.0;
    for (int k = 0; k < grid.dim(); ++k) xr = std::max(xr, std::abs(x0[k]));
    double D = 0.5 * grid.length() - xr;
    if (D <= 0.0 || std::exp(-sigma * sigma * D * D) > 1e-6) warn("gaussian position tail reaches the half-box");
    double pk = 0.0;
    for (int k = 0; k < grid.dim(); ++k) pk = std::max(pk, std::abs(p0[k]) + 3.0 * sigma);
    if (!grid.aliasing_ok(pk)) {
        std::ostringstream m;
        m << "p_max below 6*(m + k) = " << 6.0 * (grid.mass() + pk) << " for " << grid.describe();
        warn(m.str());
    }
    return s.normalized();
}

double SpatialProfile::value(const Vec3& x) const {
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
    if (kind == Kind::Gaussian) return std::exp(-r2 / (2.0 * radius * radius));
    double u = r2 / (radius * radius);
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
}

Vec3 lattice_point(const MomentumGrid& g, std::size_t flat_idx, int pad) {
    fft::Shape sh = g.shape(pad);
    int i[3] = {0, 0, 0};
    for (int k = 2; k >= 0; --k) {
        i[k] = static_cast<int>(flat_idx % sh[k]);
        flat_idx /= sh[k];
    }
    Vec3 x{};
    for (int k = 0; k < g.dim(); ++k) x[k] = g.position(i[k], pad);
    return x;
}

MassShellState make_profile_state(const SpatialProfile& chi, const Vec3& k, const MomentumGrid& grid) {
    std::vector<cplx> F(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec3 x = lattice_point(grid, idx);
        double ph = 0.0;
        for (int a = 0; a < grid.dim(); ++a) ph += k[a] * x[a];
        F[idx] = std::polar(chi.value(x), ph);
    }
    std::vector<cplx> c = wave::to_momentum(grid, F.data());
    MassShellState s(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) s.psi[idx] = std::sqrt(grid.energy(idx)) * c[idx];
    if (!(s.norm2() > 0.0)) throw std::invalid_argument("profile vanishes on the lattice");
    double em = s.edge_mass();
    if (em > 1e-3) throw std::invalid_argument("shifted profile overflows the momentum grid");
    if (s.edge_ratio() > 1e-8) warn("profile state amplitude at the momentum boundary above 1e-8 of its peak");
    return s.normalized();
}

MassShellState almost_localized_sequence(const SpatialProfile& chi, const Vec3& a, int j, const MomentumGrid& grid) {
    if (geom::norm(a) == 0.0) throw std::invalid_argument("almost-localized shift vector must be nonzero");
    // sqrt(E) chi_hat(p - j a) is the state whose t=0 NW amplitude is chi(x) exp(i j a.x)
    return make_profile_state(chi, geom::scale(a, j), grid);
}

MassShellState nw_project(const MassShellState& psi, const geom::Region& region, const geom::SliceRef& slice) {
    if (!slice.frame.same_as(psi.native, 1e-12))
        throw std::invalid_argument("nw_project needs the slice frame to be the native frame");
    const auto& g = psi.grid;
    const double t = slice.time;
    wave::CVec F = wave::weighted_field(
        psi, t, [](std::size_t, double E, const geom::Vec3&) { return cplx(1.0 / std::sqrt(E), 0.0); }, 1);
    for (std::size_t idx = 0; idx < g.size(); ++idx)
        if (!region.contains(lattice_point(g, idx))) F[idx] = 0.0;
    std::vector<cplx> c = wave::to_momentum(g, F.data());
    MassShellState r(g);
    r.native = psi.native;
    r.resample_err = psi.resample_err;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double E = g.energy(idx);
        r.psi[idx] = c[idx] * std::sqrt(E) * std::polar(1.0, E * t);
    }
    if (std::sqrt(r.norm2()) < 1e-10) throw std::invalid_argument("projection annihilates the state");
    return r.normalized();
}

}  // namespace kgloc::mom
