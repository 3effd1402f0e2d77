#include "kgloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kgloc::geom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnbounded = 1e300;
}  // namespace

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double minkowski_dot(const FourVector& u, const FourVector& v) {
    return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
}

const char* to_string(CausalClass c) {
    switch (c) {
        case CausalClass::Zero: return "zero";
        case CausalClass::TimelikeFuture: return "timelike-future";
        case CausalClass::TimelikePast: return "timelike-past";
        case CausalClass::NullFuture: return "null-future";
        case CausalClass::NullPast: return "null-past";
        case CausalClass::Spacelike: return "spacelike";
    }
    return "?";
}

CausalClass classify_causal(const FourVector& v, double tau_c, double scale) {
    if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0 && v[3] == 0.0) return CausalClass::Zero;
    double g = minkowski_dot(v, v);
    double band = tau_c * scale * scale;
    if (g > band) return CausalClass::Spacelike;
    bool future = v[0] > 0.0;
    if (g < -band) return future ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
    // inside the null band; a vanishing time component there means the vector is tiny
    if (v[0] == 0.0) return CausalClass::Spacelike;
    return future ? CausalClass::NullFuture : CausalClass::NullPast;
}

Frame Frame::from_velocity(const Vec3& v) {
    double v2 = dot3(v, v);
    if (!(v2 < 1.0)) throw std::invalid_argument("frame velocity must satisfy |v| < 1");
    double g = 1.0 / std::sqrt(1.0 - v2);
    return Frame{{g, g * v[0], g * v[1], g * v[2]}};
}

Vec3 Frame::velocity() const { return {n[1] / n[0], n[2] / n[0], n[3] / n[0]}; }

void Frame::validate(double tol) const {
    if (std::abs(minkowski_dot(n, n) + 1.0) > tol * std::max(1.0, n[0] * n[0]))
        throw std::invalid_argument("frame vector is not unit timelike");
    if (!(n[0] > 0.0)) throw std::invalid_argument("frame vector is not future directed");
}

bool Frame::same_as(const Frame& o, double tol) const {
    for (int i = 0; i < 4; ++i)
        if (std::abs(n[i] - o.n[i]) > tol * std::max(1.0, std::abs(n[0]))) return false;
    return true;
}

Mat4 identity4() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 c{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
            c[i][j] = s;
        }
    return c;
}

FourVector apply(const Mat4& m, const FourVector& v) {
    FourVector r{};
    for (int i = 0; i < 4; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
    return r;
}

Mat4 transpose(const Mat4& m) {
    Mat4 t{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t[i][j] = m[j][i];
    return t;
}

namespace {
// Lorentz inverse: eta L^T eta
Mat4 lorentz_inverse(const Mat4& l) {
    Mat4 r = transpose(l);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if ((i == 0) != (j == 0)) r[i][j] = -r[i][j];
    return r;
}
}  // namespace

PoincareTransform PoincareTransform::translation(const FourVector& a) {
    PoincareTransform h;
    h.a = a;
    return h;
}

PoincareTransform PoincareTransform::boost(const Vec3& v) {
    // passive: coordinates seen from a frame moving with velocity v
    Frame f = Frame::from_velocity(scale(v, -1.0));
    PoincareTransform h;
    h.lambda = frame_boost(f);
    return h;
}

PoincareTransform PoincareTransform::rotation(const Vec3& axis, double angle) {
    double len = norm(axis);
    if (len == 0.0) throw std::invalid_argument("rotation axis is zero");
    Vec3 k = scale(axis, 1.0 / len);
    double c = std::cos(angle), s = std::sin(angle), C = 1.0 - c;
    PoincareTransform h;
    double r[3][3] = {{c + k[0] * k[0] * C, k[0] * k[1] * C - k[2] * s, k[0] * k[2] * C + k[1] * s},
                      {k[1] * k[0] * C + k[2] * s, c + k[1] * k[1] * C, k[1] * k[2] * C - k[0] * s},
                      {k[2] * k[0] * C - k[1] * s, k[2] * k[1] * C + k[0] * s, c + k[2] * k[2] * C}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h.lambda[i + 1][j + 1] = r[i][j];
    return h;
}

PoincareTransform PoincareTransform::quarter_turn(int from, int to) {
    if (from < 0 || from > 2 || to < 0 || to > 2 || from == to)
        throw std::invalid_argument("quarter_turn needs two distinct spatial axes");
    PoincareTransform h;
    h.lambda[from + 1][from + 1] = 0.0;
    h.lambda[to + 1][to + 1] = 0.0;
    h.lambda[to + 1][from + 1] = 1.0;   // e_from -> e_to
    h.lambda[from + 1][to + 1] = -1.0;  // e_to -> -e_from
    return h;
}

PoincareTransform PoincareTransform::inverse() const {
    PoincareTransform h;
    h.lambda = lorentz_inverse(lambda);
    FourVector ia = geom::apply(h.lambda, a);
    for (int i = 0; i < 4; ++i) h.a[i] = -ia[i];
    return h;
}

void PoincareTransform::validate(double tol) const {
    Mat4 inv = lorentz_inverse(lambda);
    Mat4 p = matmul(inv, lambda);
    double scale = 1.0;
    for (auto& row : lambda)
        for (double x : row) scale = std::max(scale, std::abs(x));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(p[i][j] - (i == j ? 1.0 : 0.0)) > tol * scale * scale)
                throw std::invalid_argument("transform is not a Lorentz matrix");
    if (!(lambda[0][0] > 0.0)) throw std::invalid_argument("transform is not orthochronous");
}

bool PoincareTransform::is_pure_translation(double tol) const {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(lambda[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
    return true;
}

PoincareTransform compose(const PoincareTransform& h1, const PoincareTransform& h2) {
    PoincareTransform h;
    h.lambda = matmul(h1.lambda, h2.lambda);
    FourVector la = geom::apply(h1.lambda, h2.a);
    for (int i = 0; i < 4; ++i) h.a[i] = h1.a[i] + la[i];
    return h;
}

FourVector apply_poincare_event(const PoincareTransform& h, const FourVector& e) {
    FourVector r = geom::apply(h.lambda, e);
    for (int i = 0; i < 4; ++i) r[i] += h.a[i];
    return r;
}

SliceRef transformed_slice(const PoincareTransform& h, const SliceRef& s) {
    FourVector ln = geom::apply(h.lambda, s.frame.n);
    // t_h = -(h e)·(Lambda n) for any e on the slice; evaluate on two events and keep the first
    SliceRef out{Frame{ln}, 0.0};
    FourVector e1 = slice_event(s, {0.0, 0.0, 0.0});
    FourVector e2 = slice_event(s, {1.0, -2.0, 0.5});
    double t1 = -minkowski_dot(apply_poincare_event(h, e1), ln);
    double t2 = -minkowski_dot(apply_poincare_event(h, e2), ln);
    if (std::abs(t1 - t2) > 1e-9 * (1.0 + std::abs(t1)))
        throw std::logic_error("transformed slice time depends on the representative event");
    out.time = t1;
    return out;
}

Mat4 frame_boost(const Frame& f) {
    const FourVector& n = f.n;
    double g = n[0];
    Mat4 m = identity4();
    m[0][0] = g;
    for (int i = 1; i < 4; ++i) {
        m[0][i] = n[i];
        m[i][0] = n[i];
    }
    double denom = 1.0 + g;
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) m[i][j] += n[i] * n[j] / denom;
    return m;
}

FourVector slice_event(const SliceRef& s, const Vec3& y) {
    if (s.frame.n[0] == 1.0 && s.frame.n[1] == 0.0 && s.frame.n[2] == 0.0 && s.frame.n[3] == 0.0)
        return {s.time, y[0], y[1], y[2]};
    return geom::apply(frame_boost(s.frame), {s.time, y[0], y[1], y[2]});
}

Vec3 slice_coords(const Frame& f, const FourVector& e, double* time_out) {
    FourVector c;
    if (f.n[0] == 1.0 && f.n[1] == 0.0 && f.n[2] == 0.0 && f.n[3] == 0.0)
        c = e;
    else
        c = geom::apply(lorentz_inverse(frame_boost(f)), e);
    if (time_out) *time_out = c[0];
    return {c[1], c[2], c[3]};
}

// ---------------------------------------------------------------- regions

Box Box::interval(double a, double b) { return Box{{a, -kUnbounded, -kUnbounded}, {b, kUnbounded, kUnbounded}}; }

namespace {

Vec3 rot_apply(const Mat3& r, const Vec3& y) {
    return {r[0][0] * y[0] + r[0][1] * y[1] + r[0][2] * y[2], r[1][0] * y[0] + r[1][1] * y[1] + r[1][2] * y[2],
            r[2][0] * y[0] + r[2][1] * y[1] + r[2][2] * y[2]};
}
Vec3 rot_apply_t(const Mat3& r, const Vec3& y) {
    return {r[0][0] * y[0] + r[1][0] * y[1] + r[2][0] * y[2], r[0][1] * y[0] + r[1][1] * y[1] + r[2][1] * y[2],
            r[0][2] * y[0] + r[1][2] * y[1] + r[2][2] * y[2]};
}

double box_signed_distance(const Box& b, const Vec3& y) {
    double out2 = 0.0, inside = kInf;
    bool in = true;
    for (int k = 0; k < 3; ++k) {
        double d = 0.0;
        if (y[k] < b.lo[k]) d = b.lo[k] - y[k];
        else if (y[k] >= b.hi[k]) d = y[k] - b.hi[k];
        if (d > 0.0 || y[k] >= b.hi[k]) in = false;
        out2 += d * d;
        inside = std::min(inside, std::min(y[k] - b.lo[k], b.hi[k] - y[k]));
    }
    if (!in) return std::sqrt(out2);
    return -inside;
}

// causal test between the target point y (on c.target) and the source region
double cone_defect(const ConeSection& c, const Vec3& y) {
    FourVector e = slice_event(c.target, y);
    double ts = 0.0;
    Vec3 ys = slice_coords(c.source_slice.frame, e, &ts);
    return c.source->distance(ys) - std::abs(ts - c.source_slice.time);
}

double cone_sampled_distance(const ConeSection& c, const Vec3& y) {
    // predicate sampling around the bounding ball of the section
    Ball bb = bounding_ball(Region(c));
    if (!std::isfinite(bb.radius)) return c.source->distance(y);
    const int m = 24;
    double best = kInf;
    double h = 2.0 * bb.radius / m;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j)
            for (int k = 0; k <= m; ++k) {
                Vec3 s{bb.center[0] - bb.radius + i * h, bb.center[1] - bb.radius + j * h,
                       bb.center[2] - bb.radius + k * h};
                if (cone_defect(c, s) <= 0.0) best = std::min(best, norm(sub(s, y)));
            }
    return best;
}

}  // namespace

bool Region::contains(const Vec3& y) const {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Whole>) {
                return true;
            } else if constexpr (std::is_same_v<T, Ball>) {
                Vec3 d = sub(y, r.center);
                return dot3(d, d) <= r.radius * r.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                for (int k = 0; k < 3; ++k)
                    if (!(y[k] >= r.lo[k] && y[k] < r.hi[k])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, HalfSpace>) {
                return dot3(r.normal, y) >= r.offset;
            } else if constexpr (std::is_same_v<T, Union>) {
                for (const auto& p : r.parts)
                    if (p.contains(y)) return true;
                return false;
            } else if constexpr (std::is_same_v<T, Complement>) {
                return !r.inner->contains(y);
            } else if constexpr (std::is_same_v<T, Mapped>) {
                return r.inner->contains(rot_apply_t(r.rot, sub(y, r.shift)));
            } else {
                return cone_defect(r, y) <= 0.0;
            }
        },
        v);
}

double Region::signed_distance(const Vec3& y) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Whole>) {
                return -kInf;
            } else if constexpr (std::is_same_v<T, Ball>) {
                return norm(sub(y, r.center)) - r.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                return box_signed_distance(r, y);
            } else if constexpr (std::is_same_v<T, HalfSpace>) {
                return (r.offset - dot3(r.normal, y)) / norm(r.normal);
            } else if constexpr (std::is_same_v<T, Union>) {
                double d = kInf;
                for (const auto& p : r.parts) d = std::min(d, p.signed_distance(y));
                return d;
            } else if constexpr (std::is_same_v<T, Complement>) {
                return -r.inner->signed_distance(y);
            } else if constexpr (std::is_same_v<T, Mapped>) {
                return r.inner->signed_distance(rot_apply_t(r.rot, sub(y, r.shift)));
            } else {
                if (r.source->ball()) {
                    // exact when the section is itself a ball; otherwise sampled
                    Region e = cone_expand(*r.source, r.source_slice, r.target);
                    if (e.ball()) return e.signed_distance(y);
                }
                double def = cone_defect(r, y);
                if (def <= 0.0) return std::min(def, 0.0);
                return cone_sampled_distance(r, y);
            }
        },
        v);
}

double Region::distance(const Vec3& y) const { return std::max(0.0, signed_distance(y)); }

bool Region::empty() const {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return !(r.radius > 0.0);
            } else if constexpr (std::is_same_v<T, Box>) {
                for (int k = 0; k < 3; ++k)
                    if (!(r.hi[k] > r.lo[k])) return true;
                return false;
            } else if constexpr (std::is_same_v<T, Union>) {
                for (const auto& p : r.parts)
                    if (!p.empty()) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Mapped>) {
                return r.inner->empty();
            } else if constexpr (std::is_same_v<T, ConeSection>) {
                return r.source->empty();
            } else {
                return false;
            }
        },
        v);
}

std::string Region::describe() const {
    std::ostringstream os;
    os.precision(6);
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Whole>) {
                os << "whole";
            } else if constexpr (std::is_same_v<T, Ball>) {
                os << "ball(c=" << r.center[0] << "," << r.center[1] << "," << r.center[2] << ";r=" << r.radius
                   << ")";
            } else if constexpr (std::is_same_v<T, Box>) {
                os << "box(";
                for (int k = 0; k < 3; ++k) os << (k ? ";" : "") << r.lo[k] << ".." << r.hi[k];
                os << ")";
            } else if constexpr (std::is_same_v<T, HalfSpace>) {
                os << "halfspace(n=" << r.normal[0] << "," << r.normal[1] << "," << r.normal[2]
                   << ";off=" << r.offset << ")";
            } else if constexpr (std::is_same_v<T, Union>) {
                os << "union[";
                for (size_t i = 0; i < r.parts.size(); ++i) os << (i ? "," : "") << r.parts[i].describe();
                os << "]";
            } else if constexpr (std::is_same_v<T, Complement>) {
                os << "complement(" << r.inner->describe() << ")";
            } else if constexpr (std::is_same_v<T, Mapped>) {
                os << "mapped(" << r.inner->describe() << ")";
            } else {
                os << "cone(" << r.source->describe() << ";t=" << r.source_slice.time << "->" << r.target.time
                   << ")";
            }
        },
        v);
    return os.str();
}

Ball bounding_ball(const Region& reg) {
    return std::visit(
        [&](const auto& r) -> Ball {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return r;
            } else if constexpr (std::is_same_v<T, Box>) {
                Vec3 c{}, h{};
                for (int k = 0; k < 3; ++k) {
                    if (r.lo[k] <= -kUnbounded && r.hi[k] >= kUnbounded) {
                        c[k] = 0.0;
                        h[k] = 0.0;
                        continue;
                    }
                    if (r.lo[k] <= -kUnbounded || r.hi[k] >= kUnbounded) return Ball{{}, kInf};
                    c[k] = 0.5 * (r.lo[k] + r.hi[k]);
                    h[k] = 0.5 * (r.hi[k] - r.lo[k]);
                }
                return Ball{c, norm(h)};
            } else if constexpr (std::is_same_v<T, Union>) {
                if (r.parts.empty()) return Ball{{}, 0.0};
                Ball b = bounding_ball(r.parts[0]);
                for (size_t i = 1; i < r.parts.size(); ++i) {
                    Ball o = bounding_ball(r.parts[i]);
                    if (!std::isfinite(o.radius) || !std::isfinite(b.radius)) return Ball{{}, kInf};
                    double d = norm(sub(o.center, b.center));
                    if (d + o.radius <= b.radius) continue;
                    if (d + b.radius <= o.radius) {
                        b = o;
                        continue;
                    }
                    double R = 0.5 * (d + b.radius + o.radius);
                    Vec3 dir = scale(sub(o.center, b.center), 1.0 / d);
                    b.center = add(b.center, scale(dir, R - b.radius));
                    b.radius = R;
                }
                return b;
            } else if constexpr (std::is_same_v<T, Mapped>) {
                Ball b = bounding_ball(*r.inner);
                return Ball{add(rot_apply(r.rot, b.center), r.shift), b.radius};
            } else if constexpr (std::is_same_v<T, ConeSection>) {
                Ball sb = bounding_ball(*r.source);
                if (!std::isfinite(sb.radius)) return Ball{{}, kInf};
                Region e = cone_expand(Region(sb), r.source_slice, r.target);
                if (e.ball()) return *e.ball();
                // the section of the double cone over the bounding ball is bounded by the
                // section of the two full cones from the apexes
                FourVector base = slice_event(r.source_slice, sb.center);
                Ball out{{}, 0.0};
                bool first = true;
                for (int s : {-1, 1}) {
                    FourVector apex = base;
                    for (int i = 0; i < 4; ++i) apex[i] += s * sb.radius * r.source_slice.frame.n[i];
                    double ta = 0.0;
                    Vec3 ya = slice_coords(r.target.frame, apex, &ta);
                    // the cone section on a tilted slice is an ellipsoid; bound it generously
                    double g = r.target.frame.n[0] * r.source_slice.frame.n[0] -
                               dot3({r.target.frame.n[1], r.target.frame.n[2], r.target.frame.n[3]},
                                    {r.source_slice.frame.n[1], r.source_slice.frame.n[2],
                                     r.source_slice.frame.n[3]});
                    double vrel = std::sqrt(std::max(0.0, 1.0 - 1.0 / (g * g)));
                    double R = (std::abs(r.target.time - ta) + 2.0 * sb.radius) * (1.0 + vrel) / (1.0 - vrel);
                    Ball b{ya, R};
                    if (first) {
                        out = b;
                        first = false;
                    } else {
                        out = bounding_ball(Region(Union{{Region(out), Region(b)}}));
                    }
                }
                return out;
            } else {
                return Ball{{}, kInf};
            }
        },
        reg.v);
}

Region make_ball(const Vec3& c, double r) { return Region(Ball{c, r}); }
Region make_union(std::vector<Region> parts) { return Region(Union{std::move(parts)}); }
Region complement(const Region& r) { return Region(Complement{std::make_shared<const Region>(r)}); }

namespace {

bool same_slice(const SliceRef& a, const SliceRef& b) {
    return a.frame.same_as(b.frame) && std::abs(a.time - b.time) <= 1e-14 * (1.0 + std::abs(a.time));
}

// source time along the target slice is affine: s(y) = s0 + g.y
void source_time_affine(const SliceRef& src, const SliceRef& dst, double& s0, Vec3& g) {
    FourVector e0 = slice_event(dst, {0.0, 0.0, 0.0});
    s0 = -minkowski_dot(e0, src.frame.n);
    for (int k = 0; k < 3; ++k) {
        Vec3 y{};
        y[k] = 1.0;
        g[k] = -minkowski_dot(slice_event(dst, y), src.frame.n) - s0;
    }
}

Region expand_ball(const Ball& b, const SliceRef& src, const SliceRef& dst) {
    const double t = src.time;
    FourVector base = slice_event(src, b.center);
    FourVector am = base, ap = base;
    for (int i = 0; i < 4; ++i) {
        am[i] -= b.radius * src.frame.n[i];
        ap[i] += b.radius * src.frame.n[i];
    }
    double tm = 0.0, tp = 0.0;
    Vec3 ym = slice_coords(dst.frame, am, &tm);
    Vec3 yp = slice_coords(dst.frame, ap, &tp);
    double s0 = 0.0;
    Vec3 g{};
    source_time_affine(src, dst, s0, g);
    double gn = norm(g);
    auto s_at = [&](const Vec3& y) { return s0 + dot3(g, y); };
    const double tol = 1e-12 * (1.0 + std::abs(t) + b.radius);

    // future part: slice meets J+(a-) in a ball; past part: J-(a+)
    bool fut_nonempty = tm < dst.time;
    double Rf = dst.time - tm;
    bool past_nonempty = tp > dst.time;
    double Rp = tp - dst.time;

    bool fut_clean = fut_nonempty && s_at(ym) - Rf * gn >= t - tol;
    bool fut_absent = !fut_nonempty || s_at(ym) + Rf * gn < t - tol;
    bool past_clean = past_nonempty && s_at(yp) + Rp * gn <= t + tol;
    bool past_absent = !past_nonempty || s_at(yp) - Rp * gn > t + tol;

    // same-time slices through the ball contain the ball itself
    if (fut_clean && past_absent) return Region(Ball{ym, Rf});
    if (past_clean && fut_absent) return Region(Ball{yp, Rp});
    return Region(ConeSection{std::make_shared<const Region>(Region(b)), src, dst});
}

}  // namespace

Region cone_expand(const Region& src, const SliceRef& src_slice, const SliceRef& dst) {
    if (src.empty()) throw std::invalid_argument("cone_expand: empty source region");
    if (same_slice(src_slice, dst)) return src;
    return std::visit(
        [&](const auto& r) -> Region {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Whole>) {
                return Region(Whole{});
            } else if constexpr (std::is_same_v<T, Ball>) {
                return expand_ball(r, src_slice, dst);
            } else if constexpr (std::is_same_v<T, Union>) {
                std::vector<Region> parts;
                for (const auto& p : r.parts)
                    if (!p.empty()) parts.push_back(cone_expand(p, src_slice, dst));
                return Region(Union{std::move(parts)});
            } else if constexpr (std::is_same_v<T, Mapped>) {
                if (auto* b = r.inner->ball()) {
                    Ball mb{add(rot_apply(r.rot, b->center), r.shift), b->radius};
                    return expand_ball(mb, src_slice, dst);
                }
                return Region(ConeSection{std::make_shared<const Region>(src), src_slice, dst});
            } else {
                return Region(ConeSection{std::make_shared<const Region>(src), src_slice, dst});
            }
        },
        src.v);
}

void slice_map(const PoincareTransform& h, const SliceRef& s, Mat3& rot, Vec3& shift) {
    SliceRef hs = transformed_slice(h, s);
    auto image = [&](const Vec3& y) {
        FourVector e = apply_poincare_event(h, slice_event(s, y));
        return slice_coords(hs.frame, e);
    };
    shift = image({0.0, 0.0, 0.0});
    for (int k = 0; k < 3; ++k) {
        Vec3 y{};
        y[k] = 1.0;
        Vec3 col = sub(image(y), shift);
        for (int i = 0; i < 3; ++i) rot[i][k] = col[i];
    }
}

Region transform_region(const PoincareTransform& h, const Region& r, const SliceRef& s) {
    Mat3 rot{};
    Vec3 shift{};
    slice_map(h, s, rot, shift);
    return std::visit(
        [&](const auto& x) -> Region {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Whole>) {
                return Region(Whole{});
            } else if constexpr (std::is_same_v<T, Ball>) {
                return Region(Ball{add(rot_apply(rot, x.center), shift), x.radius});
            } else if constexpr (std::is_same_v<T, Union>) {
                std::vector<Region> parts;
                for (const auto& p : x.parts) parts.push_back(transform_region(h, p, s));
                return Region(Union{std::move(parts)});
            } else {
                bool ident = true;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (std::abs(rot[i][j] - (i == j ? 1.0 : 0.0)) > 1e-14) ident = false;
                if constexpr (std::is_same_v<T, Box>) {
                    if (ident) {
                        Box b = x;
                        for (int k = 0; k < 3; ++k) {
                            if (b.lo[k] > -kUnbounded) b.lo[k] += shift[k];
                            if (b.hi[k] < kUnbounded) b.hi[k] += shift[k];
                        }
                        return Region(b);
                    }
                }
                return Region(Mapped{std::make_shared<const Region>(r), rot, shift});
            }
        },
        r.v);
}

}  // namespace kgloc::geom
