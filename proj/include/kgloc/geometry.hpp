#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace kgloc::geom {

using FourVector = std::array<double, 4>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

// signature (-,+,+,+)
double minkowski_dot(const FourVector& u, const FourVector& v);

enum class CausalClass { Zero, TimelikeFuture, TimelikePast, NullFuture, NullPast, Spacelike };
const char* to_string(CausalClass c);

// null band is |g(v,v)| <= tau_c * scale^2
CausalClass classify_causal(const FourVector& v, double tau_c = 1e-10, double scale = 1.0);

struct Frame {
    FourVector n{1.0, 0.0, 0.0, 0.0};

    static Frame rest() { return Frame{}; }
    static Frame from_velocity(const Vec3& v);
    Vec3 velocity() const;
    double gamma() const { return n[0]; }
    void validate(double tol = 1e-12) const;
    bool same_as(const Frame& o, double tol = 1e-14) const;
};

struct SliceRef {
    Frame frame;
    double time = 0.0;
};

Mat4 identity4();
Mat4 matmul(const Mat4& a, const Mat4& b);
FourVector apply(const Mat4& m, const FourVector& v);
Mat4 transpose(const Mat4& m);

struct PoincareTransform {
    Mat4 lambda = identity4();
    FourVector a{0.0, 0.0, 0.0, 0.0};

    static PoincareTransform identity() { return {}; }
    static PoincareTransform translation(const FourVector& a);
    // change to the coordinates of an observer moving with `velocity`: e0 -> gamma (1, -velocity)
    static PoincareTransform boost(const Vec3& velocity);
    // rotation by angle about a spatial axis (right-handed)
    static PoincareTransform rotation(const Vec3& axis, double angle);
    // 90 degree rotation in the (from, to) plane sending e_from to e_to (spatial axes 0..2)
    static PoincareTransform quarter_turn(int from, int to);

    PoincareTransform inverse() const;
    void validate(double tol = 1e-10) const;
    bool is_pure_translation(double tol = 1e-14) const;
};

// (h1 h2)(e) = h1(h2(e))
PoincareTransform compose(const PoincareTransform& h1, const PoincareTransform& h2);
FourVector apply_poincare_event(const PoincareTransform& h, const FourVector& e);
SliceRef transformed_slice(const PoincareTransform& h, const SliceRef& s);

// Slice coordinates: y on Sigma_{n,t} is the event L(n)(t, y), L(n) the pure boost e0 -> n.
Mat4 frame_boost(const Frame& f);
FourVector slice_event(const SliceRef& s, const Vec3& y);
// coordinates of event e in the rest frame of s (time goes to *time_out when given)
Vec3 slice_coords(const Frame& f, const FourVector& e, double* time_out = nullptr);

struct Region;
using RegionPtr = std::shared_ptr<const Region>;

struct Whole {};
struct Ball {
    Vec3 center{};
    double radius = 1.0;
};
// half-open per axis: lo <= y < hi
struct Box {
    Vec3 lo{};
    Vec3 hi{};
    static Box interval(double a, double b);  // 1-d helper, other axes unbounded
};
// {y : normal.y >= offset}
struct HalfSpace {
    Vec3 normal{1.0, 0.0, 0.0};
    double offset = 0.0;
};
struct Union {
    std::vector<Region> parts;
};
struct Complement {
    RegionPtr inner;
};
// y in region iff rot^T (y - shift) in inner
struct Mapped {
    RegionPtr inner;
    Mat3 rot{};
    Vec3 shift{};
};
// points of `target` causally connected to `source` (on source_slice), either orientation
struct ConeSection {
    RegionPtr source;
    SliceRef source_slice;
    SliceRef target;
};

struct Region {
    std::variant<Whole, Ball, Box, HalfSpace, Union, Complement, Mapped, ConeSection> v;

    Region() : v(Whole{}) {}
    Region(Whole w) : v(w) {}
    Region(Ball b) : v(b) {}
    Region(Box b) : v(b) {}
    Region(HalfSpace h) : v(h) {}
    Region(Union u) : v(std::move(u)) {}
    Region(Complement c) : v(std::move(c)) {}
    Region(Mapped m) : v(std::move(m)) {}
    Region(ConeSection c) : v(std::move(c)) {}

    bool contains(const Vec3& y) const;
    // Euclidean distance from y to the region (0 inside); exact except for sampled cone sections
    double distance(const Vec3& y) const;
    // negative inside; magnitude exact outside the region
    double signed_distance(const Vec3& y) const;
    bool empty() const;
    std::string describe() const;

    const Ball* ball() const { return std::get_if<Ball>(&v); }
};

// largest radius is infinite for unbounded regions
Ball bounding_ball(const Region& r);

Region make_ball(const Vec3& c, double r);
Region make_union(std::vector<Region> parts);
Region complement(const Region& r);

// Region on dst consisting of the points causally connected to src.
Region cone_expand(const Region& src, const SliceRef& src_slice, const SliceRef& dst);

// Image of a region on s under h, expressed in the coordinates of transformed_slice(h, s).
Region transform_region(const PoincareTransform& h, const Region& r, const SliceRef& s);

// Affine isometry y -> rot y + shift between the coordinates of s and of transformed_slice(h, s).
void slice_map(const PoincareTransform& h, const SliceRef& s, Mat3& rot, Vec3& shift);

double norm(const Vec3& v);
Vec3 sub(const Vec3& a, const Vec3& b);
Vec3 add(const Vec3& a, const Vec3& b);
Vec3 scale(const Vec3& a, double s);
double dot3(const Vec3& a, const Vec3& b);

}  // namespace kgloc::geom
