#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "kgloc/fft.hpp"
#include "kgloc/geometry.hpp"

namespace kgloc::mom {

using cplx = std::complex<double>;
using geom::Vec3;

// Centered grid: p_i = (i - n/2) dp per axis, dp = 2 p_max / n; dual position grid dx = pi / p_max.
class MomentumGrid {
public:
    MomentumGrid(int dim = 3, int n = 64, double p_max = 8.0, double mass = 1.0);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double p_max() const { return p_max_; }
    double mass() const { return mass_; }
    double dp() const { return 2.0 * p_max_ / n_; }
    double dx() const { return M_PI / p_max_; }
    double length() const { return n_ * dx(); }
    double cell() const;  // dp^dim
    std::size_t size() const { return size_; }
    fft::Shape shape(int pad = 1) const;

    double coord(int i) const { return (i - n_ / 2) * dp(); }
    double position(int j, int pad = 1) const { return (j - pad * n_ / 2) * dx() / pad; }
    void unravel(std::size_t idx, int* i) const;
    Vec3 momentum(std::size_t idx) const;
    double energy(std::size_t idx) const { return (*E_)[idx]; }
    const std::vector<double>& energies() const { return *E_; }

    bool same_as(const MomentumGrid& o) const;
    // warn-level aliasing check
    bool aliasing_ok(double momentum_scale = 0.0) const { return p_max_ >= 6.0 * (mass_ + momentum_scale); }
    std::string describe() const;

private:
    int dim_;
    int n_;
    double p_max_;
    double mass_;
    std::size_t size_;
    std::shared_ptr<const std::vector<double>> E_;
};

double energy(const Vec3& p, double mass);

struct MassShellState {
    MomentumGrid grid;
    std::vector<cplx> psi;
    geom::Frame native;
    double resample_err = 0.0;  // relative norm error from interpolation, 0 for exact operations

    MassShellState() = default;
    MassShellState(MomentumGrid g) : grid(g), psi(g.size(), cplx(0.0, 0.0)) {}

    double norm2() const;
    // max |psi| on the outermost grid rows relative to max |psi|
    double edge_ratio() const;
    // fraction of norm^2 carried by the outermost two rows per axis
    double edge_mass() const;
    MassShellState scaled(cplx a) const;
    MassShellState normalized() const;
};

struct Multiplier {
    enum class Kind {
        Energy,
        InvEnergy,
        MomOverEnergy,
        MassOverEnergy,
        EvolvePhase,
        TranslatePhase,
        SqrtEnergy,
        InvSqrtEnergy,
        Momentum
    };
    Kind kind = Kind::Energy;
    int axis = 0;
    double tau = 0.0;
    geom::FourVector a{};

    static Multiplier energy() { return {Kind::Energy}; }
    static Multiplier inv_energy() { return {Kind::InvEnergy}; }
    static Multiplier mom_over_energy(int k) { return {Kind::MomOverEnergy, k}; }
    static Multiplier mass_over_energy() { return {Kind::MassOverEnergy}; }
    static Multiplier evolve_phase(double tau) { return {Kind::EvolvePhase, 0, tau}; }
    static Multiplier translate_phase(const geom::FourVector& a) { return {Kind::TranslatePhase, 0, 0.0, a}; }
    static Multiplier sqrt_energy() { return {Kind::SqrtEnergy}; }
    static Multiplier inv_sqrt_energy() { return {Kind::InvSqrtEnergy}; }
    static Multiplier momentum(int k) { return {Kind::Momentum, k}; }

    cplx value(const MomentumGrid& g, std::size_t idx) const;
};

cplx inner_product(const MassShellState& a, const MassShellState& b);
MassShellState apply_multiplier(const MassShellState& psi, const Multiplier& m);
// expectation <psi| m |psi> / <psi|psi>
double expectation(const MassShellState& psi, const Multiplier& m);

struct ResampleOptions {
    bool upsample = true;        // trigonometric 2x refinement of the momentum grid before cubic interpolation
    bool estimate_error = true;  // round trip U_{h^-1} U_h psi vs psi
};

MassShellState apply_poincare_state(const MassShellState& psi, const geom::PoincareTransform& h,
                                    const ResampleOptions& opt = {});

// psi(p) ~ exp(-|p - p0|^2 / (4 sigma^2)) exp(-i p.x0), normalized
MassShellState make_gaussian(const Vec3& p0, double sigma, const MomentumGrid& grid, const Vec3& x0 = {});

struct SpatialProfile {
    enum class Kind { Bump, Gaussian } kind = Kind::Bump;
    double radius = 1.0;  // support radius of the bump, width of the gaussian
    Vec3 center{};
    double value(const Vec3& x) const;
};

// NW amplitude at t=0 equal to the normalized profile times exp(i k.x)
MassShellState make_profile_state(const SpatialProfile& chi, const Vec3& k, const MomentumGrid& grid);

// psi_j(p) = sqrt(E) chi_hat(p - j a), renormalized in the mass-shell norm
MassShellState almost_localized_sequence(const SpatialProfile& chi, const Vec3& a, int j, const MomentumGrid& grid);

// normalized image under the lattice NW projector of region on the slice (native frame)
MassShellState nw_project(const MassShellState& psi, const geom::Region& region, const geom::SliceRef& slice);

// position of lattice point j on the base grid
Vec3 lattice_point(const MomentumGrid& g, std::size_t flat_idx, int pad = 1);

// Binary snapshot: "KGLS", u32 version, i32 dim, i32 n, f64 p_max, f64 mass, f64 frame[4], then
// n^dim interleaved (re, im) f64 values, little-endian host order.
void save_state(const MassShellState& psi, const std::string& path);
MassShellState load_state(const std::string& path);

}  // namespace kgloc::mom
