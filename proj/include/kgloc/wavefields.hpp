#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "kgloc/density.hpp"
#include "kgloc/fft.hpp"
#include "kgloc/geometry.hpp"
#include "kgloc/states.hpp"

namespace kgloc::wave {

using cplx = std::complex<double>;
using fft::CVec;
using geom::FourVector;
using geom::Frame;
using mom::MassShellState;
using mom::MomentumGrid;

// Transform conventions (signature -,+,+,+, p.x = -E t + p.x):
//   position value  F(x_j) = (2pi)^{-d/2} sum_i c_i exp(+i p_i.x_j) dp^d
//   momentum value  c_i    = (2pi)^{-d/2} sum_j F_j exp(-i p_i.x_j) dx^d
// On the pad-refined grid (spacing dx/pad, pad*n points) the first is the exact trigonometric interpolant.
CVec to_position(const MomentumGrid& g, const cplx* c, int pad = 1);
std::vector<cplx> to_momentum(const MomentumGrid& g, const cplx* F);

using Weight = std::function<cplx(std::size_t idx, double E, const geom::Vec3& p)>;
// F[w psi exp(-iEt)]
CVec weighted_field(const MassShellState& psi, double t, const Weight& w, int pad = 1);

enum class AmplitudeKind { NW, Covariant, TernoField };

struct SpatialAmplitude {
    MomentumGrid grid;
    geom::SliceRef slice;
    AmplitudeKind kind = AmplitudeKind::NW;
    int pad = 1;
    CVec values;
    double norm2() const;  // sum |F|^2 dx^d on the (possibly refined) grid
};

SpatialAmplitude nw_amplitude(const MassShellState& psi, double t, int pad = 1);
SpatialAmplitude covariant_wavefunction(const MassShellState& psi, double t, int pad = 1);

// Phi^psi_n = F[psi / (E sqrt(E_n))] with E_n(p) = -n.p, and its spectral derivatives
// (index 0: Phi, 1 + mu: d_mu Phi with lower index in native coordinates).
struct FieldSlab {
    MomentumGrid grid;
    Frame generator;
    int pad = 1;
    std::vector<double> times;
    std::vector<std::array<CVec, 5>> fields;
    double scale() const;  // max |Phi|
};

FieldSlab terno_field(const MassShellState& psi, double t, const Frame& generator = Frame::rest(), int pad = 1);
FieldSlab terno_field(const MassShellState& psi, const std::vector<double>& times, const Frame& generator,
                      int pad = 1);

struct StressEnergyField {
    MomentumGrid grid;
    Frame generator;
    int pad = 1;
    double time = 0.0;
    std::vector<std::array<double, 16>> T;  // T_{mu nu}, row-major, lower indices
    double at(std::size_t idx, int mu, int nu) const { return T[idx][4 * mu + nu]; }
};

StressEnergyField stress_energy(const FieldSlab& slab, std::size_t time_index = 0);

struct CurrentField {
    MomentumGrid grid;
    Frame generator;
    Frame slice_frame;
    int pad = 1;
    std::vector<FourVector> J;  // upper index
    double scale() const;       // max |J^0|
};

// J^mu = eta^{mu alpha} T_{alpha nu} n^nu
CurrentField current(const StressEnergyField& T, const Frame& n);

struct DivergenceResult {
    double max_residual = 0.0;
    double scale = 0.0;  // max over points of the summed magnitudes of the divergence terms
    double relative() const { return scale > 0.0 ? max_residual / scale : 0.0; }
};

// max |d_mu J^mu| on the native slice at time t, all derivatives spectral
DivergenceResult current_divergence(const MassShellState& psi, double t, const Frame& n);

struct FieldPoint {
    cplx phi{};
    std::array<cplx, 4> d{};  // d_mu Phi, lower index
};

// Real quadratic form in v = (Phi, d_0 Phi, ..., d_3 Phi): density = sum S_ij Re(conj(v_i) v_j)
struct QuadForm {
    std::array<std::array<double, 5>, 5> S{};
};

// T_{mu nu} a^mu b^nu
QuadForm stress_form(const FourVector& a, const FourVector& b, double mass);
double eval_form(const QuadForm& q, const FieldPoint& v);
FourVector current_vector(const FieldPoint& v, double mass, const FourVector& n);

// quadratic density on the native slice at time t, via FFT on the pad-refined grid
quad::DensityField native_slice_density(const MassShellState& psi, const Frame& generator, double t,
                                        const QuadForm& q, int pad = 2);

// Direct non-uniform Fourier sums at arbitrary events.
class EventEvaluator {
public:
    EventEvaluator(const MassShellState& psi, const Frame& generator, double prune_rel = 1e-13);
    std::vector<FieldPoint> evaluate(const std::vector<FourVector>& events) const;
    std::size_t support_size() const { return energy_.size(); }

private:
    struct Row {
        int i0, i1, lo, hi;
        std::size_t offset;
    };
    MomentumGrid grid_;
    std::vector<Row> rows_;
    std::vector<double> energy_;
    std::array<std::vector<cplx>, 5> coef_;
    int nfields_;
};

struct SlabOptions {
    double safety = 0.8;         // along-axis spacing as a fraction of the density Nyquist spacing
    double window_factor = 1.0;  // along-axis window relative to the image spacing estimate
    double prune_rel = 1e-13;
};

// Density on a slice whose frame is a boost along one native axis (or the native frame).
// Coordinates are the slice's own rest coordinates.
quad::DensityField boosted_slice_density(const MassShellState& psi, const Frame& generator,
                                         const geom::SliceRef& slice, const QuadForm& q,
                                         const SlabOptions& opt = {});

// NW centroid and velocity, used to place windows
geom::Vec3 nw_centroid(const MassShellState& psi, double t);

}  // namespace kgloc::wave
