#pragma once

#include <array>
#include <string>

#include "kgloc/density.hpp"
#include "kgloc/states.hpp"
#include "kgloc/wavefields.hpp"

namespace kgloc::obs {

using geom::Frame;
using geom::Region;
using geom::SliceRef;
using mom::MassShellState;

enum class Observable { Q, A, M };
const char* to_string(Observable o);

struct ProbabilityValue {
    double value = 0.0;  // raw, never clipped
    double err = 0.0;
    Observable observable = Observable::Q;
    SliceRef slice;
    std::string region;
    std::string method;
    bool clamped = false;  // raw value outside [0,1] by more than err
};

struct ObsOptions {
    quad::Quadrature quadrature = quad::Quadrature::Smooth;
    int pad = 2;  // refinement of the position grid for density samples
};

// density builders (native slice at time t)
quad::DensityField nw_density(const MassShellState& psi, double t, int pad = 2);
quad::DensityField terno_density(const MassShellState& psi, double t, int pad = 2);
// n^mu n^nu T_{mu nu} through the field slab and the stress-energy tensor
quad::DensityField energy_density(const MassShellState& psi, double t, int pad = 2);

ProbabilityValue nw_probability(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                const ObsOptions& opt = {});
ProbabilityValue terno_probability(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                   const ObsOptions& opt = {});
ProbabilityValue terno_probability_energy_form(const MassShellState& psi, const SliceRef& slice, const Region& r,
                                               const ObsOptions& opt = {});

struct MOptions {
    ObsOptions obs;
    wave::SlabOptions slab;
    mom::ResampleOptions resample;
    double resample_tol = 1e-2;  // relative resampling error above which the operator form is flagged
};

struct MProbability {
    ProbabilityValue current_form;   // J_{n0} . n' integrated on the n' slice, no state resampling
    ProbabilityValue operator_form;  // multiplier sandwiches in the n' momentum representation
    double difference = 0.0;
    bool agree = false;    // |difference| <= 3 (err_i + err_ii)
    bool flagged = false;  // resampling error above tolerance
    const ProbabilityValue& primary() const { return current_form; }
};

MProbability m_povm_probability(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                const MOptions& opt = {});
// the current form only (cheaper, used by the causality suites)
ProbabilityValue m_povm_current(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                const MOptions& opt = {});
ProbabilityValue m_povm_operator(const MassShellState& psi, const Frame& n0, const SliceRef& slice, const Region& r,
                                 const MOptions& opt = {});

// state re-expressed in the rest coordinates of frame f (psi'(q) = psi(L(f) q))
MassShellState to_frame(const MassShellState& psi, const Frame& f, const mom::ResampleOptions& opt = {});

// Moments. Axis 0 is time; spatial axes are 1..dim.
struct MomentValue {
    double value = 0.0;
    double err = 0.0;
};

MomentValue first_moment(const MassShellState& psi, const SliceRef& slice, int axis);
MomentValue nw_expectation(const MassShellState& psi, const SliceRef& slice, int axis);

struct SecondMoment {
    double terno_second = 0.0;
    double nw_second = 0.0;
    double correction = 0.0;
    double residual = 0.0;  // terno_second - nw_second - correction
    double err = 0.0;
};
SecondMoment second_moment(const MassShellState& psi, const SliceRef& slice, int axis);

struct HeisenbergValue {
    double lhs = 0.0;  // Delta X (terno) * Delta P
    double rhs = 0.0;  // 1/2 sqrt(1 + 2 Delta P^2 <(E^2 - p^2)/E^4>)
    double nw_lhs = 0.0;  // Delta N * Delta P
    double err = 0.0;
};
HeisenbergValue heisenberg_check(const MassShellState& psi, const SliceRef& slice, int axis);

// <p_k / E>, components beyond dim are zero
geom::Vec3 velocity(const MassShellState& psi);

struct MomentReport {
    int dim = 3;
    double time = 0.0;
    // per spatial axis
    std::array<double, 3> first{}, first_err{}, nw_expectation{}, nw_err{};
    std::array<double, 3> second{}, nw_second{}, correction{}, residual{}, second_err{};
    std::array<double, 3> heisenberg_lhs{}, heisenberg_rhs{}, heisenberg_err{}, nw_heisenberg_lhs{};
    std::array<double, 3> delta_p{};
};
// all moments from one set of transforms
MomentReport moment_report(const MassShellState& psi, const SliceRef& slice);

}  // namespace kgloc::obs
