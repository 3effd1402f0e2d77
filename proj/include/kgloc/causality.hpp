#pragma once

#include <vector>

#include "kgloc/observables.hpp"

namespace kgloc::caus {

using geom::Frame;
using geom::Region;
using geom::SliceRef;
using mom::MassShellState;

struct MantleGrid {
    int n_u = 12;      // Gauss-Legendre nodes in time per panel
    int n_theta = 16;  // Gauss-Legendre nodes in cos(theta)
    int n_phi = 32;    // trapezoid nodes in phi
};

// Band of the light-cone mantle over a ball (or union of balls) between t1 and t2, native frame.
struct MantleSpec {
    Region source;  // Ball or Union of Balls on the slice (native frame, t1)
    double t1 = 0.0;
    double t2 = 1.0;
    Frame generator;  // frame entering J = n.T
    MantleGrid hi;
    MantleGrid lo{8, 10, 20};
    double panel = 1.0;  // maximum time span of one Gauss-Legendre panel
};

struct MantleSample {
    double t = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    geom::Vec3 x{};
    double weight = 0.0;  // quadrature weight including r^{d-1}
    double jv = 0.0;      // J^t - s J^r, s = sign(t2 - t1); causal currents give jv <= 0
    double phi_abs = 0.0;
};

struct FluxResult {
    double flux = 0.0;  // probability gained by the expanding region (>= 0 for causal currents)
    double err = 0.0;
    double p1 = 0.0, p1_err = 0.0;  // probability of the source on t1
    double p2 = 0.0, p2_err = 0.0;  // probability of the expanded region on t2
    double balance_residual = 0.0;  // |p2 - p1 - flux|
    double balance_err = 0.0;       // err + p1_err + p2_err
    std::size_t points = 0;
};

FluxResult mantle_flux(const MassShellState& psi, const MantleSpec& spec);

struct CausalityFraction {
    double fraction = 1.0;  // share of samples with jv <= tau_c * scale
    double max_jv = 0.0;    // largest jv relative to scale
    double delta = 0.0;     // -max jv / scale over samples where |Phi| > 1e-6 max |Phi|
    double scale = 0.0;     // max |jv| over samples
    std::size_t points = 0;
};

CausalityFraction pointwise_mantle_causality(const MassShellState& psi, const MantleSpec& spec, double tau_c = 1e-10);

// flux and pointwise check from one evaluation of the mantle
struct MantleCheck {
    FluxResult flux;
    CausalityFraction causal;
};
MantleCheck mantle_check(const MassShellState& psi, const MantleSpec& spec, double tau_c = 1e-10);

std::vector<MantleSample> mantle_samples(const MassShellState& psi, const MantleSpec& spec, bool hi = true);

// Gauss-Legendre nodes and weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace kgloc::caus
