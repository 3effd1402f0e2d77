#pragma once

#include <array>
#include <string>
#include <vector>

#include "kgloc/fft.hpp"
#include "kgloc/geometry.hpp"

namespace kgloc::quad {

// Real density sampled on a uniform centered grid: sample j sits at origin + (j - M/2) h per axis.
// Producers guarantee the samples come from a band-limited function resolved by the grid, so
// ball and box integrals can be evaluated exactly from the discrete spectrum.
struct DensityField {
    int dim = 3;
    fft::Shape shape{1, 1, 1};
    std::array<double, 3> h{1.0, 1.0, 1.0};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    int lattice_stride = 1;  // every stride-th sample is a point of the base lattice
    std::vector<double> values;
    double extra_err = 0.0;  // absolute error contributed upstream (momentum truncation, resampling)

    // filled by finalize()
    fft::CVec spectrum;
    double total = 0.0;
    double abs_total = 0.0;
    double edge_mass = 0.0;

    void finalize(bool with_spectrum = true);
    double cell() const;
    double length(int k) const { return shape[k] * h[k]; }
    std::size_t size() const { return fft::volume(shape); }
    geom::Vec3 point(std::size_t idx) const;
    double roundoff() const;
};

enum class Quadrature { Smooth, Lattice };

struct IntegralValue {
    double value = 0.0;
    double err = 0.0;
    std::string method;
};

IntegralValue integrate(const DensityField& f, const geom::Region& r, Quadrature q = Quadrature::Smooth);

// exact for band-limited densities; the ball/box must lie inside the window (periodic images otherwise)
double integrate_ball_spectral(const DensityField& f, const geom::Ball& b);
double integrate_box_spectral(const DensityField& f, const geom::Box& b);
// midpoint sum over samples at the given stride with 2x sub-sampling of boundary cells
double integrate_subsampled(const DensityField& f, const geom::Region& r, int stride);
// plain indicator sum over base-lattice points
double integrate_lattice(const DensityField& f, const geom::Region& r);

// Fourier transform of the indicator of a d-ball of radius R at |k|
double ball_transform(int dim, double k, double R);

}  // namespace kgloc::quad
