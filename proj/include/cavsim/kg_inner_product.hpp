#pragma once

#include <complex>
#include <functional>

namespace cavsim {

// A field configuration restricted to one constant-time slice, expressed as a
// function of the slice coordinate s: its value and its *lab-time* derivative
// on the slice. For a stationary mode u = f(s) exp(-i omega t) on a flat slice
// the pair is (f, -i omega f); for a mode of an accelerated chart the builder
// folds the chart's lapse into time_deriv (d/dt = e^{-a xi / c^2} d/d eta on the
// eta = 0 slice), so kg_inner_product itself stays chart-agnostic.
struct SliceMode {
    std::function<std::complex<double>(double)> value;
    std::function<std::complex<double>(double)> time_deriv;
    double support_min = 0.0;
    double support_max = 0.0;
};

// Integration slice: coordinate range plus the measure dx/ds (1 on a flat
// Minkowski slice, e^{a xi / c^2} on the eta = 0 Rindler slice).
struct SliceSurface {
    double s_min = 0.0;
    double s_max = 0.0;
    std::function<double(double)> measure; // nullptr means flat (measure 1)
    double c = 1.0;
};

// Klein-Gordon inner product on the slice,
//
//   (a, b) = -(i/c) Int [ a db*/dt - b* da/dt ] (dx/ds) ds,
//
// normalized so the cavity modes used throughout are orthonormal:
// (u_m, u_n) = delta_mn, (u_m, u_n*) = 0. Adaptive composite Gauss-Legendre,
// panels doubled until successive estimates differ by less than abs_tol.
// Throws std::domain_error if the mode supports do not overlap the surface,
// QuadratureError if the tolerance cannot be met.
std::complex<double> kg_inner_product(const SliceMode& a, const SliceMode& b,
                                      const SliceSurface& surface,
                                      double abs_tol = 1e-10);

} // namespace cavsim
