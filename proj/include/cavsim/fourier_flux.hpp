#pragma once

#include "cavsim/constants.hpp"

#include <iosfwd>
#include <vector>

namespace cavsim {

// Truncated Fourier representation of one SQUID's flux drive,
//     flux(t) = offset + sum_n amplitude_n cos(2 pi n t / period + phase_n),
// the waveform a bandwidth-limited generator can actually produce.
struct FourierFlux {
    double offset = 0.0;            // [Wb]
    std::vector<double> amplitude;  // [Wb], n = 1..N
    std::vector<double> phase;      // [rad]
    double period = 0.0;            // [s]
    double residual_rms = 0.0;      // RMS of the delta_L_eff mismatch on the fit grid [m]
    int iterations = 0;             // Gauss-Newton iterations accepted

    int n_harmonics() const { return static_cast<int>(amplitude.size()); }
    double evaluate(double t) const;
};

// Fit an N-harmonic series to a target flux sampled uniformly over one period
// (t_i = i period / M, i = 0..M-1, M >= 64 N). The objective is the L2 norm of
// delta_L_eff(fit) - delta_L_eff(target) on the grid, not the flux mismatch
// itself: initialized by the exact trigonometric least squares on the flux,
// then refined by damped Gauss-Newton on the effective-length residual.
//
// The iteration constrains |fit(t_i)| < Phi0/2 (delta_L_eff diverges there and
// is even in flux, so signed excursions near zero are physical); steps leaving
// that domain are treated as divergent and rejected. Throws FitError if no
// admissible step exists from an inadmissible start.
FourierFlux fit_flux(const std::vector<double>& flux_samples, double period,
                     int n_harmonics, const PhysicalConstants& constants);

// Highest frequency the N-harmonic drive of a trip of duration 4 t_a
// contains: N / (4 t_a) [Hz].
double harmonic_budget(double t_a, int n_harmonics);

// Two-column time/flux table (units s, Wb) over one period, inclusive of both
// endpoints, preceded by '#' header lines carrying period, harmonic count and
// fit residual. Deterministic formatting.
void write_waveform_table(std::ostream& os, const FourierFlux& flux, int samples);

} // namespace cavsim
