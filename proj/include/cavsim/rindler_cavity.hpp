#pragma once

#include "cavsim/bogoliubov.hpp"
#include "cavsim/trajectory.hpp"

namespace cavsim {

// Mode ladder of a static Dirichlet cavity of proper length L:
// omega_n = pi n c / L, u_n = sin(omega_n (x - x_l)/c) e^{-i omega_n t} / sqrt(pi n).
struct DirichletBasis {
    double L;
    double c;
    int n_modes;
    double omega(int n) const; // n = 1..n_modes
};

// Mode ladder of the same cavity in the comoving uniformly-accelerated chart:
// Omega_m = pi m c / L' with L' the chart length of the cavity.
struct RindlerBasis {
    double L_prime;
    double c;
    int n_modes;
    double Omega(int m) const; // m = 1..n_modes
};

// Bogoliubov transform from the instantaneously comoving inertial basis to the
// accelerated-chart basis at a junction where the cavity is momentarily at
// rest in that inertial frame. Depends only on h = a L / c^2 and the mode
// count; alpha and beta come out real. Computed by Klein-Gordon overlaps on
// the junction slice; `quad_tol` is the absolute per-element quadrature
// tolerance. Results at the default tolerance are cached by (h, n_modes).
//
// The identity budget is widened to the measured truncation defect: the
// highest rows of the finite slice always lose their cut-off neighbors (the
// loss grows roughly like (h n_modes)^2 before saturating), while the
// low-mode corner converges as the ladder grows. Pick n_modes with a margin
// over the modes actually observed.
BogoliubovTransform segment_transform(double h, int n_modes, double quad_tol = 1e-10);

// Spatial reflection of a transform about the cavity center: mode n flips sign
// as (-1)^(n+1) in both bases, so entries pick up (-1)^(m+n). Converts the
// forward-acceleration junction transform into the backward one.
BogoliubovTransform parity_conjugate(const BogoliubovTransform& t);

// Full round-trip transform for the four-segment plan: for each hyperbolic
// segment, conjugation by the junction transform around free evolution in the
// accelerated chart. Start and end bases are the rest-frame Dirichlet ladder,
// with phases referenced to the trip's start/end slices, so as a -> 0 the
// result tends to free Minkowski evolution over 4 t_a.
BogoliubovTransform trip_transform(const TrajectoryPlan& plan, int n_modes,
                                   double quad_tol = 1e-10);

// Clock-phase bookkeeping for one trip_transform: raw phase unwrapped near the
// static anchor -omega_1 4 t_a, referenced to the static Dirichlet cavity.
PhaseRecord trip_phase_record(const TrajectoryPlan& plan, int n_modes,
                              double quad_tol = 1e-10);

// Relative clock phase if mode 1 simply accrued Omega_1 * (total chart time)
// during the accelerated stretches, referenced against the static phase
// omega_1 * 4 t_a. Positive: the accelerated clock runs slow.
double single_mode_phase(const TrajectoryPlan& plan);

// Relative clock phase of a point-like clock riding the cavity center:
// omega_ref * (4 t_a - proper_time_round_trip). Positive for a slowed clock,
// matching the sign conventions of clock_phase / PhaseRecord.
double ideal_clock_phase(const TrajectoryPlan& plan, double omega_ref);

} // namespace cavsim
