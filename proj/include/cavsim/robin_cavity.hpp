#pragma once

#include "cavsim/bogoliubov.hpp"
#include "cavsim/constants.hpp"
#include "cavsim/trajectory.hpp"

#include <functional>
#include <vector>

namespace cavsim {

// Extra effective electrical length contributed by a flux-biased SQUID
// terminating the waveguide: (Phi0/2pi) / (2 L0 Ic |cos(pi flux / Phi0)|).
// Even and Phi0-periodic in flux, minimal at flux = 0. Throws
// std::domain_error as flux approaches Phi0/2 (mod Phi0), where the
// effective length diverges.
double delta_L_eff(double flux, const PhysicalConstants& constants);

// Unique flux in [0, Phi0/2) with delta_L_eff(flux) == target. Throws
// std::domain_error if target < delta_L_eff(0) (unreachable length).
double flux_for_length(double target, const PhysicalConstants& constants);

// Waveguide cavity of physical length L_cav terminated by two SQUIDs whose
// instantaneous effective lengths are d_l (left) and d_r (right), giving the
// Robin conditions phi - d_l dphi/dx = 0 at x = 0 and phi + d_r dphi/dx = 0
// at x = L_cav. d = 0 is the Dirichlet limit; physical SQUID operation
// additionally requires d >= delta_L_eff(0), which the flux mapping enforces.
struct RobinCavityConfig {
    double L_cav = 0.0;
    double d_l = 0.0;
    double d_r = 0.0;
    PhysicalConstants constants;

    void validate() const; // throws std::invalid_argument
};

// Static mode ladder of one Robin cavity: u_n(x) = N_n sin(k_n x + delta_n)
// with delta_n = arctan(d_l k_n), orthonormal in the Klein-Gordon product.
struct ModeBasis {
    std::vector<double> k;     // wavenumbers, strictly increasing [1/m]
    std::vector<double> delta; // left boundary phases [rad]
    std::vector<double> norm;  // normalization factors
    double L_cav = 0.0;
    double c = 0.0;

    int n_modes() const { return static_cast<int>(k.size()); }
    double omega(int n) const; // k_n * c, n = 1..n_modes
};

// Spatial mode function N_n sin(k_n x + delta_n) for x in [0, L_cav].
double mode_value(const ModeBasis& basis, int n, double x);

// Lowest n_modes roots of the wavenumber condition
//     k L_cav = n pi - arctan(d_l k) - arctan(d_r k),
// solved in the cleared form
//     sin(k L_cav)(1 - d_l d_r k^2) + k (d_l + d_r) cos(k L_cav) = 0
// by bisection on ((n-1) pi / L_cav, n pi / L_cav) plus Newton polish; the
// Dirichlet limit d_l = d_r = 0 returns k_n = n pi / L_cav exactly. Throws
// SolverError (with bracket diagnostics) if a residual stays above
// 1e-12 times the local scale of the cleared form.
ModeBasis solve_wavenumbers(const RobinCavityConfig& config, int n_modes);

// Bogoliubov transform of a sudden boundary change between two static bases
// over the same L_cav, from closed-form overlap integrals of the sine modes.
// The nearly-degenerate wavenumber pairs are evaluated through an exact
// product-form rewrite whose only limit, sin(x)/x, switches to a series for
// tiny x, so no cancellation occurs anywhere. The identity budget is widened
// to twice the measured truncation defect because a sudden change genuinely
// leaks outside any finite mode ladder; as with segment_transform, the defect
// concentrates in the highest rows while the low-mode corner converges.
BogoliubovTransform instantaneous_bogoliubov(const ModeBasis& from, const ModeBasis& to);

// Result of composing instantaneous boundary jumps with free evolution.
struct RobinEvolution {
    BogoliubovTransform transform; // from the finer (dt/2) pass
    double dt = 0.0;               // step actually used by the coarse pass
    long n_steps = 0;              // coarse-pass step count
    double clock_phase_delta = 0.0; // |clock phase(dt) - clock phase(dt/2)|
};

// Evolve the cavity with time-dependent boundary lengths d_l(t), d_r(t) over
// [0, T]: uniform steps, each jumping to the basis of the midpoint-sampled
// boundaries and then evolving diagonally for dt, with a final jump to the
// basis of (d_l(T), d_r(T)). The whole run is repeated at dt/2 and the
// clock-phase difference between the passes is reported as a convergence
// estimate; if phase_tol > 0 and the estimate exceeds it, RefinementError is
// thrown (suggesting a smaller dt).
RobinEvolution evolve_robin(const RobinCavityConfig& config0,
                            const std::function<double(double)>& d_l,
                            const std::function<double(double)>& d_r, double T, double dt,
                            int n_modes, double phase_tol = 0.0);

// evolve_robin with the step halved (up to 8 times) until the convergence
// estimate drops below phase_tol; throws RefinementError when exhausted.
RobinEvolution evolve_robin_converged(const RobinCavityConfig& config0,
                                      const std::function<double(double)>& d_l,
                                      const std::function<double(double)>& d_r, double T,
                                      double dt0, int n_modes, double phase_tol);

// Boundary-length drive realizing one rigid trip on the circuit:
//     d_l(t) = dL_max - (x_l(t) - x_l(0)),  d_r(t) = dL_min + (x_r(t) - x_r(0)),
// dL_min = delta_L_eff(0), dL_max = dL_min + d_cav, L_cav = L - dL_min - dL_max.
struct TripBoundaryDrive {
    RobinCavityConfig config0; // resting configuration (d_l = dL_max, d_r = dL_min)
    std::function<double(double)> d_l;
    std::function<double(double)> d_r;
    bool thin_boundary_warning = false; // dL_max / L_cav > 0.1
};

TripBoundaryDrive trip_boundary_drive(const TrajectoryPlan& plan,
                                      const PhysicalConstants& constants);

// One rigid-cavity round trip simulated on the circuit side.
struct RobinTripResult {
    BogoliubovTransform transform;
    PhaseRecord phases;             // referenced to the static Dirichlet cavity
    double theta_rel_robin_ref = 0.0; // referenced to the drive-off Robin cavity
    double omega_R1 = 0.0;          // clock frequency of the resting circuit [rad/s]
    double omega_D1 = 0.0;          // pi c / L of the simulated cavity [rad/s]
    RobinCavityConfig config0;      // resting configuration (d_l = dL_max, d_r = dL_min)
    double dt_used = 0.0;
    long n_steps = 0;
    double refine_delta = 0.0;      // final Richardson clock-phase estimate [rad]
    bool thin_boundary_warning = false; // dL_max / L_cav > 0.1
};

// Map the rigid-trip mirror worldlines onto SQUID boundary lengths,
//     d_l(t) = dL_max - (x_l(t) - x_l(0)),  d_r(t) = dL_min + (x_r(t) - x_r(0)),
// with dL_min = delta_L_eff(0), dL_max = dL_min + d_cav, and the waveguide
// length fixed by L = L_cav + dL_min + dL_max; then run evolve_robin with the
// step halved until the convergence estimate drops below phase_tol.
//
// phases.theta_rel keeps the global static-Dirichlet reference and therefore
// contains the static Robin-vs-Dirichlet frequency offset; the time-dilation
// comparisons against the Dirichlet trip use theta_rel_robin_ref, which
// references the same circuit at rest and vanishes as a -> 0.
//
// dt = 0 selects the default policy min(2 pi / omega_R1, t_a) / 200.
RobinTripResult simulate_trip_robin(const TrajectoryPlan& plan,
                                    const PhysicalConstants& constants, double dt = 0.0,
                                    int n_modes = 20, double phase_tol = 1e-6);

} // namespace cavsim
