#pragma once

#include "cavsim/bogoliubov.hpp"
#include "cavsim/robin_cavity.hpp"

#include <functional>

namespace cavsim {

// Output of the finite-difference reference solver.
struct FdtdResult {
    BogoliubovTransform transform;
    int m_cells = 0;   // spatial cells (m_cells + 1 nodes)
    long n_steps = 0;  // leapfrog steps to reach T
    double dt = 0.0;
    double dx = 0.0;
};

// Independent check on the composed-transform machinery: solve the 1+1-D wave
// equation with time-dependent Robin boundaries
//     phi - d_l(t) dphi/dx = 0 at x = 0,   phi + d_r(t) dphi/dx = 0 at x = L_cav
// directly on a grid, once per initial mode, and project the final field onto
// the final static basis to read off one (alpha, beta) column pair.
//
// Scheme: leapfrog at CFL 0.5 with ghost-point boundary closures (second order
// in space), a Taylor second-order first step, and Simpson projection. The
// boundary stencil needs dx to resolve the effective lengths; the solver
// throws ConfigError when dx > 2 min d (the explicit update would go
// unstable), and BogoliubovDefectError when the discretized transform's
// identity defect exceeds 5e-2.
//
// Dirichlet ends (d = 0 for all t) are supported by pinning the node instead
// of the ghost closure.
FdtdResult fdtd_oracle(const RobinCavityConfig& config0,
                       const std::function<double(double)>& d_l,
                       const std::function<double(double)>& d_r, double T, int m_cells,
                       int n_modes);

// Drive-induced phase of the fundamental relative to the same cavity held at
// its initial boundary lengths, wrapped to (-pi, pi]. Both runs share one
// grid and one step size, so the leapfrog's bulk dispersion error (which
// advances the rest phase too) cancels in the difference; the grid-to-grid
// scatter of the result is orders of magnitude below either run's absolute
// phase error. Meaningful for drives that return to the initial lengths at
// t = T.
//
// m_cells = 0 picks the coarsest grid that resolves the boundary lengths
// (dx <= 1.8 min d over both drives, at least 1024 cells) and throws
// ConfigError when that would exceed 400000 cells; pass m_cells explicitly
// to override.
double robin_phase_shift_fdtd(const RobinCavityConfig& config0,
                              const std::function<double(double)>& d_l,
                              const std::function<double(double)>& d_r, double T,
                              int m_cells = 0);

} // namespace cavsim
