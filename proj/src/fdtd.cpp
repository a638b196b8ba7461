#include "cavsim/fdtd.hpp"

#include "cavsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cavsim {

namespace {

using Column = std::vector<std::complex<double>>;

// Simpson weights on m_cells + 1 nodes (m_cells even).
double simpson_weight(int i, int m_cells) {
    if (i == 0 || i == m_cells) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
}

} // namespace

FdtdResult fdtd_oracle(const RobinCavityConfig& config0,
                       const std::function<double(double)>& d_l,
                       const std::function<double(double)>& d_r, double T, int m_cells,
                       int n_modes) {
    config0.validate();
    if (!(T > 0.0)) throw std::invalid_argument("fdtd_oracle: T must be positive");
    if (n_modes < 1) throw std::invalid_argument("fdtd_oracle: n_modes must be >= 1");
    if (m_cells < 8) throw std::invalid_argument("fdtd_oracle: m_cells must be >= 8");
    if (m_cells % 2 != 0) ++m_cells;

    const double L = config0.L_cav;
    const double c = config0.constants.c;
    const double dx = L / m_cells;
    const long n_steps = std::max(1L, static_cast<long>(std::ceil(T * c / (0.5 * dx))));
    const double dt = T / n_steps;
    const double lam2 = (c * dt / dx) * (c * dt / dx);

    const bool left_dirichlet = (config0.d_l == 0.0);
    const bool right_dirichlet = (config0.d_r == 0.0);
    double min_d = std::numeric_limits<double>::infinity();
    for (long j = 0; j <= n_steps; ++j) {
        const double t = j * dt;
        if (!left_dirichlet) min_d = std::min(min_d, d_l(t));
        if (!right_dirichlet) min_d = std::min(min_d, d_r(t));
    }
    if (!left_dirichlet || !right_dirichlet) {
        if (!(min_d > 0.0))
            throw ConfigError("fdtd_oracle: boundary length reaches zero mid-run");
        if (dx > 2.0 * min_d)
            throw ConfigError("fdtd_oracle: dx does not resolve the boundary lengths "
                              "(ghost stencil unstable); increase m_cells");
    }

    const ModeBasis basis0 = solve_wavenumbers(config0, n_modes);
    RobinCavityConfig config_T = config0;
    config_T.d_l = d_l(T);
    config_T.d_r = d_r(T);
    const ModeBasis basis_T = solve_wavenumbers(config_T, n_modes);

    // Second spatial difference with the time-t ghost closure folded in.
    auto laplacian = [&](const Column& phi, double t, int i) {
        std::complex<double> left, right;
        if (i == 0) {
            left = phi[1] - 2.0 * dx * phi[0] / d_l(t);
        } else {
            left = phi[i - 1];
        }
        if (i == m_cells) {
            right = phi[m_cells - 1] - 2.0 * dx * phi[m_cells] / d_r(t);
        } else {
            right = phi[i + 1];
        }
        return (right - 2.0 * phi[i] + left) / (dx * dx);
    };

    const int lo = left_dirichlet ? 1 : 0;
    const int hi = right_dirichlet ? m_cells - 1 : m_cells;

    BogoliubovTransform out;
    out.alpha.resize(n_modes, n_modes);
    out.beta.resize(n_modes, n_modes);
    out.physical = true;

    for (int n = 1; n <= n_modes; ++n) {
        const double omega_n = basis0.omega(n);
        Column prev(m_cells + 1), cur(m_cells + 1), next(m_cells + 1);
        for (int i = 0; i <= m_cells; ++i)
            prev[i] = std::complex<double>(mode_value(basis0, n, i * dx), 0.0);
        if (left_dirichlet) prev[0] = 0.0;
        if (right_dirichlet) prev[m_cells] = 0.0;

        // Taylor start: phi(dt) = phi + dt phidot + dt^2/2 c^2 phi''.
        const std::complex<double> i_unit(0.0, 1.0);
        for (int i = lo; i <= hi; ++i) {
            const std::complex<double> phidot = -i_unit * omega_n * prev[i];
            cur[i] = prev[i] + dt * phidot +
                     0.5 * dt * dt * c * c * laplacian(prev, 0.0, i);
        }

        Column at_T, before_T, after_T;
        for (long j = 1; j <= n_steps; ++j) {
            const double t_j = j * dt;
            for (int i = lo; i <= hi; ++i)
                next[i] = 2.0 * cur[i] - prev[i] + lam2 * dx * dx * laplacian(cur, t_j, i);
            if (j == n_steps) {
                before_T = prev;
                at_T = cur;
                after_T = next;
            }
            std::swap(prev, cur);
            std::swap(cur, next);
        }

        // Projection onto the final basis: for each m,
        //   c_m = (1/c)[omega_m Int f_m phi + i Int f_m phidot]
        //   d_m = (1/c)[omega_m Int f_m phi - i Int f_m phidot]
        // alpha_mn = conj(c_m), beta_mn = -d_m.
        for (int m = 1; m <= n_modes; ++m) {
            const double omega_m = basis_T.omega(m);
            std::complex<double> int_phi(0.0, 0.0), int_phidot(0.0, 0.0);
            for (int i = 0; i <= m_cells; ++i) {
                const double w = simpson_weight(i, m_cells) * dx / 3.0;
                const double f = mode_value(basis_T, m, i * dx);
                const std::complex<double> phidot =
                    (after_T[i] - before_T[i]) / (2.0 * dt);
                int_phi += w * f * at_T[i];
                int_phidot += w * f * phidot;
            }
            const std::complex<double> c_m =
                (omega_m * int_phi + i_unit * int_phidot) / c;
            const std::complex<double> d_m =
                (omega_m * int_phi - i_unit * int_phidot) / c;
            out.alpha(m - 1, n - 1) = std::conj(c_m);
            out.beta(m - 1, n - 1) = -d_m;
        }
    }

    const double defect = identity_defect(out);
    if (defect > 5e-2)
        throw BogoliubovDefectError(
            "fdtd_oracle: discretization defect too large; refine the grid", defect);
    out.identity_tolerance =
        std::max(BogoliubovTransform::default_tolerance(n_modes), 2.0 * defect);

    FdtdResult result;
    result.transform = std::move(out);
    result.m_cells = m_cells;
    result.n_steps = n_steps;
    result.dt = dt;
    result.dx = dx;
    return result;
}

double robin_phase_shift_fdtd(const RobinCavityConfig& config0,
                              const std::function<double(double)>& d_l,
                              const std::function<double(double)>& d_r, double T,
                              int m_cells) {
    config0.validate();
    if (!(T > 0.0))
        throw std::invalid_argument("robin_phase_shift_fdtd: T must be positive");
    if (m_cells == 0) {
        const bool left_dirichlet = (config0.d_l == 0.0);
        const bool right_dirichlet = (config0.d_r == 0.0);
        double min_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 512; ++j) {
            const double t = T * j / 512;
            if (!left_dirichlet) min_d = std::min(min_d, d_l(t));
            if (!right_dirichlet) min_d = std::min(min_d, d_r(t));
        }
        double cells = 1024.0;
        if (!left_dirichlet || !right_dirichlet) {
            if (!(min_d > 0.0))
                throw ConfigError(
                    "robin_phase_shift_fdtd: boundary length reaches zero mid-run");
            cells = std::max(cells, std::ceil(config0.L_cav / (1.8 * min_d)));
        }
        if (cells > 400000.0)
            throw ConfigError("robin_phase_shift_fdtd: resolving these boundary lengths "
                              "needs more than 400000 cells; pass m_cells explicitly");
        m_cells = static_cast<int>(cells);
    }

    const FdtdResult driven = fdtd_oracle(config0, d_l, d_r, T, m_cells, 1);
    const auto rest_l = [&config0](double) { return config0.d_l; };
    const auto rest_r = [&config0](double) { return config0.d_r; };
    const FdtdResult rest = fdtd_oracle(config0, rest_l, rest_r, T, m_cells, 1);
    return std::remainder(clock_phase(driven.transform) - clock_phase(rest.transform),
                          2.0 * 3.14159265358979323846);
}

} // namespace cavsim
