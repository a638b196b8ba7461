#include "cavsim/robin_cavity.hpp"

#include "cavsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace cavsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// Cleared form of the wavenumber condition and its k-derivative.
struct ClearedForm {
    double L;
    double dl;
    double dr;

    double f(double k) const {
        return std::sin(k * L) * (1.0 - dl * dr * k * k) +
               k * (dl + dr) * std::cos(k * L);
    }
    double df(double k) const {
        return L * std::cos(k * L) * (1.0 - dl * dr * k * k) -
               2.0 * dl * dr * k * std::sin(k * L) +
               (dl + dr) * (std::cos(k * L) - k * L * std::sin(k * L));
    }
    double scale(double k) const {
        return 1.0 + dl * dr * k * k + (dl + dr) * k;
    }
};

double normalization(double k, double L, double delta) {
    const double arg = k * L + 0.5 * (std::sin(2.0 * delta) -
                                      std::sin(2.0 * (k * L + delta)));
    return 1.0 / std::sqrt(arg);
}

} // namespace

double delta_L_eff(double flux, const PhysicalConstants& constants) {
    constants.validate();
    const double cosv = std::abs(std::cos(kPi * flux / constants.Phi0));
    if (cosv < 1e-12)
        throw std::domain_error(
            "delta_L_eff: flux at Phi0/2 (mod Phi0), effective length diverges");
    return (constants.Phi0 / (2.0 * kPi)) / (2.0 * constants.L0 * constants.Ic * cosv);
}

double flux_for_length(double target, const PhysicalConstants& constants) {
    constants.validate();
    if (!(target > 0.0))
        throw std::domain_error("flux_for_length: target must be positive");
    double ratio = constants.delta_L_min() / target;
    if (ratio > 1.0) {
        if (ratio < 1.0 + 1e-12)
            ratio = 1.0;
        else
            throw std::domain_error(
                "flux_for_length: target below the minimum effective length");
    }
    return (constants.Phi0 / kPi) * std::acos(ratio);
}

void RobinCavityConfig::validate() const {
    constants.validate();
    if (!(L_cav > 0.0))
        throw std::invalid_argument("RobinCavityConfig: L_cav must be positive");
    if (!(d_l >= 0.0) || !(d_r >= 0.0))
        throw std::invalid_argument(
            "RobinCavityConfig: boundary lengths must be non-negative");
}

double ModeBasis::omega(int n) const {
    if (n < 1 || n > n_modes()) throw std::out_of_range("ModeBasis::omega: bad index");
    return k[n - 1] * c;
}

double mode_value(const ModeBasis& basis, int n, double x) {
    if (n < 1 || n > basis.n_modes())
        throw std::out_of_range("mode_value: bad mode index");
    return basis.norm[n - 1] * std::sin(basis.k[n - 1] * x + basis.delta[n - 1]);
}

ModeBasis solve_wavenumbers(const RobinCavityConfig& config, int n_modes) {
    config.validate();
    if (n_modes < 1) throw std::invalid_argument("solve_wavenumbers: n_modes must be >= 1");

    const double L = config.L_cav;
    ModeBasis basis;
    basis.L_cav = L;
    basis.c = config.constants.c;
    basis.k.resize(n_modes);
    basis.delta.resize(n_modes);
    basis.norm.resize(n_modes);

    const bool dirichlet = (config.d_l == 0.0 && config.d_r == 0.0);
    const ClearedForm form{L, config.d_l, config.d_r};

    for (int n = 1; n <= n_modes; ++n) {
        double root = 0.0;
        if (dirichlet) {
            root = n * kPi / L;
        } else {
            double lo = (n == 1) ? 0.5 * kPi / (L + config.d_l + config.d_r)
                                 : (n - 1) * kPi / L;
            double hi = n * kPi / L;
            double flo = form.f(lo);
            double fhi = form.f(hi);
            if (!(flo * fhi < 0.0)) {
                std::ostringstream msg;
                msg << "solve_wavenumbers: no sign change on bracket [" << lo << ", "
                    << hi << "] for mode " << n << " (f = " << flo << ", " << fhi << ")";
                throw SolverError(msg.str(), std::min(std::abs(flo), std::abs(fhi)));
            }
            for (int iter = 0; iter < 200 && (hi - lo) > 4.0 * 1e-16 * hi; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = form.f(mid);
                if (fmid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fmid < 0.0) {
                    hi = mid;
                    fhi = fmid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            root = 0.5 * (lo + hi);
            for (int iter = 0; iter < 3; ++iter) {
                const double deriv = form.df(root);
                if (deriv == 0.0) break;
                const double next = root - form.f(root) / deriv;
                if (next <= (n - 1) * kPi / L || next > (n + 0.25) * kPi / L) break;
                root = next;
            }
            const double residual = std::abs(form.f(root));
            if (residual > 1e-12 * form.scale(root)) {
                std::ostringstream msg;
                msg << "solve_wavenumbers: residual " << residual << " above tolerance "
                    << "for mode " << n << " near k = " << root;
                throw SolverError(msg.str(), residual);
            }
        }
        basis.k[n - 1] = root;
        basis.delta[n - 1] = std::atan(config.d_l * root);
        basis.norm[n - 1] = normalization(root, L, basis.delta[n - 1]);
    }
    return basis;
}

BogoliubovTransform instantaneous_bogoliubov(const ModeBasis& from, const ModeBasis& to) {
    const int n = from.n_modes();
    if (n < 1 || to.n_modes() != n)
        throw std::invalid_argument("instantaneous_bogoliubov: mode count mismatch");
    if (std::abs(from.L_cav - to.L_cav) > 1e-12 * from.L_cav || from.c != to.c)
        throw std::invalid_argument("instantaneous_bogoliubov: bases over different cavities");

    const double L = from.L_cav;
    BogoliubovTransform out;
    out.alpha.resize(n, n);
    out.beta.resize(n, n);
    out.physical = true;

    for (int m = 0; m < n; ++m) {
        const double kp = to.k[m];
        const double dp = to.delta[m];
        for (int j = 0; j < n; ++j) {
            const double kn = from.k[j];
            const double dn = from.delta[j];
            const double dk = kp - kn;
            const double sk = kp + kn;
            const double d_minus = dp - dn;
            const double d_plus = dp + dn;
            const double pref = 0.5 * to.norm[m] * from.norm[j];

            // Exact product forms of the sine differences:
            //   sin(D- + dk L) - sin(D-) =  2 cos(D- + dk L/2) sin(dk L/2)
            //   sin(D+) - sin(D+ + sk L) = -2 cos(D+ + sk L/2) sin(sk L/2)
            const double cos_minus = std::cos(d_minus + 0.5 * dk * L);
            const double cos_plus = std::cos(d_plus + 0.5 * sk * L);
            const double sin_half_dk = std::sin(0.5 * dk * L);
            const double sin_half_sk = std::sin(0.5 * sk * L);

            const double alpha = pref * (sk * L * cos_minus * sinc(0.5 * dk * L) -
                                         2.0 * cos_plus * sin_half_sk);
            const double beta = pref * ((dk / sk) * 2.0 * cos_plus * sin_half_sk -
                                        2.0 * cos_minus * sin_half_dk);
            out.alpha(m, j) = alpha;
            out.beta(m, j) = beta;
        }
    }

    // As with any transform truncated from an infinite ladder, the highest
    // rows lose their cut-off neighbors, so the budget records the measured
    // loss instead of policing a fixed cap.
    out.identity_tolerance =
        std::max(BogoliubovTransform::default_tolerance(n), 2.0 * identity_defect(out));
    return out;
}

RobinEvolution evolve_robin(const RobinCavityConfig& config0,
                            const std::function<double(double)>& d_l,
                            const std::function<double(double)>& d_r, double T, double dt,
                            int n_modes, double phase_tol) {
    config0.validate();
    if (!(T > 0.0)) throw std::invalid_argument("evolve_robin: T must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_robin: dt must be positive");
    if (n_modes < 1) throw std::invalid_argument("evolve_robin: n_modes must be >= 1");
    if (std::abs(d_l(0.0) - config0.d_l) > 1e-9 * config0.L_cav ||
        std::abs(d_r(0.0) - config0.d_r) > 1e-9 * config0.L_cav)
        throw std::invalid_argument(
            "evolve_robin: boundary functions disagree with config0 at t = 0");

    auto basis_at = [&](double t) {
        RobinCavityConfig cfg = config0;
        cfg.d_l = d_l(t);
        cfg.d_r = d_r(t);
        return solve_wavenumbers(cfg, n_modes);
    };

    auto single_pass = [&](double step) {
        const long n_steps = std::max(1L, static_cast<long>(std::ceil(T / step - 1e-9)));
        const double h = T / n_steps;
        ModeBasis prev = solve_wavenumbers(config0, n_modes);
        BogoliubovTransform total = BogoliubovTransform::identity(n_modes);
        for (long i = 0; i < n_steps; ++i) {
            const double t_mid = (i + 0.5) * h;
            ModeBasis mid = basis_at(t_mid);
            BogoliubovTransform step_tf = instantaneous_bogoliubov(prev, mid);
            // Fold the diagonal free evolution exp(+i omega_m h) into the jump:
            // row-scaling by a unit-modulus diagonal preserves both identities.
            for (int m = 0; m < n_modes; ++m) {
                const std::complex<double> phase = std::polar(1.0, mid.k[m] * mid.c * h);
                step_tf.alpha.row(m) *= phase;
                step_tf.beta.row(m) *= phase;
            }
            total = compose(total, step_tf);
            prev = std::move(mid);
        }
        BogoliubovTransform closing = instantaneous_bogoliubov(prev, basis_at(T));
        total = compose(total, closing);
        return std::pair<BogoliubovTransform, long>(std::move(total), n_steps);
    };

    auto coarse = single_pass(dt);
    auto fine = single_pass(0.5 * dt);
    const double delta = std::abs(
        std::remainder(clock_phase(coarse.first) - clock_phase(fine.first), 2.0 * kPi));
    if (phase_tol > 0.0 && delta > phase_tol)
        throw RefinementError(
            "evolve_robin: clock phase not converged at this dt; use a smaller step",
            delta);

    RobinEvolution out;
    out.transform = std::move(fine.first);
    out.dt = T / coarse.second;
    out.n_steps = coarse.second;
    out.clock_phase_delta = delta;
    return out;
}

RobinEvolution evolve_robin_converged(const RobinCavityConfig& config0,
                                      const std::function<double(double)>& d_l,
                                      const std::function<double(double)>& d_r, double T,
                                      double dt0, int n_modes, double phase_tol) {
    if (!(phase_tol > 0.0))
        throw std::invalid_argument("evolve_robin_converged: phase_tol must be positive");
    double step = dt0;
    RobinEvolution ev;
    for (int attempt = 0; attempt < 9; ++attempt) {
        ev = evolve_robin(config0, d_l, d_r, T, step, n_modes, 0.0);
        if (ev.clock_phase_delta < phase_tol)
            return ev;
        step *= 0.5;
    }
    throw RefinementError(
        "evolve_robin_converged: step refinement exhausted without phase convergence",
        ev.clock_phase_delta);
}

TripBoundaryDrive trip_boundary_drive(const TrajectoryPlan& plan,
                                      const PhysicalConstants& constants) {
    constants.validate();
    const double dL_min = constants.delta_L_min();
    const double dL_max = dL_min + plan.d_cav();
    const double L_cav = plan.L - dL_min - dL_max;
    if (!(L_cav > 0.0))
        throw std::invalid_argument(
            "trip_boundary_drive: cavity too short for the boundary lengths");

    const auto x0 = mirror_positions(plan, 0.0);

    TripBoundaryDrive drive;
    drive.config0.L_cav = L_cav;
    drive.config0.d_l = dL_max;
    drive.config0.d_r = dL_min;
    drive.config0.constants = constants;
    drive.d_l = [plan, x0, dL_max](double t) {
        return dL_max - (mirror_positions(plan, t).first - x0.first);
    };
    drive.d_r = [plan, x0, dL_min](double t) {
        return dL_min + (mirror_positions(plan, t).second - x0.second);
    };
    drive.thin_boundary_warning = (dL_max / L_cav > 0.1);
    return drive;
}

RobinTripResult simulate_trip_robin(const TrajectoryPlan& plan,
                                    const PhysicalConstants& constants, double dt,
                                    int n_modes, double phase_tol) {
    const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
    const RobinCavityConfig& config0 = drive.config0;

    const ModeBasis basis0 = solve_wavenumbers(config0, n_modes);
    const double omega_R1 = basis0.omega(1);
    const double omega_D1 = kPi * plan.c / plan.L;
    const double T = plan.trip_duration();

    const double step = (dt > 0.0) ? dt : std::min(2.0 * kPi / omega_R1, plan.t_a) / 200.0;
    RobinEvolution ev =
        evolve_robin_converged(config0, drive.d_l, drive.d_r, T, step, n_modes, phase_tol);

    RobinTripResult out;
    const double principal = clock_phase(ev.transform);
    const double theta_raw = unwrap_near(-omega_R1 * T, principal);
    out.transform = std::move(ev.transform);
    out.phases = PhaseRecord::relative_to_static(theta_raw, omega_D1, T);
    out.theta_rel_robin_ref = theta_raw + omega_R1 * T;
    out.omega_R1 = omega_R1;
    out.omega_D1 = omega_D1;
    out.config0 = config0;
    out.dt_used = 0.5 * ev.dt;
    out.n_steps = 2 * ev.n_steps;
    out.refine_delta = ev.clock_phase_delta;
    out.thin_boundary_warning = drive.thin_boundary_warning;
    return out;
}

} // namespace cavsim
