#include "cavsim/rindler_cavity.hpp"

#include "cavsim/kg_inner_product.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cavsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_mode_count(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
}

// Cache key: exact bit patterns of (h, quad_tol) plus the mode count.
using SegmentKey = std::tuple<std::uint64_t, std::uint64_t, int>;

std::uint64_t double_bits(double x) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    return bits;
}

// The overlap integrals depend on a, L, c only through h, so they are
// evaluated once on a canonical instantiation c = 1, L = 1, a = h. The
// junction slice is parameterized by the chart coordinate xi in
// [ln(g-)/h, ln(g+)/h]; the inertial position on the slice is X(xi) =
// e^{h xi}/h, the measure dX/dxi = e^{h xi}, and the lapse folds into the
// chart mode's time derivative as e^{-h xi}.
BogoliubovTransform compute_segment(double h, int n_modes, double quad_tol) {
    const double xi_l = std::log1p(-0.5 * h) / h;
    const double xi_r = std::log1p(0.5 * h) / h;
    const double L_prime = xi_r - xi_l;

    SliceSurface surface;
    surface.s_min = xi_l;
    surface.s_max = xi_r;
    surface.measure = [h](double xi) { return std::exp(h * xi); };
    surface.c = 1.0;

    // Inertial position relative to the left mirror, with the e^{h xi} - g-
    // cancellation at small h removed: X(xi) - x_l = expm1(h xi)/h + 1/2.
    auto rel_position = [h](double xi) { return std::expm1(h * xi) / h + 0.5; };

    BogoliubovTransform out;
    out.alpha.resize(n_modes, n_modes);
    out.beta.resize(n_modes, n_modes);
    out.identity_tolerance = BogoliubovTransform::default_tolerance(n_modes);
    out.physical = true;

    const std::complex<double> i_unit(0.0, 1.0);
    for (int m = 1; m <= n_modes; ++m) {
        const double Omega_m = kPi * m / L_prime;
        const double norm_m = 1.0 / std::sqrt(kPi * m);
        SliceMode chart_mode;
        chart_mode.support_min = xi_l;
        chart_mode.support_max = xi_r;
        chart_mode.value = [=](double xi) {
            return std::complex<double>(norm_m * std::sin(Omega_m * (xi - xi_l)), 0.0);
        };
        chart_mode.time_deriv = [=](double xi) {
            return -i_unit * Omega_m * std::exp(-h * xi) * norm_m *
                   std::sin(Omega_m * (xi - xi_l));
        };

        for (int n = 1; n <= n_modes; ++n) {
            const double omega_n = kPi * n;
            const double norm_n = 1.0 / std::sqrt(kPi * n);
            SliceMode inertial_mode;
            inertial_mode.support_min = xi_l;
            inertial_mode.support_max = xi_r;
            inertial_mode.value = [=](double xi) {
                return std::complex<double>(norm_n * std::sin(omega_n * rel_position(xi)),
                                            0.0);
            };
            inertial_mode.time_deriv = [=](double xi) {
                return -i_unit * omega_n * norm_n * std::sin(omega_n * rel_position(xi));
            };
            SliceMode inertial_conj = inertial_mode;
            inertial_conj.time_deriv = [=](double xi) {
                return i_unit * omega_n * norm_n * std::sin(omega_n * rel_position(xi));
            };

            out.alpha(m - 1, n - 1) =
                kg_inner_product(chart_mode, inertial_mode, surface, quad_tol);
            out.beta(m - 1, n - 1) =
                -kg_inner_product(chart_mode, inertial_conj, surface, quad_tol);
        }
    }
    // The highest rows of any finite slice of the junction matrix lose the
    // neighbors cut off by the ladder, so the global defect is an honest
    // truncation measure, not a bug budget. Low-mode observables converge as
    // n_modes grows; identity_defect(t, corner) reports the converged part.
    out.identity_tolerance = std::max(out.identity_tolerance, 2.0 * identity_defect(out));
    return out;
}

} // namespace

double DirichletBasis::omega(int n) const {
    if (n < 1 || n > n_modes) throw std::out_of_range("DirichletBasis::omega: bad index");
    return kPi * n * c / L;
}

double RindlerBasis::Omega(int m) const {
    if (m < 1 || m > n_modes) throw std::out_of_range("RindlerBasis::Omega: bad index");
    return kPi * m * c / L_prime;
}

BogoliubovTransform segment_transform(double h, int n_modes, double quad_tol) {
    if (!(h > 0.0 && h < 2.0))
        throw std::invalid_argument("segment_transform: h must lie in (0, 2)");
    require_mode_count(n_modes);
    if (!(quad_tol > 0.0))
        throw std::invalid_argument("segment_transform: quad_tol must be positive");

    static std::map<SegmentKey, BogoliubovTransform> cache;
    static std::mutex cache_mutex;
    const SegmentKey key{double_bits(h), double_bits(quad_tol), n_modes};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    BogoliubovTransform result = compute_segment(h, n_modes, quad_tol);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache.emplace(key, result);
    }
    return result;
}

BogoliubovTransform parity_conjugate(const BogoliubovTransform& t) {
    BogoliubovTransform out = t;
    const int n = t.n_modes();
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            if ((m + k) % 2 != 0) {
                out.alpha(m, k) = -out.alpha(m, k);
                out.beta(m, k) = -out.beta(m, k);
            }
        }
    }
    return out;
}

BogoliubovTransform trip_transform(const TrajectoryPlan& plan, int n_modes,
                                   double quad_tol) {
    require_mode_count(n_modes);
    const double h = plan.h();
    const double eta_a = rindler_segment_duration(plan, plan.t_a);
    const double L_prime = rindler_length(plan);

    std::vector<double> Omega(n_modes);
    for (int m = 1; m <= n_modes; ++m) Omega[m - 1] = kPi * m * plan.c / L_prime;

    const BogoliubovTransform S = segment_transform(h, n_modes, quad_tol);
    const BogoliubovTransform S_inv = inverse(S);
    const BogoliubovTransform S_back = parity_conjugate(S);
    const BogoliubovTransform S_back_inv = parity_conjugate(S_inv);

    BogoliubovTransform total = compose(S, free_evolution(Omega, eta_a));
    total = compose(total, S_inv);
    total = compose(total, S_back);
    total = compose(total, free_evolution(Omega, 2.0 * eta_a));
    total = compose(total, S_back_inv);
    total = compose(total, S);
    total = compose(total, free_evolution(Omega, eta_a));
    total = compose(total, S_inv);
    return total;
}

PhaseRecord trip_phase_record(const TrajectoryPlan& plan, int n_modes, double quad_tol) {
    const BogoliubovTransform trip = trip_transform(plan, n_modes, quad_tol);
    const double omega_1 = kPi * plan.c / plan.L;
    const double T = plan.trip_duration();
    const double raw = unwrap_near(-omega_1 * T, clock_phase(trip));
    return PhaseRecord::relative_to_static(raw, omega_1, T);
}

double single_mode_phase(const TrajectoryPlan& plan) {
    const double omega_1 = kPi * plan.c / plan.L;
    const double Omega_1 = kPi * plan.c / rindler_length(plan);
    const double eta_total = 4.0 * rindler_segment_duration(plan, plan.t_a);
    return omega_1 * plan.trip_duration() - Omega_1 * eta_total;
}

double ideal_clock_phase(const TrajectoryPlan& plan, double omega_ref) {
    return omega_ref * (plan.trip_duration() - proper_time_round_trip(plan));
}

} // namespace cavsim
