#include "cavsim/fdtd.hpp"

#include "cavsim/bogoliubov.hpp"
#include "cavsim/errors.hpp"
#include "cavsim/robin_cavity.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

using namespace cavsim;

constexpr double kPi = 3.14159265358979323846;

RobinCavityConfig unit_config(double d_l, double d_r) {
    RobinCavityConfig cfg;
    cfg.L_cav = 1.0;
    cfg.d_l = d_l;
    cfg.d_r = d_r;
    cfg.constants.c = 1.0;
    return cfg;
}

std::vector<double> ladder(const ModeBasis& basis) {
    std::vector<double> omega(basis.n_modes());
    for (int n = 1; n <= basis.n_modes(); ++n) omega[n - 1] = basis.omega(n);
    return omega;
}

double max_diff(const BogoliubovTransform& a, const BogoliubovTransform& b) {
    return std::max((a.alpha - b.alpha).cwiseAbs().maxCoeff(),
                    (a.beta - b.beta).cwiseAbs().maxCoeff());
}

} // namespace

TEST_SUITE("fdtd") {

TEST_CASE("static boundaries reproduce free phase evolution at second order") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    auto dl = [](double) { return 0.05; };
    auto dr = [](double) { return 0.04; };
    const double T = 0.37;
    const BogoliubovTransform fe = free_evolution(ladder(solve_wavenumbers(cfg, 3)), T);

    const FdtdResult coarse = fdtd_oracle(cfg, dl, dr, T, 200, 3);
    const FdtdResult fine = fdtd_oracle(cfg, dl, dr, T, 400, 3);
    CHECK(fine.dx == doctest::Approx(1.0 / 400.0).epsilon(1e-12));
    CHECK(fine.dt == doctest::Approx(0.5 * fine.dx).epsilon(1e-12));

    const double err_coarse = max_diff(coarse.transform, fe);
    const double err_fine = max_diff(fine.transform, fe);
    CHECK(err_fine < 1e-3);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("boundary jump then coasting matches the composed transform") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    const double T = 0.02;
    auto dl = [](double t) { return t <= 0.0 ? 0.05 : 0.08; };
    auto dr = [](double) { return 0.04; };

    const ModeBasis before = solve_wavenumbers(cfg, 3);
    const ModeBasis after = solve_wavenumbers(unit_config(0.08, 0.04), 3);
    const BogoliubovTransform jump = instantaneous_bogoliubov(before, after);
    const BogoliubovTransform coast = free_evolution(ladder(after), T);
    const BogoliubovTransform reference = compose(jump, coast);

    const FdtdResult res = fdtd_oracle(cfg, dl, dr, T, 1500, 3);
    CHECK(max_diff(res.transform, reference) < 1e-3);
}

TEST_CASE("smooth drive agrees with the mode-space evolution") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    const double T = 1.0;
    auto dl = [T](double t) { return 0.05 + 0.01 * std::sin(2.0 * kPi * t / T); };
    auto dr = [T](double t) { return 0.04 - 0.008 * std::sin(kPi * t / T); };

    auto corner4 = [](const BogoliubovTransform& a, const BogoliubovTransform& b) {
        return std::max(
            (a.alpha.topLeftCorner(4, 4) - b.alpha.topLeftCorner(4, 4)).cwiseAbs().maxCoeff(),
            (a.beta.topLeftCorner(4, 4) - b.beta.topLeftCorner(4, 4)).cwiseAbs().maxCoeff());
    };

    // This drive mixes modes up the ladder (its two tones sit near mode gaps),
    // so a 4-mode evolution carries a few-e-3 truncation offset that the grid,
    // which propagates the full field, does not share. The grid is compared
    // against a wide ladder and its error shrinks with refinement toward the
    // wide ladder's own truncation floor.
    const RobinEvolution ev4 = evolve_robin(cfg, dl, dr, T, T / 2000.0, 4);
    const RobinEvolution ev12 = evolve_robin(cfg, dl, dr, T, T / 2000.0, 12);
    const double trunc4 = corner4(ev4.transform, ev12.transform);
    CHECK(trunc4 > 1e-3);
    CHECK(trunc4 < 1e-2);

    const FdtdResult coarse = fdtd_oracle(cfg, dl, dr, T, 600, 4);
    const FdtdResult fine = fdtd_oracle(cfg, dl, dr, T, 2400, 4);
    const double err_coarse = corner4(coarse.transform, ev12.transform);
    const double err_fine = corner4(fine.transform, ev12.transform);
    CHECK(err_coarse < 2.5e-4);
    CHECK(err_fine < 1e-4);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 1.8);
    CHECK(ratio < 8.0);
}

TEST_CASE("parametric drive at twice the fundamental pumps pairs") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    const double omega_1 = solve_wavenumbers(cfg, 1).omega(1);
    const double T = 30.0 / omega_1;
    // Drive gently: on resonance the odd modes chain into an upward cascade,
    // and a strong pump pushes real amplitude past any projection cutoff.
    auto run = [&](double drive) {
        auto dl = [=](double t) { return 0.05 + 0.003 * std::sin(drive * t); };
        auto dr = [](double) { return 0.04; };
        const FdtdResult res = fdtd_oracle(cfg, dl, dr, T, 600, 2);
        return std::abs(res.transform.beta(0, 0));
    };
    const double resonant = run(2.0 * omega_1);
    const double detuned = run(2.7 * omega_1);
    CHECK(resonant > 3.0 * detuned);
}

TEST_CASE("grid coarser than the boundary lengths is rejected") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    auto dl = [](double) { return 0.05; };
    auto dr = [](double) { return 0.04; };
    CHECK_THROWS_AS(fdtd_oracle(cfg, dl, dr, 0.1, 10, 2), ConfigError);
}

TEST_CASE("differential phase matches the ladder and is grid-stable") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    const double T = 1.0;
    auto dl = [T](double t) { return 0.05 + 0.01 * std::sin(2.0 * kPi * t / T); };
    auto dr = [T](double t) { return 0.04 - 0.008 * std::sin(kPi * t / T); };

    // Ladder reference: drive-induced clock phase with the rest phase
    // removed analytically (a constant drive leaves only the free phases).
    const double omega_1 = solve_wavenumbers(cfg, 1).omega(1);
    const RobinEvolution ev = evolve_robin(cfg, dl, dr, T, T / 2000.0, 12);
    const double ladder_shift =
        std::remainder(clock_phase(ev.transform) + omega_1 * T, 2.0 * kPi);

    const double shift = robin_phase_shift_fdtd(cfg, dl, dr, T);
    CHECK(std::abs(shift) > 1e-3);
    CHECK(std::abs(shift - ladder_shift) < 5e-5);

    // The rest-referenced difference cancels the bulk dispersion error, so
    // doubling the grid moves the result by far less than the absolute phase
    // error of either run.
    const double doubled = robin_phase_shift_fdtd(cfg, dl, dr, T, 2048);
    CHECK(std::abs(doubled - shift) < 5e-7);
}

TEST_CASE("differential phase rejects bad drives and durations") {
    const RobinCavityConfig cfg = unit_config(0.05, 0.04);
    auto dr = [](double) { return 0.04; };
    auto dl_zero = [](double t) { return 0.05 * (1.0 - t); };
    CHECK_THROWS_AS(robin_phase_shift_fdtd(cfg, dl_zero, dr, 1.0), ConfigError);

    const RobinCavityConfig thin = unit_config(1e-6, 0.04);
    auto dl_thin = [](double) { return 1e-6; };
    CHECK_THROWS_AS(robin_phase_shift_fdtd(thin, dl_thin, dr, 1.0), ConfigError);

    auto dl = [](double) { return 0.05; };
    CHECK_THROWS_AS(robin_phase_shift_fdtd(cfg, dl, dr, 0.0), std::invalid_argument);
}

} // TEST_SUITE
