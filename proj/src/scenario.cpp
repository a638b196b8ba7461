#include "cavsim/scenario.hpp"

#include "cavsim/bogoliubov.hpp"
#include "cavsim/errors.hpp"
#include "cavsim/fdtd.hpp"
#include "cavsim/fourier_flux.hpp"
#include "cavsim/rindler_cavity.hpp"
#include "cavsim/robin_cavity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cavsim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegPerRad = 180.0 / kPi;

// Relative phase errors below this raw-phase magnitude are reported as
// invalid instead of amplifying numerical noise. The value matches the
// mode-ladder reference, whose refinement scatter sits around 1e-9 rad.
constexpr double kEpsilonFloorRad = 1e-6;

// Matching floor for ratios referenced to the finite-difference differential
// phase, which reproduces across grids to about 1e-13 rad; three decades of
// margin on top of that.
constexpr double kEpsilonFloorFdtdRad = 1e-10;

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string format_value(long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%ld", v);
    return buf;
}

void add_meta(ScenarioResult& r, const std::string& key, const std::string& value) {
    r.metadata.emplace_back(key, value);
}

void add_meta(ScenarioResult& r, const std::string& key, double value) {
    r.metadata.emplace_back(key, format_value(value));
}

void add_meta(ScenarioResult& r, const std::string& key, long value) {
    r.metadata.emplace_back(key, format_value(value));
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
    std::vector<double> out(static_cast<size_t>(n));
    const double f = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = lo * std::exp(f * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> lin_spaced(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2)
        throw std::invalid_argument("lin_spaced: need lo < hi and n >= 2");
    std::vector<double> out(static_cast<size_t>(n));
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

// n-trip clock phase by stepwise composition. Unwrapping against the linear
// extrapolation of the previous total keeps the branch correct even when the
// accumulated drift grows beyond pi over the whole run.
double accumulate_phase(const BogoliubovTransform& single, double raw_single,
                        long trips) {
    if (trips < 1) throw std::invalid_argument("accumulate_phase: trips must be >= 1");
    BogoliubovTransform total = single;
    double raw = raw_single;
    for (long k = 2; k <= trips; ++k) {
        total = compose(total, single);
        raw = unwrap_near(raw + raw_single, clock_phase(total));
    }
    return raw;
}

struct EpsilonValue {
    double value = 0.0;
    bool valid = false;
};

EpsilonValue epsilon_of(double theta_D, double theta_R,
                        double floor = kEpsilonFloorRad) {
    EpsilonValue e;
    e.valid = std::abs(theta_D) >= floor;
    e.value = e.valid ? (theta_D - theta_R) / theta_D : 0.0;
    return e;
}

PhysicalConstants constants_for(double c, double delta_L_min) {
    PhysicalConstants constants;
    constants.c = c;
    if (delta_L_min > 0.0) constants = constants.with_delta_L_min(delta_L_min);
    constants.validate();
    return constants;
}

// Boundary drives reconstructed from truncated Fourier flux series, fitted to
// the exact trip drive sampled over one period.
struct FittedDrive {
    std::function<double(double)> d_l;
    std::function<double(double)> d_r;
    FourierFlux flux_l;
    FourierFlux flux_r;
};

FittedDrive fit_trip_drive(const TripBoundaryDrive& exact, double period,
                           const PhysicalConstants& constants, int n_harmonics) {
    const int samples = std::max(64 * n_harmonics, 1024);
    std::vector<double> flux_l(static_cast<size_t>(samples));
    std::vector<double> flux_r(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double t = period * i / samples;
        flux_l[static_cast<size_t>(i)] = flux_for_length(exact.d_l(t), constants);
        flux_r[static_cast<size_t>(i)] = flux_for_length(exact.d_r(t), constants);
    }
    FittedDrive out;
    out.flux_l = fit_flux(flux_l, period, n_harmonics, constants);
    out.flux_r = fit_flux(flux_r, period, n_harmonics, constants);
    const FourierFlux fl = out.flux_l;
    const FourierFlux fr = out.flux_r;
    out.d_l = [fl, constants](double t) { return delta_L_eff(fl.evaluate(t), constants); };
    out.d_r = [fr, constants](double t) { return delta_L_eff(fr.evaluate(t), constants); };
    return out;
}

// Robin trip driven by a fitted flux series; the phase is referenced to the
// exact resting cavity so that truncation shows up as a phase error.
double fitted_trip_phase(const TripBoundaryDrive& exact, const FittedDrive& fitted,
                         double T, double omega_R1_exact, double dt, int n_modes,
                         double phase_tol) {
    RobinCavityConfig config0 = exact.config0;
    config0.d_l = fitted.d_l(0.0);
    config0.d_r = fitted.d_r(0.0);
    const double dt0 =
        (dt > 0.0) ? dt : std::min(2.0 * kPi / omega_R1_exact, 0.25 * T) / 200.0;
    const RobinEvolution ev = evolve_robin_converged(config0, fitted.d_l, fitted.d_r, T,
                                                     dt0, n_modes, phase_tol);
    const double raw = unwrap_near(-omega_R1_exact * T, clock_phase(ev.transform));
    return raw + omega_R1_exact * T;
}

struct SweepPreset {
    double t_a = 0.0;
    double L = 0.0;
    double c = 1.19e8;
    double delta_L_min = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;
    int points = 0;
    int n_modes = 20;
    double phase_tol = 1e-6;
    bool robin = false;
};

void apply_overrides(SweepPreset& p, const RunOptions& options) {
    if (options.n_modes > 0) p.n_modes = options.n_modes;
    if (options.c > 0.0) p.c = options.c;
    if (options.points > 0) p.points = options.points;
}

void add_common_meta(ScenarioResult& r, const std::string& name, const SweepPreset& p) {
    add_meta(r, "figure", name);
    add_meta(r, "t_a_s", p.t_a);
    add_meta(r, "L_m", p.L);
    add_meta(r, "c_m_per_s", p.c);
    add_meta(r, "n_modes", static_cast<long>(p.n_modes));
    if (p.robin) {
        add_meta(r, "delta_L_min_m", p.delta_L_min);
        add_meta(r, "phase_tol_rad", p.phase_tol);
    }
}

// Dirichlet-side h sweep: exact trip phase vs the single-mode and point-clock
// references.
ScenarioResult dirichlet_sweep_table(const SweepPreset& p) {
    ScenarioResult r;
    r.columns = {"h", "theta_full_deg", "theta_single_deg", "theta_ideal_deg"};
    const std::vector<double> grid = log_spaced(p.h_min, p.h_max, p.points);
    for (double h : grid) {
        const TrajectoryPlan plan = TrajectoryPlan::from_h(h, p.t_a, p.L, p.c);
        const double omega_D1 = kPi * plan.c / plan.L;
        const PhaseRecord rec = trip_phase_record(plan, p.n_modes);
        r.rows.push_back({h, rec.theta_rel * kDegPerRad,
                          single_mode_phase(plan) * kDegPerRad,
                          ideal_clock_phase(plan, omega_D1) * kDegPerRad});
    }
    // Mode-truncation check at the strongest drive.
    const TrajectoryPlan top = TrajectoryPlan::from_h(p.h_max, p.t_a, p.L, p.c);
    const double at_n = trip_phase_record(top, p.n_modes).theta_rel;
    const double at_2n = trip_phase_record(top, 2 * p.n_modes).theta_rel;
    add_meta(r, "theta_full_shift_2x_modes_rad", std::abs(at_2n - at_n));
    return r;
}

// Robin-vs-Dirichlet h sweep (one circuit trip per point). The epsilon column
// references the finite-difference circuit phase: the mode-ladder value
// theta_R_deg carries a truncation tail falling off only as 1/n_modes for
// these derivative-coupled drives, large enough to swamp the physical error,
// so the ladder phase is reported alongside but not used in epsilon.
ScenarioResult robin_sweep_table(const SweepPreset& p, double dt, bool check_robin_modes) {
    ScenarioResult r;
    r.columns = {"h",           "theta_D_deg",      "theta_R_deg",
                 "theta_R_fdtd_deg", "theta_single_deg", "theta_ideal_deg",
                 "epsilon",     "epsilon_valid"};
    const PhysicalConstants constants = constants_for(p.c, p.delta_L_min);
    const std::vector<double> grid = log_spaced(p.h_min, p.h_max, p.points);
    bool thin_warning = false;
    double dt_top = 0.0;
    double refine_top = 0.0;
    for (double h : grid) {
        const TrajectoryPlan plan = TrajectoryPlan::from_h(h, p.t_a, p.L, p.c);
        const double omega_D1 = kPi * plan.c / plan.L;
        const double theta_D = trip_phase_record(plan, p.n_modes).theta_rel;
        const RobinTripResult trip =
            simulate_trip_robin(plan, constants, dt, p.n_modes, p.phase_tol);
        const double theta_R = trip.theta_rel_robin_ref;
        const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
        const double theta_fdtd = robin_phase_shift_fdtd(drive.config0, drive.d_l,
                                                         drive.d_r, plan.trip_duration());
        const EpsilonValue eps = epsilon_of(theta_D, theta_fdtd, kEpsilonFloorFdtdRad);
        thin_warning = thin_warning || trip.thin_boundary_warning;
        dt_top = trip.dt_used;
        refine_top = trip.refine_delta;
        r.rows.push_back({h, theta_D * kDegPerRad, theta_R * kDegPerRad,
                          theta_fdtd * kDegPerRad, single_mode_phase(plan) * kDegPerRad,
                          ideal_clock_phase(plan, omega_D1) * kDegPerRad, eps.value,
                          eps.valid ? 1.0 : 0.0});
    }
    add_meta(r, "epsilon_reference", "theta_R_fdtd");
    add_meta(r, "thin_boundary_warning", static_cast<long>(thin_warning ? 1 : 0));
    add_meta(r, "dt_used_at_h_max_s", dt_top);
    add_meta(r, "refine_delta_at_h_max_rad", refine_top);

    // Mode-truncation checks at the strongest drive.
    const TrajectoryPlan top = TrajectoryPlan::from_h(p.h_max, p.t_a, p.L, p.c);
    const double d_n = trip_phase_record(top, p.n_modes).theta_rel;
    const double d_2n = trip_phase_record(top, 2 * p.n_modes).theta_rel;
    add_meta(r, "theta_D_shift_2x_modes_rad", std::abs(d_2n - d_n));
    if (check_robin_modes) {
        const double r_n = simulate_trip_robin(top, constants, dt, p.n_modes, p.phase_tol)
                               .theta_rel_robin_ref;
        const double r_2n =
            simulate_trip_robin(top, constants, dt, 2 * p.n_modes, p.phase_tol)
                .theta_rel_robin_ref;
        add_meta(r, "theta_R_shift_2x_modes_rad", std::abs(r_2n - r_n));
    }
    return r;
}

ScenarioResult fig1_table(const RunOptions& options) {
    SweepPreset p;
    p.t_a = 1e-9;
    p.L = 0.011;
    p.h_min = 5e-5;
    p.h_max = 1e-3;
    p.points = 17;
    apply_overrides(p, options);
    ScenarioResult r = dirichlet_sweep_table(p);
    add_common_meta(r, "fig1", p);
    // The travel distance quoted for this geometry matches a faster waveguide
    // speed; both readings are recorded.
    const double alt_c = 1.36e8;
    add_meta(r, "d_cav_at_h_max_m",
             TrajectoryPlan::from_h(p.h_max, p.t_a, p.L, p.c).d_cav());
    add_meta(r, "alt_c_m_per_s", alt_c);
    add_meta(r, "d_cav_at_h_max_alt_c_m",
             TrajectoryPlan::from_h(p.h_max, p.t_a, p.L, alt_c).d_cav());
    return r;
}

ScenarioResult fig4_table(const RunOptions& options) {
    SweepPreset p;
    p.t_a = 1e-9;
    p.L = 0.122;
    p.delta_L_min = 7.5e-6;
    p.h_min = 1e-4;
    p.h_max = 2e-3;
    p.points = 13;
    p.phase_tol = 1e-9;
    p.robin = true;
    apply_overrides(p, options);
    ScenarioResult r = robin_sweep_table(p, options.dt, true);
    add_common_meta(r, "fig4", p);
    return r;
}

ScenarioResult fig5_table(const RunOptions& options) {
    SweepPreset p;
    p.t_a = 1e-10;
    p.L = 0.095;
    p.delta_L_min = 7.5e-6;
    p.h_min = 1e-3;
    p.h_max = 3e-2;
    p.points = 13;
    p.phase_tol = 1e-11;
    p.robin = true;
    apply_overrides(p, options);
    ScenarioResult r = robin_sweep_table(p, options.dt, false);
    add_common_meta(r, "fig5", p);
    return r;
}

ScenarioResult fourier_sweep_table(const SweepPreset& p, const std::vector<int>& harmonics,
                                   double dt) {
    ScenarioResult r;
    r.columns = {"h", "theta_D_deg", "theta_R_exact_deg"};
    for (int n : harmonics) r.columns.push_back("theta_R_N" + std::to_string(n) + "_deg");

    const PhysicalConstants constants = constants_for(p.c, p.delta_L_min);
    const std::vector<double> grid = log_spaced(p.h_min, p.h_max, p.points);
    double residual_l_top = 0.0;
    double residual_r_top = 0.0;
    for (double h : grid) {
        const TrajectoryPlan plan = TrajectoryPlan::from_h(h, p.t_a, p.L, p.c);
        const double T = plan.trip_duration();
        const double theta_D = trip_phase_record(plan, p.n_modes).theta_rel;
        const RobinTripResult exact_trip =
            simulate_trip_robin(plan, constants, dt, p.n_modes, p.phase_tol);
        std::vector<double> row = {h, theta_D * kDegPerRad,
                                   exact_trip.theta_rel_robin_ref * kDegPerRad};
        const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
        for (int n : harmonics) {
            const FittedDrive fitted = fit_trip_drive(drive, T, constants, n);
            row.push_back(fitted_trip_phase(drive, fitted, T, exact_trip.omega_R1, dt,
                                            p.n_modes, p.phase_tol) *
                          kDegPerRad);
            if (h == grid.back() && n == harmonics.back()) {
                residual_l_top = fitted.flux_l.residual_rms;
                residual_r_top = fitted.flux_r.residual_rms;
            }
        }
        r.rows.push_back(std::move(row));
    }
    for (int n : harmonics)
        add_meta(r, "budget_N" + std::to_string(n) + "_Hz", harmonic_budget(p.t_a, n));
    add_meta(r, "residual_rms_left_at_h_max_m", residual_l_top);
    add_meta(r, "residual_rms_right_at_h_max_m", residual_r_top);
    return r;
}

ScenarioResult fig6_table(const RunOptions& options) {
    SweepPreset p;
    p.t_a = 1e-10;
    p.L = 0.0238;
    p.delta_L_min = 7.5e-6;
    p.h_min = 1e-3;
    p.h_max = 3e-2;
    p.points = 7;
    p.phase_tol = 1e-9;
    p.robin = true;
    apply_overrides(p, options);
    ScenarioResult r = fourier_sweep_table(p, {2, 4, 6, 10}, options.dt);
    add_common_meta(r, "fig6", p);
    return r;
}

ScenarioResult resonance_figure(const RunOptions& options, const char* name, double h,
                                long trips, double h_alt) {
    const double t_a = 1e-10;
    const double c = (options.c > 0.0) ? options.c : 1.19e8;
    const int n_modes = (options.n_modes > 0) ? options.n_modes : 20;
    const int points = (options.points > 0) ? options.points : 49;
    ScenarioResult r = resonance_scan(t_a, h, c, 0.019, 0.0286, points, trips, n_modes);
    add_meta(r, "figure", std::string(name));
    if (h_alt > 0.0) add_meta(r, "h_alt_reading", h_alt);

    // Circuit fidelity at the scanned peak.
    const int peak_col = r.column_index("dtheta_nonadiabatic_deg");
    size_t peak_row = 0;
    for (size_t i = 1; i < r.rows.size(); ++i) {
        if (std::abs(r.rows[i][static_cast<size_t>(peak_col)]) >
            std::abs(r.rows[peak_row][static_cast<size_t>(peak_col)]))
            peak_row = i;
    }
    const double L_peak = r.rows[peak_row][0];
    const TrajectoryPlan plan = TrajectoryPlan::from_h(h, t_a, L_peak, c);
    add_meta(r, "epsilon_delta_L_min_m", 7.5e-6);
    add_meta(r, "epsilon_per_trip_at_peak", trip_epsilon_fdtd(plan, 7.5e-6, n_modes));
    return r;
}

const char* scenario_kind_name(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::dirichlet_sweep: return "dirichlet_sweep";
    case ScenarioKind::robin_trip: return "robin_trip";
    case ScenarioKind::fourier_compare: return "fourier_compare";
    case ScenarioKind::resonance_scan: return "resonance_scan";
    case ScenarioKind::repeat_trips: return "repeat_trips";
    }
    return "unknown";
}

[[noreturn]] void config_fail(int line, const std::string& message) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << message;
    throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, int line, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty())
        config_fail(line, "invalid number for '" + key + "': " + value);
    return v;
}

long parse_long(const std::string& value, int line, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value.empty())
        config_fail(line, "invalid integer for '" + key + "': " + value);
    return v;
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    config_fail(line, "invalid boolean for '" + key + "' (use true/false/1/0): " + value);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

int ScenarioResult::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

FigureId figure_from_string(const std::string& name) {
    if (name == "fig1" || name == "1") return FigureId::fig1;
    if (name == "fig4" || name == "4") return FigureId::fig4;
    if (name == "fig5" || name == "5") return FigureId::fig5;
    if (name == "fig6" || name == "6") return FigureId::fig6;
    if (name == "fig7" || name == "7") return FigureId::fig7;
    if (name == "fig8" || name == "8") return FigureId::fig8;
    throw ConfigError("unknown figure '" + name +
                      "' (expected fig1, fig4, fig5, fig6, fig7 or fig8)");
}

std::string figure_name(FigureId id) {
    switch (id) {
    case FigureId::fig1: return "fig1";
    case FigureId::fig4: return "fig4";
    case FigureId::fig5: return "fig5";
    case FigureId::fig6: return "fig6";
    case FigureId::fig7: return "fig7";
    case FigureId::fig8: return "fig8";
    }
    return "unknown";
}

ScenarioResult reproduce_figure(FigureId id, const RunOptions& options) {
    switch (id) {
    case FigureId::fig1: return fig1_table(options);
    case FigureId::fig4: return fig4_table(options);
    case FigureId::fig5: return fig5_table(options);
    case FigureId::fig6: return fig6_table(options);
    case FigureId::fig7: return resonance_figure(options, "fig7", 0.85e-2, 200, 0.0);
    case FigureId::fig8: return resonance_figure(options, "fig8", 3.4e-2, 500, 0.34e-2);
    }
    throw std::logic_error("reproduce_figure: unhandled figure id");
}

RepeatedTripPhases repeated_trip_phases(const TrajectoryPlan& plan, long trips,
                                        int n_modes) {
    if (trips < 1)
        throw std::invalid_argument("repeated_trip_phases: trips must be >= 1");
    const double omega_D1 = kPi * plan.c / plan.L;
    const double T = plan.trip_duration();
    const BogoliubovTransform single = trip_transform(plan, n_modes);
    const BogoliubovTransform stripped = strip_particle_creation(single);
    const double raw_full = unwrap_near(-omega_D1 * T, clock_phase(single));
    const double raw_stripped = unwrap_near(-omega_D1 * T, clock_phase(stripped));

    RepeatedTripPhases out;
    out.elapsed_lab_time = static_cast<double>(trips) * T;
    const double theta_static = -omega_D1 * out.elapsed_lab_time;
    out.theta_rel_full = accumulate_phase(single, raw_full, trips) - theta_static;
    out.theta_rel_stripped =
        accumulate_phase(stripped, raw_stripped, trips) - theta_static;
    out.theta_rel_single_mode = static_cast<double>(trips) * single_mode_phase(plan);
    return out;
}

ScenarioResult resonance_scan(double t_a, double h, double c, double L_min, double L_max,
                              int points, long trips, int n_modes) {
    if (!(t_a > 0.0) || !(c > 0.0))
        throw std::invalid_argument("resonance_scan: t_a and c must be positive");
    if (!(L_min > 0.0) || !(L_max > L_min))
        throw std::invalid_argument("resonance_scan: need 0 < L_min < L_max");
    if (trips < 1) throw std::invalid_argument("resonance_scan: trips must be >= 1");

    ScenarioResult r;
    r.columns = {"L_m", "dtheta_nonadiabatic_deg", "dtheta_beta_deg"};
    const std::vector<double> grid = lin_spaced(L_min, L_max, points);
    size_t peak_nonad = 0;
    size_t peak_beta = 0;
    double best_nonad = -1.0;
    double best_beta = -1.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const TrajectoryPlan plan = TrajectoryPlan::from_h(h, t_a, grid[i], c);
        const RepeatedTripPhases phases = repeated_trip_phases(plan, trips, n_modes);
        const double d_nonad = phases.theta_rel_full - phases.theta_rel_single_mode;
        const double d_beta = phases.theta_rel_full - phases.theta_rel_stripped;
        r.rows.push_back({grid[i], d_nonad * kDegPerRad, d_beta * kDegPerRad});
        if (std::abs(d_nonad) > best_nonad) {
            best_nonad = std::abs(d_nonad);
            peak_nonad = i;
        }
        if (std::abs(d_beta) > best_beta) {
            best_beta = std::abs(d_beta);
            peak_beta = i;
        }
    }
    add_meta(r, "t_a_s", t_a);
    add_meta(r, "h", h);
    add_meta(r, "c_m_per_s", c);
    add_meta(r, "trips", trips);
    add_meta(r, "n_modes", static_cast<long>(n_modes));
    add_meta(r, "L_step_m", grid[1] - grid[0]);
    add_meta(r, "L_peak_nonadiabatic_m", grid[peak_nonad]);
    add_meta(r, "L_peak_beta_m", grid[peak_beta]);
    add_meta(r, "dtheta_peak_nonadiabatic_deg", best_nonad * kDegPerRad);
    add_meta(r, "dtheta_peak_beta_deg", best_beta * kDegPerRad);
    return r;
}

double resonance_epsilon(const TrajectoryPlan& plan, double delta_L_min, long trips,
                         int n_modes, double phase_tol) {
    if (trips < 1) throw std::invalid_argument("resonance_epsilon: trips must be >= 1");
    const PhysicalConstants constants = constants_for(plan.c, delta_L_min);
    const double omega_D1 = kPi * plan.c / plan.L;
    const double T = plan.trip_duration();

    const BogoliubovTransform single_D = trip_transform(plan, n_modes);
    const double raw_D1 = unwrap_near(-omega_D1 * T, clock_phase(single_D));
    const double theta_D =
        accumulate_phase(single_D, raw_D1, trips) + omega_D1 * trips * T;

    const RobinTripResult trip = simulate_trip_robin(plan, constants, 0.0, n_modes,
                                                     phase_tol);
    const double theta_R =
        accumulate_phase(trip.transform, trip.phases.theta_raw, trips) +
        trip.omega_R1 * trips * T;

    const EpsilonValue eps = epsilon_of(theta_D, theta_R);
    if (!eps.valid)
        throw NumericError("resonance_epsilon: reference phase below the validity floor",
                           std::abs(theta_D));
    return eps.value;
}

double trip_epsilon_fdtd(const TrajectoryPlan& plan, double delta_L_min, int n_modes) {
    const PhysicalConstants constants = constants_for(plan.c, delta_L_min);
    const double theta_D = trip_phase_record(plan, n_modes).theta_rel;
    const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
    const double theta_R = robin_phase_shift_fdtd(drive.config0, drive.d_l, drive.d_r,
                                                  plan.trip_duration());
    const EpsilonValue eps = epsilon_of(theta_D, theta_R, kEpsilonFloorFdtdRad);
    if (!eps.valid)
        throw NumericError("trip_epsilon_fdtd: reference phase below the validity floor",
                           std::abs(theta_D));
    return eps.value;
}

double robin_dirichlet_frequency_ratio(double L, double d_cav, double delta_L_min) {
    if (!(L > 0.0) || !(d_cav > 0.0) || !(delta_L_min > 0.0))
        throw std::invalid_argument(
            "robin_dirichlet_frequency_ratio: lengths must be positive");
    RobinCavityConfig config;
    config.d_l = delta_L_min + d_cav;
    config.d_r = delta_L_min;
    config.L_cav = L - config.d_l - config.d_r;
    if (!(config.L_cav > 0.0))
        throw std::invalid_argument(
            "robin_dirichlet_frequency_ratio: boundary lengths exceed L");
    const double k1 = solve_wavenumbers(config, 1).k[0];
    return k1 * L / kPi;
}

Scenario parse_scenario(std::istream& in) {
    Scenario s;
    bool have_kind = false;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos) config_fail(line, "expected key = value: " + text);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) config_fail(line, "empty key");
        if (value.empty()) config_fail(line, "empty value for '" + key + "'");

        if (key == "kind") {
            std::string name = value;
            std::replace(name.begin(), name.end(), '-', '_');
            if (name == "dirichlet_sweep") s.kind = ScenarioKind::dirichlet_sweep;
            else if (name == "robin_trip") s.kind = ScenarioKind::robin_trip;
            else if (name == "fourier_compare") s.kind = ScenarioKind::fourier_compare;
            else if (name == "resonance_scan") s.kind = ScenarioKind::resonance_scan;
            else if (name == "repeat_trips") s.kind = ScenarioKind::repeat_trips;
            else config_fail(line, "unknown kind '" + value + "'");
            have_kind = true;
        } else if (key == "t_a") {
            s.t_a = parse_double(value, line, key);
        } else if (key == "L") {
            s.L = parse_double(value, line, key);
        } else if (key == "c") {
            s.c = parse_double(value, line, key);
        } else if (key == "delta_L_min") {
            s.delta_L_min = parse_double(value, line, key);
        } else if (key == "h") {
            s.h = parse_double(value, line, key);
        } else if (key == "h_min") {
            s.h_min = parse_double(value, line, key);
        } else if (key == "h_max") {
            s.h_max = parse_double(value, line, key);
        } else if (key == "L_min") {
            s.L_min = parse_double(value, line, key);
        } else if (key == "L_max") {
            s.L_max = parse_double(value, line, key);
        } else if (key == "points") {
            s.points = static_cast<int>(parse_long(value, line, key));
        } else if (key == "trips") {
            s.trips = parse_long(value, line, key);
        } else if (key == "strip_beta") {
            s.strip_beta = parse_bool(value, line, key);
        } else if (key == "harmonics") {
            s.harmonics.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const std::string t = trim(item);
                if (t.empty()) config_fail(line, "empty entry in harmonics list");
                s.harmonics.push_back(static_cast<int>(parse_long(t, line, key)));
            }
            if (s.harmonics.empty()) config_fail(line, "harmonics list is empty");
        } else if (key == "n_modes") {
            s.n_modes = static_cast<int>(parse_long(value, line, key));
        } else if (key == "dt") {
            s.dt = parse_double(value, line, key);
        } else if (key == "phase_tol") {
            s.phase_tol = parse_double(value, line, key);
        } else {
            config_fail(line, "unknown key '" + key + "'");
        }
    }
    if (!have_kind) throw ConfigError("missing required key 'kind'");
    return s;
}

std::vector<std::pair<std::string, ScenarioResult>> run_scenario(const Scenario& s) {
    require(s.t_a > 0.0, "t_a must be positive");
    require(s.c > 0.0, "c must be positive");
    require(s.n_modes >= 1, "n_modes must be >= 1");
    require(s.phase_tol > 0.0, "phase_tol must be positive");
    require(s.delta_L_min >= 0.0, "delta_L_min must be non-negative");
    require(s.dt >= 0.0, "dt must be non-negative");

    std::vector<std::pair<std::string, ScenarioResult>> out;
    switch (s.kind) {
    case ScenarioKind::dirichlet_sweep: {
        require(s.L > 0.0, "L must be positive");
        require(s.h_min > 0.0 && s.h_max > s.h_min && s.h_max < 2.0,
                "need 0 < h_min < h_max < 2");
        require(s.points >= 2, "points must be >= 2");
        SweepPreset p;
        p.t_a = s.t_a;
        p.L = s.L;
        p.c = s.c;
        p.h_min = s.h_min;
        p.h_max = s.h_max;
        p.points = s.points;
        p.n_modes = s.n_modes;
        ScenarioResult r = dirichlet_sweep_table(p);
        add_common_meta(r, "dirichlet_sweep", p);
        out.emplace_back(scenario_kind_name(s.kind), std::move(r));
        break;
    }
    case ScenarioKind::robin_trip: {
        require(s.L > 0.0, "L must be positive");
        require(s.h > 0.0 && s.h < 2.0, "need 0 < h < 2");
        const PhysicalConstants constants = constants_for(s.c, s.delta_L_min);
        const TrajectoryPlan plan = TrajectoryPlan::from_h(s.h, s.t_a, s.L, s.c);
        const double omega_D1 = kPi * plan.c / plan.L;
        const double theta_D = trip_phase_record(plan, s.n_modes).theta_rel;
        const RobinTripResult trip =
            simulate_trip_robin(plan, constants, s.dt, s.n_modes, s.phase_tol);
        const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
        const double theta_fdtd = robin_phase_shift_fdtd(drive.config0, drive.d_l,
                                                         drive.d_r, plan.trip_duration());
        const EpsilonValue eps = epsilon_of(theta_D, theta_fdtd, kEpsilonFloorFdtdRad);
        ScenarioResult r;
        r.columns = {"h",
                     "theta_D_deg",
                     "theta_R_deg",
                     "theta_R_fdtd_deg",
                     "theta_single_deg",
                     "theta_ideal_deg",
                     "epsilon",
                     "epsilon_valid",
                     "omega_ratio",
                     "dt_used_s",
                     "refine_delta_rad"};
        r.rows.push_back({s.h, theta_D * kDegPerRad,
                          trip.theta_rel_robin_ref * kDegPerRad,
                          theta_fdtd * kDegPerRad,
                          single_mode_phase(plan) * kDegPerRad,
                          ideal_clock_phase(plan, omega_D1) * kDegPerRad, eps.value,
                          eps.valid ? 1.0 : 0.0, trip.omega_R1 / trip.omega_D1,
                          trip.dt_used, trip.refine_delta});
        add_meta(r, "kind", std::string(scenario_kind_name(s.kind)));
        add_meta(r, "epsilon_reference", "theta_R_fdtd");
        add_meta(r, "t_a_s", s.t_a);
        add_meta(r, "L_m", s.L);
        add_meta(r, "c_m_per_s", s.c);
        add_meta(r, "n_modes", static_cast<long>(s.n_modes));
        add_meta(r, "L_cav_m", trip.config0.L_cav);
        add_meta(r, "d_l0_m", trip.config0.d_l);
        add_meta(r, "d_r0_m", trip.config0.d_r);
        add_meta(r, "omega_R1_rad_per_s", trip.omega_R1);
        add_meta(r, "omega_D1_rad_per_s", trip.omega_D1);
        add_meta(r, "n_steps", static_cast<long>(trip.n_steps));
        add_meta(r, "thin_boundary_warning",
                 static_cast<long>(trip.thin_boundary_warning ? 1 : 0));
        out.emplace_back(scenario_kind_name(s.kind), std::move(r));
        break;
    }
    case ScenarioKind::fourier_compare: {
        require(s.L > 0.0, "L must be positive");
        require(s.h > 0.0 && s.h < 2.0, "need 0 < h < 2");
        require(!s.harmonics.empty(), "harmonics list must not be empty");
        for (int n : s.harmonics) require(n >= 1, "harmonics must be >= 1");
        const PhysicalConstants constants = constants_for(s.c, s.delta_L_min);
        const TrajectoryPlan plan = TrajectoryPlan::from_h(s.h, s.t_a, s.L, s.c);
        const double T = plan.trip_duration();
        const RobinTripResult exact_trip =
            simulate_trip_robin(plan, constants, s.dt, s.n_modes, s.phase_tol);
        const double theta_exact = exact_trip.theta_rel_robin_ref;
        const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
        ScenarioResult r;
        r.columns = {"n_harmonics",     "budget_Hz",          "residual_rms_left_m",
                     "residual_rms_right_m", "theta_R_deg",   "deviation_rel",
                     "deviation_valid"};
        for (int n : s.harmonics) {
            const FittedDrive fitted = fit_trip_drive(drive, T, constants, n);
            const double theta_n = fitted_trip_phase(drive, fitted, T,
                                                     exact_trip.omega_R1, s.dt,
                                                     s.n_modes, s.phase_tol);
            const bool valid = std::abs(theta_exact) >= kEpsilonFloorRad;
            const double dev =
                valid ? std::abs(theta_n - theta_exact) / std::abs(theta_exact) : 0.0;
            r.rows.push_back({static_cast<double>(n), harmonic_budget(s.t_a, n),
                              fitted.flux_l.residual_rms, fitted.flux_r.residual_rms,
                              theta_n * kDegPerRad, dev, valid ? 1.0 : 0.0});
        }
        add_meta(r, "kind", std::string(scenario_kind_name(s.kind)));
        add_meta(r, "t_a_s", s.t_a);
        add_meta(r, "L_m", s.L);
        add_meta(r, "h", s.h);
        add_meta(r, "c_m_per_s", s.c);
        add_meta(r, "n_modes", static_cast<long>(s.n_modes));
        add_meta(r, "theta_R_exact_deg", theta_exact * kDegPerRad);
        out.emplace_back(scenario_kind_name(s.kind), std::move(r));
        break;
    }
    case ScenarioKind::resonance_scan: {
        require(s.h > 0.0 && s.h < 2.0, "need 0 < h < 2");
        require(s.L_min > 0.0 && s.L_max > s.L_min, "need 0 < L_min < L_max");
        require(s.points >= 2, "points must be >= 2");
        require(s.trips >= 1, "trips must be >= 1");
        ScenarioResult r = resonance_scan(s.t_a, s.h, s.c, s.L_min, s.L_max, s.points,
                                          s.trips, s.n_modes);
        add_meta(r, "kind", std::string(scenario_kind_name(s.kind)));
        out.emplace_back(scenario_kind_name(s.kind), std::move(r));
        break;
    }
    case ScenarioKind::repeat_trips: {
        require(s.L > 0.0, "L must be positive");
        require(s.h > 0.0 && s.h < 2.0, "need 0 < h < 2");
        require(s.trips >= 1, "trips must be >= 1");
        const TrajectoryPlan plan = TrajectoryPlan::from_h(s.h, s.t_a, s.L, s.c);
        ScenarioResult r;
        if (s.strip_beta) {
            const RepeatedTripPhases phases =
                repeated_trip_phases(plan, s.trips, s.n_modes);
            r.columns = {"trips",          "elapsed_s",           "theta_full_deg",
                         "theta_stripped_deg", "theta_single_deg",
                         "dtheta_nonadiabatic_deg", "dtheta_beta_deg"};
            r.rows.push_back(
                {static_cast<double>(s.trips), phases.elapsed_lab_time,
                 phases.theta_rel_full * kDegPerRad,
                 phases.theta_rel_stripped * kDegPerRad,
                 phases.theta_rel_single_mode * kDegPerRad,
                 (phases.theta_rel_full - phases.theta_rel_single_mode) * kDegPerRad,
                 (phases.theta_rel_full - phases.theta_rel_stripped) * kDegPerRad});
        } else {
            const double omega_D1 = kPi * plan.c / plan.L;
            const double T = plan.trip_duration();
            const BogoliubovTransform single = trip_transform(plan, s.n_modes);
            const double raw1 = unwrap_near(-omega_D1 * T, clock_phase(single));
            const double elapsed = static_cast<double>(s.trips) * T;
            const double theta_full =
                accumulate_phase(single, raw1, s.trips) + omega_D1 * elapsed;
            const double theta_single =
                static_cast<double>(s.trips) * single_mode_phase(plan);
            r.columns = {"trips", "elapsed_s", "theta_full_deg", "theta_single_deg",
                         "dtheta_nonadiabatic_deg"};
            r.rows.push_back({static_cast<double>(s.trips), elapsed,
                              theta_full * kDegPerRad, theta_single * kDegPerRad,
                              (theta_full - theta_single) * kDegPerRad});
        }
        add_meta(r, "kind", std::string(scenario_kind_name(s.kind)));
        add_meta(r, "t_a_s", s.t_a);
        add_meta(r, "L_m", s.L);
        add_meta(r, "h", s.h);
        add_meta(r, "c_m_per_s", s.c);
        add_meta(r, "n_modes", static_cast<long>(s.n_modes));
        out.emplace_back(scenario_kind_name(s.kind), std::move(r));
        break;
    }
    }
    return out;
}

void write_csv(std::ostream& os, const ScenarioResult& result) {
    for (const auto& kv : result.metadata)
        os << "# " << kv.first << " = " << kv.second << "\n";
    for (size_t i = 0; i < result.columns.size(); ++i) {
        if (i) os << ",";
        os << result.columns[i];
    }
    os << "\n";
    for (const auto& row : result.rows) {
        if (row.size() != result.columns.size())
            throw std::logic_error("write_csv: row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << format_value(row[i]);
        }
        os << "\n";
    }
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string format_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

void write_svg_plot(std::ostream& os, const ScenarioResult& result,
                    const std::string& title, int x_col, const std::vector<int>& y_cols,
                    bool log_x, bool log_y) {
    const int n_cols = static_cast<int>(result.columns.size());
    if (x_col < 0 || x_col >= n_cols)
        throw std::invalid_argument("write_svg_plot: bad x column index");
    for (int c : y_cols)
        if (c < 0 || c >= n_cols)
            throw std::invalid_argument("write_svg_plot: bad y column index");

    const double width = 860.0, height = 540.0;
    const double ml = 80.0, mr = 20.0, mt = 40.0, mb = 56.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    const auto usable = [](double v, bool log_axis) {
        return std::isfinite(v) && (!log_axis || v > 0.0);
    };

    // Collect per-series points that survive the axis domain.
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Series> series;
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool have_range = false;
    for (int c : y_cols) {
        Series s;
        s.name = result.columns[static_cast<size_t>(c)];
        for (const auto& row : result.rows) {
            const double x = row[static_cast<size_t>(x_col)];
            const double y = row[static_cast<size_t>(c)];
            if (!usable(x, log_x) || !usable(y, log_y)) continue;
            s.pts.emplace_back(x, y);
            if (!have_range) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                have_range = true;
            } else {
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
        series.push_back(std::move(s));
    }
    if (!have_range) {
        x_lo = log_x ? 0.1 : 0.0;
        x_hi = log_x ? 1.0 : 1.0;
        y_lo = log_y ? 0.1 : 0.0;
        y_hi = log_y ? 1.0 : 1.0;
    }

    const auto fwd = [](double v, bool log_axis) {
        return log_axis ? std::log10(v) : v;
    };
    double fx_lo = fwd(x_lo, log_x), fx_hi = fwd(x_hi, log_x);
    double fy_lo = fwd(y_lo, log_y), fy_hi = fwd(y_hi, log_y);
    const auto pad = [](double& lo, double& hi) {
        if (hi - lo < 1e-300) {
            const double bump = (std::abs(lo) > 0.0) ? 0.1 * std::abs(lo) : 1.0;
            lo -= bump;
            hi += bump;
        } else {
            const double margin = 0.05 * (hi - lo);
            lo -= margin;
            hi += margin;
        }
    };
    pad(fx_lo, fx_hi);
    pad(fy_lo, fy_hi);

    const auto sx = [&](double v) {
        return ml + (fwd(v, log_x) - fx_lo) / (fx_hi - fx_lo) * pw;
    };
    const auto sy = [&](double v) {
        return mt + ph - (fwd(v, log_y) - fy_lo) / (fy_hi - fy_lo) * ph;
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};
    constexpr int palette_size = 7;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
       << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << width / 2
       << "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
          "font-size=\"16\" fill=\"#111111\">"
       << xml_escape(title) << "</text>\n";

    // Ticks: decades on log axes, five even divisions otherwise.
    const auto axis_ticks = [](double f_lo, double f_hi, bool log_axis) {
        std::vector<double> t; // in forward (plot) coordinates
        if (log_axis) {
            for (int k = static_cast<int>(std::ceil(f_lo - 1e-9));
                 k <= static_cast<int>(std::floor(f_hi + 1e-9)); ++k)
                t.push_back(static_cast<double>(k));
        }
        if (t.size() < 2) {
            t.clear();
            for (int i = 0; i <= 4; ++i) t.push_back(f_lo + (f_hi - f_lo) * i / 4.0);
        }
        return t;
    };
    const auto tick_value = [](double f, bool log_axis) {
        return log_axis ? std::pow(10.0, f) : f;
    };

    for (double f : axis_ticks(fx_lo, fx_hi, log_x)) {
        const double px = ml + (f - fx_lo) / (fx_hi - fx_lo) * pw;
        os << "<line x1=\"" << format_coord(px) << "\" y1=\"" << mt << "\" x2=\""
           << format_coord(px) << "\" y2=\"" << mt + ph
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << format_coord(px) << "\" y=\"" << mt + ph + 18
           << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\" "
              "fill=\"#333333\">"
           << xml_escape(format_tick(tick_value(f, log_x))) << "</text>\n";
    }
    for (double f : axis_ticks(fy_lo, fy_hi, log_y)) {
        const double py = mt + ph - (f - fy_lo) / (fy_hi - fy_lo) * ph;
        os << "<line x1=\"" << ml << "\" y1=\"" << format_coord(py) << "\" x2=\""
           << ml + pw << "\" y2=\"" << format_coord(py)
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << format_coord(py + 4)
           << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" "
              "fill=\"#333333\">"
           << xml_escape(format_tick(tick_value(f, log_y))) << "</text>\n";
    }

    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
          "fill=\"#333333\">"
       << xml_escape(result.columns[static_cast<size_t>(x_col)]) << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        if (series[si].pts.size() < 2) continue;
        os << "<polyline fill=\"none\" stroke=\"" << palette[si % palette_size]
           << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < series[si].pts.size(); ++i) {
            if (i) os << " ";
            os << format_coord(sx(series[si].pts[i].first)) << ","
               << format_coord(sy(series[si].pts[i].second));
        }
        os << "\"/>\n";
    }

    for (size_t si = 0; si < series.size(); ++si) {
        const double ly = mt + 16 + 16 * static_cast<double>(si);
        os << "<line x1=\"" << ml + 10 << "\" y1=\"" << format_coord(ly - 4)
           << "\" x2=\"" << ml + 34 << "\" y2=\"" << format_coord(ly - 4)
           << "\" stroke=\"" << palette[si % palette_size]
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << ml + 40 << "\" y=\"" << format_coord(ly)
           << "\" font-family=\"monospace\" font-size=\"11\" fill=\"#333333\">"
           << xml_escape(series[si].name) << "</text>\n";
    }

    os << "</svg>\n";
}

} // namespace cavsim
