#pragma once

#include "cavsim/constants.hpp"
#include "cavsim/trajectory.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cavsim {

// Generic numeric table: one named column per output quantity (units in the
// name), one row per scan point, plus key/value metadata emitted as comments.
struct ScenarioResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    int column_index(const std::string& name) const; // -1 if absent
};

// Figure-reproduction presets.
enum class FigureId { fig1, fig4, fig5, fig6, fig7, fig8 };

FigureId figure_from_string(const std::string& name); // throws ConfigError
std::string figure_name(FigureId id);

// Optional overrides for the baked-in presets; zero means "use the preset".
struct RunOptions {
    int n_modes = 0;
    double dt = 0.0;
    double c = 0.0;
    int points = 0;
};

ScenarioResult reproduce_figure(FigureId id, const RunOptions& options = {});

// Accumulated clock phases after `trips` identical round trips, all relative
// to the static Dirichlet reference over the same total lab time.
struct RepeatedTripPhases {
    double theta_rel_full = 0.0;      // full transform composition [rad]
    double theta_rel_stripped = 0.0;  // particle creation removed [rad]
    double theta_rel_single_mode = 0.0; // adiabatic single-mode value [rad]
    double elapsed_lab_time = 0.0;    // trips * 4 t_a [s]
};

RepeatedTripPhases repeated_trip_phases(const TrajectoryPlan& plan, long trips,
                                        int n_modes);

// Scan the cavity length across the particle-creation resonance at fixed h
// (a is re-derived per point): per point the full-vs-single-mode and
// with/without-particle-creation accumulated phase differences after `trips`
// round trips. Peak locations land in the metadata.
ScenarioResult resonance_scan(double t_a, double h, double c, double L_min, double L_max,
                              int points, long trips, int n_modes);

// Robin-vs-Dirichlet relative phase error epsilon = (th_D - th_R)/th_D after
// `trips` round trips of the given plan, with the circuit's minimum boundary
// length pinned to delta_L_min.
double resonance_epsilon(const TrajectoryPlan& plan, double delta_L_min, long trips,
                         int n_modes, double phase_tol);

// Same error for a single trip, with the circuit phase taken from the
// finite-difference continuum solver (robin_phase_shift_fdtd) instead of
// the mode-ladder evolution. n_modes only sets the Dirichlet-side ladder,
// which converges quickly.
double trip_epsilon_fdtd(const TrajectoryPlan& plan, double delta_L_min,
                         int n_modes = 20);

// First Robin wavenumber over the Dirichlet pi/L, for the initialization
// geometry d_l = delta_L_min + d_cav, d_r = delta_L_min,
// L_cav = L - d_l - d_r. Dimensionless, independent of c.
double robin_dirichlet_frequency_ratio(double L, double d_cav, double delta_L_min);

// Scenario configuration for the `run` subcommand: flat key = value text.
enum class ScenarioKind {
    dirichlet_sweep,
    robin_trip,
    fourier_compare,
    resonance_scan,
    repeat_trips
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::dirichlet_sweep;
    double t_a = 0.0;
    double L = 0.0;
    double c = 1.19e8;
    double delta_L_min = 0.0; // 0 keeps the default SQUID operating point
    double h = 0.0;           // single-point kinds
    double h_min = 0.0, h_max = 0.0;
    double L_min = 0.0, L_max = 0.0;
    int points = 0;
    long trips = 1;
    bool strip_beta = false;
    std::vector<int> harmonics;
    int n_modes = 20;
    double dt = 0.0;
    double phase_tol = 1e-6;
};

// Parse a scenario config. Unknown keys, malformed values, or a missing/bad
// `kind` throw ConfigError naming the offending line.
Scenario parse_scenario(std::istream& in);

// Execute a parsed scenario; each entry is (output name, table).
std::vector<std::pair<std::string, ScenarioResult>> run_scenario(const Scenario& s);

// Deterministic CSV: '#' metadata comment lines, one header row, %.12e values.
void write_csv(std::ostream& os, const ScenarioResult& result);

// Minimal static SVG line plot of selected columns against column x_col.
void write_svg_plot(std::ostream& os, const ScenarioResult& result,
                    const std::string& title, int x_col, const std::vector<int>& y_cols,
                    bool log_x, bool log_y);

} // namespace cavsim
