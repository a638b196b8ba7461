#include "cavsim/constants.hpp"
#include "cavsim/errors.hpp"
#include "cavsim/fourier_flux.hpp"
#include "cavsim/robin_cavity.hpp"
#include "cavsim/scenario.hpp"
#include "cavsim/trajectory.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace cavsim;

// Plot column selection by naming convention: phase-like columns against the
// first column; log axes only where every plotted value is positive.
struct PlotChoice {
    int x_col = 0;
    std::vector<int> y_cols;
    bool log_x = false;
    bool log_y = false;
};

PlotChoice choose_plot(const ScenarioResult& r) {
    PlotChoice p;
    for (size_t i = 1; i < r.columns.size(); ++i) {
        const std::string& name = r.columns[i];
        if (name.rfind("theta_", 0) == 0 || name.rfind("dtheta_", 0) == 0)
            p.y_cols.push_back(static_cast<int>(i));
    }
    if (p.y_cols.empty()) {
        for (size_t i = 1; i < r.columns.size(); ++i) {
            const std::string& name = r.columns[i];
            if (name.find("_valid") == std::string::npos)
                p.y_cols.push_back(static_cast<int>(i));
        }
    }
    p.log_x = !r.columns.empty() && r.columns[0] == "h";
    bool all_positive = !r.rows.empty();
    for (const auto& row : r.rows)
        for (int c : p.y_cols)
            if (!(row[static_cast<size_t>(c)] > 0.0)) all_positive = false;
    p.log_y = p.log_x && all_positive;
    return p;
}

void write_outputs(const std::string& out_dir, const std::string& name,
                   const ScenarioResult& result) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base = std::filesystem::path(out_dir) / name;

    std::ofstream csv(base.string() + ".csv");
    if (!csv) throw std::runtime_error("cannot open " + base.string() + ".csv");
    write_csv(csv, result);
    std::cout << "wrote " << base.string() << ".csv (" << result.rows.size()
              << " rows)\n";

    if (result.rows.size() >= 2) {
        const PlotChoice plot = choose_plot(result);
        if (!plot.y_cols.empty()) {
            std::ofstream svg(base.string() + ".svg");
            if (!svg) throw std::runtime_error("cannot open " + base.string() + ".svg");
            write_svg_plot(svg, result, name, plot.x_col, plot.y_cols, plot.log_x,
                           plot.log_y);
            std::cout << "wrote " << base.string() << ".svg\n";
        }
    }
}

int run_reproduce(const std::string& figure, const std::string& out_dir,
                  const RunOptions& options) {
    std::vector<FigureId> ids;
    if (figure == "all") {
        ids = {FigureId::fig1, FigureId::fig4, FigureId::fig5,
               FigureId::fig6, FigureId::fig7, FigureId::fig8};
    } else {
        ids = {figure_from_string(figure)};
    }
    for (FigureId id : ids) {
        const ScenarioResult result = reproduce_figure(id, options);
        write_outputs(out_dir, figure_name(id), result);
    }
    return 0;
}

int run_config(const std::string& path, const std::string& out_dir) {
    Scenario scenario;
    if (path == "-") {
        scenario = parse_scenario(std::cin);
    } else {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        scenario = parse_scenario(in);
    }
    for (const auto& [name, result] : run_scenario(scenario))
        write_outputs(out_dir, name, result);
    return 0;
}

int run_fit_flux(double t_a, double L, double h, double c, double delta_L_min,
                 int harmonics, int samples, const std::string& out_dir) {
    PhysicalConstants constants;
    constants.c = c;
    if (delta_L_min > 0.0) constants = constants.with_delta_L_min(delta_L_min);
    const TrajectoryPlan plan = TrajectoryPlan::from_h(h, t_a, L, c);
    const TripBoundaryDrive drive = trip_boundary_drive(plan, constants);
    const double T = plan.trip_duration();

    const int M = std::max(samples, 64 * harmonics);
    std::vector<double> flux_l(static_cast<size_t>(M)), flux_r(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) {
        const double t = T * i / M;
        flux_l[static_cast<size_t>(i)] = flux_for_length(drive.d_l(t), constants);
        flux_r[static_cast<size_t>(i)] = flux_for_length(drive.d_r(t), constants);
    }
    const FourierFlux fit_l = fit_flux(flux_l, T, harmonics, constants);
    const FourierFlux fit_r = fit_flux(flux_r, T, harmonics, constants);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    {
        std::ofstream os(dir / "waveform_left.txt");
        write_waveform_table(os, fit_l, 512);
    }
    {
        std::ofstream os(dir / "waveform_right.txt");
        write_waveform_table(os, fit_r, 512);
    }
    std::cout << "harmonics: " << harmonics << "\n"
              << "bandwidth budget: " << harmonic_budget(t_a, harmonics) << " Hz\n"
              << "left residual rms:  " << fit_l.residual_rms << " m\n"
              << "right residual rms: " << fit_r.residual_rms << " m\n"
              << "wrote " << (dir / "waveform_left.txt").string() << ", "
              << (dir / "waveform_right.txt").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavsim: accelerated-cavity clock simulation"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory (default .)");

    RunOptions options;

    auto* reproduce = app.add_subcommand(
        "reproduce", "regenerate a preset result table (fig1/fig4/fig5/fig6/fig7/fig8 or all)");
    std::string figure;
    reproduce->add_option("figure", figure, "figure name or 'all'")->required();
    reproduce->add_option("--n-modes", options.n_modes, "override mode-ladder size");
    reproduce->add_option("--dt", options.dt, "override circuit time step [s]");
    reproduce->add_option("--c", options.c, "override propagation speed [m/s]");
    reproduce->add_option("--points", options.points, "override sweep point count");

    auto* run = app.add_subcommand("run", "execute a key=value scenario config");
    std::string config_path;
    run->add_option("config", config_path, "config file path, or '-' for stdin")
        ->required();

    auto* scan = app.add_subcommand("scan-resonance",
                                    "scan cavity length across a resonance");
    double scan_t_a = 1e-10, scan_h = 0.0085, scan_c = 1.19e8;
    double scan_L_min = 0.019, scan_L_max = 0.0286;
    int scan_points = 49, scan_n_modes = 20;
    long scan_trips = 200;
    scan->add_option("--t-a", scan_t_a, "segment duration [s]");
    scan->add_option("--h", scan_h, "dimensionless acceleration a L / c^2");
    scan->add_option("--c", scan_c, "propagation speed [m/s]");
    scan->add_option("--L-min", scan_L_min, "sweep start [m]");
    scan->add_option("--L-max", scan_L_max, "sweep end [m]");
    scan->add_option("--points", scan_points, "sweep point count");
    scan->add_option("--trips", scan_trips, "round trips to accumulate");
    scan->add_option("--n-modes", scan_n_modes, "mode-ladder size");

    auto* dirichlet = app.add_subcommand("simulate-dirichlet",
                                         "exact cavity trip(s), Dirichlet walls");
    double d_t_a = 1e-9, d_L = 0.011, d_h = 1e-3, d_c = 1.19e8;
    int d_n_modes = 20;
    long d_trips = 1;
    dirichlet->add_option("--t-a", d_t_a, "segment duration [s]");
    dirichlet->add_option("--L", d_L, "cavity length [m]");
    dirichlet->add_option("--h", d_h, "dimensionless acceleration");
    dirichlet->add_option("--c", d_c, "propagation speed [m/s]");
    dirichlet->add_option("--trips", d_trips, "round trips to accumulate");
    dirichlet->add_option("--n-modes", d_n_modes, "mode-ladder size");

    auto* robin = app.add_subcommand("simulate-robin",
                                     "one circuit trip with SQUID boundaries");
    double r_t_a = 1e-9, r_L = 0.122, r_h = 1e-3, r_c = 1.19e8;
    double r_delta_L_min = 7.5e-6, r_dt = 0.0, r_phase_tol = 1e-9;
    int r_n_modes = 20;
    robin->add_option("--t-a", r_t_a, "segment duration [s]");
    robin->add_option("--L", r_L, "simulated cavity length [m]");
    robin->add_option("--h", r_h, "dimensionless acceleration");
    robin->add_option("--c", r_c, "propagation speed [m/s]");
    robin->add_option("--delta-L-min", r_delta_L_min,
                      "minimum SQUID length [m], 0 keeps the default");
    robin->add_option("--dt", r_dt, "time step [s], 0 picks automatically");
    robin->add_option("--phase-tol", r_phase_tol, "clock-phase convergence target [rad]");
    robin->add_option("--n-modes", r_n_modes, "mode-ladder size");

    auto* fit = app.add_subcommand("fit-flux",
                                   "fit truncated Fourier flux drives for one trip");
    double f_t_a = 1e-10, f_L = 0.0238, f_h = 1e-2, f_c = 1.19e8;
    double f_delta_L_min = 7.5e-6;
    int f_harmonics = 10, f_samples = 1024;
    fit->add_option("--t-a", f_t_a, "segment duration [s]");
    fit->add_option("--L", f_L, "simulated cavity length [m]");
    fit->add_option("--h", f_h, "dimensionless acceleration");
    fit->add_option("--c", f_c, "propagation speed [m/s]");
    fit->add_option("--delta-L-min", f_delta_L_min,
                    "minimum SQUID length [m], 0 keeps the default");
    fit->add_option("--harmonics", f_harmonics, "harmonic count");
    fit->add_option("--samples", f_samples, "fit grid size (>= 64 harmonics)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reproduce->parsed()) return run_reproduce(figure, out_dir, options);
        if (run->parsed()) return run_config(config_path, out_dir);
        if (scan->parsed()) {
            const ScenarioResult r = cavsim::resonance_scan(
                scan_t_a, scan_h, scan_c, scan_L_min, scan_L_max, scan_points,
                scan_trips, scan_n_modes);
            write_outputs(out_dir, "resonance_scan", r);
            return 0;
        }
        if (dirichlet->parsed()) {
            Scenario s;
            s.kind = ScenarioKind::repeat_trips;
            s.t_a = d_t_a;
            s.L = d_L;
            s.h = d_h;
            s.c = d_c;
            s.trips = d_trips;
            s.strip_beta = true;
            s.n_modes = d_n_modes;
            for (const auto& [name, result] : run_scenario(s))
                write_outputs(out_dir, name, result);
            return 0;
        }
        if (robin->parsed()) {
            Scenario s;
            s.kind = ScenarioKind::robin_trip;
            s.t_a = r_t_a;
            s.L = r_L;
            s.h = r_h;
            s.c = r_c;
            s.delta_L_min = r_delta_L_min;
            s.dt = r_dt;
            s.phase_tol = r_phase_tol;
            s.n_modes = r_n_modes;
            for (const auto& [name, result] : run_scenario(s))
                write_outputs(out_dir, name, result);
            return 0;
        }
        if (fit->parsed())
            return run_fit_flux(f_t_a, f_L, f_h, f_c, f_delta_L_min, f_harmonics,
                                f_samples, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
