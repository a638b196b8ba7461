#include "cavsim/scenario.hpp"

#include "cavsim/errors.hpp"
#include "cavsim/trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cavsim;

Scenario parse_text(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is);
}

double meta_value(const ScenarioResult& r, const std::string& key) {
    for (const auto& kv : r.metadata)
        if (kv.first == key) return std::stod(kv.second);
    FAIL("missing metadata key ", key);
    return 0.0;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("config parsing") {
    const Scenario s = parse_text("# comment only\n"
                                  "kind = repeat-trips\n"
                                  "t_a = 1e-9   # trailing comment\n"
                                  "L = 0.011\n"
                                  "h = 2e-3\n"
                                  "trips = 5000\n"
                                  "strip_beta = true\n"
                                  "harmonics = 2, 4,6\n"
                                  "\n"
                                  "n_modes = 12\n");
    CHECK(s.kind == ScenarioKind::repeat_trips);
    CHECK(s.t_a == 1e-9);
    CHECK(s.L == 0.011);
    CHECK(s.h == 2e-3);
    CHECK(s.trips == 5000);
    CHECK(s.strip_beta);
    CHECK(s.harmonics == std::vector<int>{2, 4, 6});
    CHECK(s.n_modes == 12);
    CHECK(s.c == 1.19e8);
}

TEST_CASE("config errors carry the line number") {
    CHECK_THROWS_AS(parse_text("kind = dirichlet_sweep\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_text("kind = dirichlet_sweep\n\nbogus = 1\n"),
                         doctest::Contains("line 3"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_text("kind = dirichlet_sweep\nt_a = fast\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_text("t_a = 1e-9\n"), doctest::Contains("kind"),
                         ConfigError);
    CHECK_THROWS_AS(parse_text("kind = warp_drive\n"), ConfigError);
    CHECK_THROWS_AS(parse_text("kind dirichlet_sweep\n"), ConfigError);
}

TEST_CASE("run_scenario validates parameter combinations") {
    Scenario s;
    s.kind = ScenarioKind::dirichlet_sweep;
    CHECK_THROWS_AS(run_scenario(s), ConfigError);
    s.kind = ScenarioKind::robin_trip;
    CHECK_THROWS_AS(run_scenario(s), ConfigError);
    s.kind = ScenarioKind::resonance_scan;
    CHECK_THROWS_AS(run_scenario(s), ConfigError);
}

TEST_CASE("column lookup") {
    ScenarioResult r;
    r.columns = {"h", "theta_full_deg"};
    CHECK(r.column_index("h") == 0);
    CHECK(r.column_index("theta_full_deg") == 1);
    CHECK(r.column_index("missing") == -1);
}

TEST_CASE("csv output is deterministic") {
    Scenario s;
    s.kind = ScenarioKind::dirichlet_sweep;
    s.t_a = 1e-9;
    s.L = 0.011;
    s.h_min = 1e-4;
    s.h_max = 1e-3;
    s.points = 3;
    s.n_modes = 6;
    const auto out1 = run_scenario(s);
    const auto out2 = run_scenario(s);
    REQUIRE(out1.size() == 1);
    REQUIRE(out1[0].second.rows.size() == 3);

    std::ostringstream a, b;
    write_csv(a, out1[0].second);
    write_csv(b, out2[0].second);
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, 1) == "#");
    CHECK(a.str().find("h,theta_full_deg") != std::string::npos);

    // Sweep endpoints land exactly on the requested bounds.
    CHECK(out1[0].second.rows.front()[0] == 1e-4);
    CHECK(out1[0].second.rows.back()[0] == 1e-3);
}

TEST_CASE("vanishing acceleration leaves no relative phase") {
    const TrajectoryPlan plan = TrajectoryPlan::from_h(1e-9, 1e-9, 0.011, 1.19e8);
    const RepeatedTripPhases p = repeated_trip_phases(plan, 1, 6);
    CHECK(std::abs(p.theta_rel_full) < 1e-6);
    CHECK(std::abs(p.theta_rel_single_mode) < 1e-6);
    CHECK(p.elapsed_lab_time == plan.trip_duration());
}

TEST_CASE("accumulated phase is nearly additive off resonance") {
    const TrajectoryPlan plan = TrajectoryPlan::from_h(1e-3, 1e-9, 0.011, 1.19e8);
    const RepeatedTripPhases one = repeated_trip_phases(plan, 1, 8);
    const RepeatedTripPhases three = repeated_trip_phases(plan, 3, 8);
    CHECK(three.theta_rel_full ==
          doctest::Approx(3.0 * one.theta_rel_full).epsilon(0.1));
    CHECK(three.theta_rel_single_mode ==
          doctest::Approx(3.0 * one.theta_rel_single_mode).epsilon(1e-12));
    CHECK(three.elapsed_lab_time == 3.0 * plan.trip_duration());
    CHECK(one.theta_rel_full > 0.0);
}

TEST_CASE("resonance scan peaks inside the window") {
    const double t_a = 1e-10, c = 1.19e8;
    const ScenarioResult r = resonance_scan(t_a, 0.02, c, 0.0218, 0.0258, 9, 20, 8);
    REQUIRE(r.rows.size() == 9);
    const double peak = meta_value(r, "L_peak_nonadiabatic_m");
    CHECK(peak > 0.0218);
    CHECK(peak < 0.0258);
    // The lowest-order resonance sits where a half wave fits the trip time.
    CHECK(peak == doctest::Approx(2.0 * c * t_a).epsilon(0.05));
    CHECK(meta_value(r, "L_step_m") == doctest::Approx(0.0005).epsilon(1e-12));

    const double peak_amp = std::abs(meta_value(r, "dtheta_peak_nonadiabatic_deg"));
    const double edge_amp = std::abs(r.rows.front()[1]);
    CHECK(peak_amp > edge_amp);
}

TEST_CASE("svg plot renders polylines") {
    ScenarioResult r;
    r.columns = {"x", "y"};
    for (int i = 1; i <= 5; ++i)
        r.rows.push_back({static_cast<double>(i), static_cast<double>(i * i)});
    std::ostringstream os;
    write_svg_plot(os, r, "test plot", 0, {1}, false, false);
    const std::string svg = os.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("test plot") != std::string::npos);
    CHECK_THROWS_AS(write_svg_plot(os, r, "bad", 7, {1}, false, false),
                    std::invalid_argument);
}

TEST_CASE("frequency ratio of the initialization geometry") {
    CHECK(robin_dirichlet_frequency_ratio(0.011, 1e-9, 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-4));
    const double small = robin_dirichlet_frequency_ratio(0.011, 1e-4, 7.5e-4);
    const double large = robin_dirichlet_frequency_ratio(0.011, 1.68e-3, 7.5e-4);
    CHECK(small > 1.0);
    CHECK(large > small);
}

TEST_CASE("figure names round-trip") {
    CHECK(figure_from_string("fig4") == FigureId::fig4);
    CHECK(figure_from_string("4") == FigureId::fig4);
    CHECK(figure_name(FigureId::fig7) == "fig7");
    CHECK_THROWS_AS(figure_from_string("fig9"), ConfigError);
}

TEST_CASE("fitted drives approach the exact trip phase") {
    Scenario s;
    s.kind = ScenarioKind::fourier_compare;
    s.t_a = 1e-10;
    s.L = 0.0238;
    s.h = 1e-2;
    s.delta_L_min = 7.5e-6;
    s.harmonics = {1, 4};
    s.n_modes = 4;
    s.phase_tol = 1e-6;
    const auto out = run_scenario(s);
    REQUIRE(out.size() == 1);
    const ScenarioResult& r = out[0].second;
    REQUIRE(r.rows.size() == 2);
    const int dev = r.column_index("deviation_rel");
    const int valid = r.column_index("deviation_valid");
    REQUIRE(dev >= 0);
    REQUIRE(valid >= 0);
    CHECK(r.rows[0][valid] == 1.0);
    CHECK(r.rows[1][valid] == 1.0);
    CHECK(r.rows[1][dev] < r.rows[0][dev] * 1.05 + 1e-9);
    CHECK(r.rows[0][r.column_index("budget_Hz")] == 1 / (4.0 * s.t_a));
}

} // TEST_SUITE
