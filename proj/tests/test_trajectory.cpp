#include "cavsim/trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

using namespace cavsim;

// Simpson rule over one smooth branch.
template <typename F>
double simpson(F f, double a, double b, int intervals) {
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i)
        sum += f(a + (b - a) * i / intervals) * ((i % 2) ? 4.0 : 2.0);
    return sum * (b - a) / (3.0 * intervals);
}

double center_velocity(const TrajectoryPlan& plan, double t) {
    const double eps = 1e-7 * plan.t_a;
    const double lo = std::max(0.0, t - eps);
    const double hi = std::min(plan.trip_duration(), t + eps);
    return (center_position(plan, hi) - center_position(plan, lo)) / (hi - lo);
}

} // namespace

TEST_SUITE("trajectory") {

TEST_CASE("constructors agree and validate") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(0.3, 1.0, 2.0, 1.0);
    CHECK(p.h() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p.a == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(p.g_plus() == doctest::Approx(1.15).epsilon(1e-15));
    CHECK(p.g_minus() == doctest::Approx(0.85).epsilon(1e-15));

    CHECK_THROWS_AS(TrajectoryPlan::from_h(2.0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryPlan::from_h(-0.1, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryPlan::from_acceleration(1.0, -1.0, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("round trip starts and ends at rest in place") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(0.7, 1.3, 1.0, 1.0);
    const double T = p.trip_duration();
    CHECK(center_position(p, T) == doctest::Approx(center_position(p, 0.0)).epsilon(1e-13));
    const auto m0 = mirror_positions(p, 0.0);
    const auto mT = mirror_positions(p, T);
    CHECK(mT.first == doctest::Approx(m0.first).epsilon(1e-13));
    CHECK(mT.second == doctest::Approx(m0.second).epsilon(1e-13));
    CHECK(m0.second - m0.first == doctest::Approx(p.L).epsilon(1e-13));

    CHECK(std::abs(center_velocity(p, 0.0)) < 1e-6 * p.c);
    CHECK(std::abs(center_velocity(p, T)) < 1e-6 * p.c);

    CHECK_THROWS_AS(center_position(p, -0.1), std::domain_error);
    CHECK_THROWS_AS(center_position(p, T * 1.01), std::domain_error);
}

TEST_CASE("turnaround displacement equals d_cav for every cavity point") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(0.9, 0.8, 1.0, 1.0);
    const double mid = 2.0 * p.t_a;
    const double d = p.d_cav();
    CHECK(center_position(p, mid) - center_position(p, 0.0) ==
          doctest::Approx(d).epsilon(1e-13));
    const auto m0 = mirror_positions(p, 0.0);
    const auto mm = mirror_positions(p, mid);
    CHECK(mm.first - m0.first == doctest::Approx(d).epsilon(1e-12));
    CHECK(mm.second - m0.second == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("worldlines are continuous and subluminal") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(1.2, 0.9, 1.0, 1.0);
    const double T = p.trip_duration();
    // Include the center and mirror branch-switch times among the probes.
    const std::vector<double> knots = {p.t_a,
                                       3.0 * p.t_a,
                                       p.g_minus() * p.t_a,
                                       p.g_plus() * p.t_a,
                                       (2.0 + p.g_minus()) * p.t_a,
                                       (2.0 + p.g_plus()) * p.t_a};
    const double eps = 1e-7 * p.t_a;
    for (double t : knots) {
        const auto lo = mirror_positions(p, t - eps);
        const auto hi = mirror_positions(p, t + eps);
        CHECK(std::abs(hi.first - lo.first) < 2.0 * p.c * eps * 1.01);
        CHECK(std::abs(hi.second - lo.second) < 2.0 * p.c * eps * 1.01);
        CHECK(std::abs(center_position(p, t + eps) - center_position(p, t - eps)) <
              2.0 * p.c * eps * 1.01);
    }
    for (int i = 0; i <= 200; ++i) {
        const double t = T * i / 200;
        CHECK(std::abs(center_velocity(p, t)) < p.c);
    }
}

TEST_CASE("d_cav non-relativistic limit is a t_a^2") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(1e-5, 0.1, 1.0, 1.0);
    CHECK(p.d_cav() == doctest::Approx(p.a * p.t_a * p.t_a).epsilon(1e-4));
}

TEST_CASE("rindler length closed form") {
    // atanh(1/2)/(1/2) = ln 3 at h = 1.
    const TrajectoryPlan p = TrajectoryPlan::from_h(1.0, 1.0, 1.0, 1.0);
    CHECK(rindler_length(p) == doctest::Approx(1.0986122886681098).epsilon(1e-14));

    // Series branch joins the direct formula smoothly.
    const TrajectoryPlan q1 = TrajectoryPlan::from_h(2.1e-6, 1.0, 1.0, 1.0);
    const TrajectoryPlan q2 = TrajectoryPlan::from_h(1.9e-6, 1.0, 1.0, 1.0);
    const double r1 = rindler_length(q1) - 1.0;
    const double r2 = rindler_length(q2) - 1.0;
    // The excess is ~3e-13 here, so the quotient carries ~1e-3 of rounding
    // noise; a lost branch would show up as an O(1) mismatch.
    CHECK(r1 / (q1.h() * q1.h()) == doctest::Approx(r2 / (q2.h() * q2.h())).epsilon(1e-2));
}

TEST_CASE("proper time closed form and quadrature oracle") {
    const TrajectoryPlan p = TrajectoryPlan::from_acceleration(1.0, 1.0, 0.5, 1.0);
    CHECK(proper_time_round_trip(p) == doctest::Approx(3.525494348078172).epsilon(1e-14));
    CHECK(proper_time_round_trip(p) ==
          doctest::Approx(4.0 * rindler_segment_duration(p, p.t_a)).epsilon(1e-15));

    // Independent check: integrate the center's Lorentz factor piecewise.
    const TrajectoryPlan q = TrajectoryPlan::from_h(0.8, 1.0, 1.0, 1.0);
    auto gamma_inv = [&](double t) {
        const double v = center_velocity(q, t) / q.c;
        return std::sqrt(1.0 - v * v);
    };
    const double tau = simpson(gamma_inv, 0.0, q.t_a, 1000) +
                       simpson(gamma_inv, q.t_a, 3.0 * q.t_a, 2000) +
                       simpson(gamma_inv, 3.0 * q.t_a, q.trip_duration(), 1000);
    CHECK(proper_time_round_trip(q) == doctest::Approx(tau).epsilon(1e-6));
}

TEST_CASE("segment duration reduces to lab time when a -> 0") {
    const TrajectoryPlan p = TrajectoryPlan::from_h(1e-8, 0.5, 1.0, 1.0);
    CHECK(rindler_segment_duration(p, p.t_a) == doctest::Approx(p.t_a).epsilon(1e-9));
}

} // TEST_SUITE
