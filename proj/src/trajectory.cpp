#include "cavsim/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cavsim {

namespace {

void validate(const TrajectoryPlan& p) {
    if (!(p.a > 0.0)) throw std::invalid_argument("TrajectoryPlan: a must be > 0");
    if (!(p.t_a > 0.0)) throw std::invalid_argument("TrajectoryPlan: t_a must be > 0");
    if (!(p.L > 0.0)) throw std::invalid_argument("TrajectoryPlan: L must be > 0");
    if (!(p.c > 0.0)) throw std::invalid_argument("TrajectoryPlan: c must be > 0");
    const double h = p.a * p.L / (p.c * p.c);
    if (!(h < 2.0))
        throw std::invalid_argument("TrajectoryPlan: h = aL/c^2 = " + std::to_string(h) +
                                    " >= 2; rear of the cavity would fall behind the horizon");
}

void check_time(const TrajectoryPlan& p, double t) {
    // Allow a whisker of slack so t = 4 t_a computed as a sum of steps is accepted.
    const double slack = 1e-12 * p.trip_duration();
    if (t < -slack || t > p.trip_duration() + slack)
        throw std::domain_error("trajectory time outside [0, 4 t_a]");
}

// Hyperbola branch x(t) = sqrt(c^2 (t-t0)^2 + X0^2), apex at (t0, X0).
double hyperbola(double c, double t, double t0, double X0) {
    return std::hypot(c * (t - t0), X0);
}

} // namespace

TrajectoryPlan TrajectoryPlan::from_acceleration(double a, double t_a, double L, double c) {
    TrajectoryPlan p{a, t_a, L, c};
    validate(p);
    return p;
}

TrajectoryPlan TrajectoryPlan::from_h(double h, double t_a, double L, double c) {
    if (!(h > 0.0)) throw std::invalid_argument("TrajectoryPlan: h must be > 0");
    TrajectoryPlan p{h * c * c / L, t_a, L, c};
    validate(p);
    return p;
}

double TrajectoryPlan::d_cav() const {
    // 2 sqrt(c^2 t_a^2 + c^4/a^2) - 2 c^2/a, written to avoid cancellation:
    // 2 (c^2/a) (sqrt(1+u^2) - 1) = 2 (c^2/a) u^2 / (sqrt(1+u^2) + 1), u = a t_a / c.
    const double u = a * t_a / c;
    return 2.0 * (c * c / a) * u * u / (std::sqrt(1.0 + u * u) + 1.0);
}

double center_position(const TrajectoryPlan& plan, double t) {
    check_time(plan, t);
    const double c = plan.c;
    const double X0 = c * c / plan.a;
    const double R = hyperbola(c, plan.t_a, 0.0, X0); // position at the first switch's apex radius
    if (t <= plan.t_a) return hyperbola(c, t, 0.0, X0);
    if (t <= 3.0 * plan.t_a) return 2.0 * R - hyperbola(c, t, 2.0 * plan.t_a, X0);
    return hyperbola(c, t, 4.0 * plan.t_a, X0);
}

std::pair<double, double> mirror_positions(const TrajectoryPlan& plan, double t) {
    check_time(plan, t);
    const double c = plan.c;
    const double gm = plan.g_minus();
    const double gp = plan.g_plus();
    const double X0 = c * c / plan.a;
    const double R = hyperbola(c, plan.t_a, 0.0, X0);

    // Each mirror rides a hyperbola scaled by its g factor and switches branch
    // where the turnaround simultaneity slices cross it: the inner (left) mirror
    // switches early into the deceleration branch, the outer (right) one late.
    auto mirror = [&](double g_self, double t_switch1, double t_switch2) {
        if (t <= t_switch1) return hyperbola(c, t, 0.0, g_self * X0);
        if (t <= t_switch2) return 2.0 * R - hyperbola(c, t, 2.0 * plan.t_a, (2.0 - g_self) * X0);
        return hyperbola(c, t, 4.0 * plan.t_a, g_self * X0);
    };

    const double xl = mirror(gm, gm * plan.t_a, (2.0 + gp) * plan.t_a);
    const double xr = mirror(gp, gp * plan.t_a, (2.0 + gm) * plan.t_a);
    return {xl, xr};
}

double proper_time_round_trip(const TrajectoryPlan& plan) {
    return 4.0 * rindler_segment_duration(plan, plan.t_a);
}

double rindler_segment_duration(const TrajectoryPlan& plan, double segment_lab_time) {
    return (plan.c / plan.a) * std::asinh(plan.a * segment_lab_time / plan.c);
}

double rindler_length(const TrajectoryPlan& plan) {
    const double x = 0.5 * plan.h();
    // atanh(x)/x loses accuracy only in the last bits for tiny x; switch to the
    // series below 1e-6 where the direct quotient is all cancellation noise.
    if (x < 1e-6) return plan.L * (1.0 + x * x / 3.0);
    return plan.L * std::atanh(x) / x;
}

} // namespace cavsim
