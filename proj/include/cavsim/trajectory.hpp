#pragma once

#include <utility>

namespace cavsim {

// Round trip of a rigidly accelerated cavity: four contiguous segments of
// constant proper acceleration (magnitude a at the cavity center), lab
// duration 4 t_a, returning to rest at the starting position.
//
//   [0, t_a]      accelerate away (+a)
//   [t_a, 3 t_a]  decelerate, turn around, accelerate back (-a)
//   [3 t_a, 4 t_a] decelerate to rest (+a)
//
// Rigid means every cavity point has constant proper length to the center;
// the mirrors follow their own hyperbolae and switch segments where the
// center's instantaneous simultaneity slice crosses their worldlines, at lab
// times g_minus t_a / g_plus t_a and (2 + g_plus) t_a / (2 + g_minus) t_a.
//
// h = a L / c^2 in (0, 2) measures how relativistic the cavity is as a whole;
// g_plus_minus = 1 +/- h/2. All positions are lab-frame, with the cavity center
// starting at x = c^2 / a (the standard hyperbola apex).
struct TrajectoryPlan {
    double a;    // proper acceleration of the cavity center [m/s^2]
    double t_a;  // lab duration of the first segment [s]
    double L;    // proper cavity length [m]
    double c;    // propagation speed [m/s]

    static TrajectoryPlan from_acceleration(double a, double t_a, double L, double c);
    static TrajectoryPlan from_h(double h, double t_a, double L, double c);

    double h() const { return a * L / (c * c); }
    double g_plus() const { return 1.0 + 0.5 * h(); }
    double g_minus() const { return 1.0 - 0.5 * h(); }
    double trip_duration() const { return 4.0 * t_a; }

    // Net displacement of the cavity at the turnaround point.
    double d_cav() const;
};

// Lab position of the cavity center at lab time t in [0, 4 t_a].
double center_position(const TrajectoryPlan& plan, double t);

// Lab positions (left mirror, right mirror) at lab time t in [0, 4 t_a].
std::pair<double, double> mirror_positions(const TrajectoryPlan& plan, double t);

// Proper time elapsed at the cavity center over the full round trip,
// 4 (c/a) asinh(a t_a / c).
double proper_time_round_trip(const TrajectoryPlan& plan);

// Rindler time elapsed during one constant-acceleration stretch of lab
// duration `segment_lab_time`: (c/a) asinh(a t / c). Equals the proper time of
// the cavity center over that stretch.
double rindler_segment_duration(const TrajectoryPlan& plan, double segment_lab_time);

// Proper length of the cavity expressed in the comoving (Rindler) chart whose
// time coordinate is the center's proper time: L' = L * atanh(h/2) / (h/2).
double rindler_length(const TrajectoryPlan& plan);

} // namespace cavsim
