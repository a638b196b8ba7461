#include "cavsim/fourier_flux.hpp"

#include "cavsim/errors.hpp"
#include "cavsim/robin_cavity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace cavsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Model in rectangular parameters theta = (offset, A_1..A_N, B_1..B_N):
// flux(t) = offset + sum A_k cos(k w t) + B_k sin(k w t).
double eval_rect(const Eigen::VectorXd& theta, int n_harm, double w, double t) {
    double v = theta(0);
    for (int k = 1; k <= n_harm; ++k)
        v += theta(k) * std::cos(k * w * t) + theta(n_harm + k) * std::sin(k * w * t);
    return v;
}

struct FitContext {
    const std::vector<double>* samples;
    double period;
    double w;
    double half_quantum;
    double domain_edge;
    const PhysicalConstants* constants;

    int m() const { return static_cast<int>(samples->size()); }
    double t_at(int i) const { return i * period / m(); }
};

double fit_cost(const FitContext& ctx, const Eigen::VectorXd& theta, int n_harm,
                Eigen::VectorXd* out) {
    const int m = ctx.m();
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double f = eval_rect(theta, n_harm, ctx.w, ctx.t_at(i));
        if (!(std::abs(f) < ctx.domain_edge))
            return std::numeric_limits<double>::infinity();
        const double r = delta_L_eff(f, *ctx.constants) -
                         delta_L_eff((*ctx.samples)[i], *ctx.constants);
        if (out) (*out)(i) = r;
        sum += r * r;
    }
    return sum;
}

// Exact trigonometric least squares on the flux itself (the uniform
// full-period grid makes the basis orthogonal). The linear fit can overshoot
// the half-quantum when the target hugs it (few harmonics, plateau-and-dip
// waveforms); shrink the harmonic part until the series sits inside the
// band, so the refinement starts admissible.
Eigen::VectorXd trig_seed(const FitContext& ctx, int n_harm) {
    const int m = ctx.m();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * n_harm + 1);
    for (int i = 0; i < m; ++i) theta(0) += (*ctx.samples)[i];
    theta(0) /= m;
    for (int k = 1; k <= n_harm; ++k) {
        double ac = 0.0, as = 0.0;
        for (int i = 0; i < m; ++i) {
            ac += (*ctx.samples)[i] * std::cos(k * ctx.w * ctx.t_at(i));
            as += (*ctx.samples)[i] * std::sin(k * ctx.w * ctx.t_at(i));
        }
        theta(k) = 2.0 * ac / m;
        theta(n_harm + k) = 2.0 * as / m;
    }
    const double bound = ctx.half_quantum * (1.0 - 1e-6);
    theta(0) = std::min(theta(0), ctx.half_quantum * (1.0 - 1e-5));
    double scale = 1.0;
    for (int i = 0; i < m; ++i) {
        const double harm = eval_rect(theta, n_harm, ctx.w, ctx.t_at(i)) - theta(0);
        if (theta(0) + scale * harm > bound)
            scale = (bound - theta(0)) / harm;
        else if (theta(0) + scale * harm < -bound)
            scale = -(bound + theta(0)) / harm;
    }
    if (scale < 1.0)
        for (int k = 1; k <= 2 * n_harm; ++k) theta(k) *= scale;
    return theta;
}

struct Refined {
    Eigen::VectorXd theta;
    double cost = std::numeric_limits<double>::infinity();
    int accepted = 0;
};

// Levenberg-damped Gauss-Newton against the effective-length residual. Only
// improving steps are accepted, so the returned cost never exceeds the
// seed's; the metric's slope diverges at the half-quantum edge and keeps
// accepted steps admissible.
Refined gn_refine(const FitContext& ctx, Eigen::VectorXd theta, int n_harm) {
    const int m = ctx.m();
    const int n_par = 2 * n_harm + 1;
    Refined out;
    Eigen::VectorXd r(m);
    double cost = fit_cost(ctx, theta, n_harm, &r);
    if (!std::isfinite(cost)) return out;

    const double dldphi_scale = kPi / ctx.constants->Phi0;
    double damping = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::MatrixXd jac(m, n_par);
        for (int i = 0; i < m; ++i) {
            const double t = ctx.t_at(i);
            const double f = eval_rect(theta, n_harm, ctx.w, t);
            const double u = kPi * f / ctx.constants->Phi0;
            // d delta_L_eff / d flux = delta_L_eff * tan(u) * pi/Phi0 (cos > 0 domain).
            const double slope =
                delta_L_eff(f, *ctx.constants) * std::tan(u) * dldphi_scale;
            jac(i, 0) = slope;
            for (int k = 1; k <= n_harm; ++k) {
                jac(i, k) = slope * std::cos(k * ctx.w * t);
                jac(i, n_harm + k) = slope * std::sin(k * ctx.w * t);
            }
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool stepped = false;
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += damping * jtj.diagonal().maxCoeff();
            const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
            const Eigen::VectorXd cand = theta + step;
            Eigen::VectorXd r_cand(m);
            const double cost_cand = fit_cost(ctx, cand, n_harm, &r_cand);
            if (cost_cand < cost) {
                const double rel_drop = (cost - cost_cand) / std::max(cost, 1e-300);
                theta = cand;
                r = r_cand;
                cost = cost_cand;
                damping = (damping == 0.0) ? 0.0 : damping * 0.25;
                ++out.accepted;
                stepped = true;
                if (rel_drop < 1e-12) iter = 50;
                break;
            }
            damping = (damping == 0.0) ? 1e-6 : damping * 10.0;
        }
        if (!stepped) break;
    }
    out.theta = std::move(theta);
    out.cost = cost;
    return out;
}

} // namespace

double FourierFlux::evaluate(double t) const {
    const double w = 2.0 * kPi / period;
    double v = offset;
    for (int k = 1; k <= n_harmonics(); ++k)
        v += amplitude[k - 1] * std::cos(k * w * t + phase[k - 1]);
    return v;
}

FourierFlux fit_flux(const std::vector<double>& flux_samples, double period,
                     int n_harmonics, const PhysicalConstants& constants) {
    constants.validate();
    if (!(period > 0.0)) throw std::invalid_argument("fit_flux: period must be positive");
    if (n_harmonics < 1) throw std::invalid_argument("fit_flux: need at least 1 harmonic");
    const int m = static_cast<int>(flux_samples.size());
    if (m < 64 * n_harmonics)
        throw std::invalid_argument("fit_flux: need at least 64 samples per harmonic");
    const double half_quantum = 0.5 * constants.Phi0;
    for (double s : flux_samples)
        if (!(s >= 0.0) || !(s < half_quantum * (1.0 - 1e-12)))
            throw std::invalid_argument("fit_flux: target flux outside [0, Phi0/2)");

    FitContext ctx;
    ctx.samples = &flux_samples;
    ctx.period = period;
    ctx.w = 2.0 * kPi / period;
    ctx.half_quantum = half_quantum;
    ctx.domain_edge = half_quantum * (1.0 - 1e-9);
    ctx.constants = &constants;

    // Warm-start cascade: refine k = 1..N in turn, seeding each stage with
    // both the zero-padded solution from the stage below and a fresh
    // trigonometric fit, keeping whichever refines lower. The padded seed
    // reproduces the previous stage's residual exactly, so the final cost is
    // non-increasing in the harmonic count, and a shallow basin found by the
    // direct seed at high N cannot win against the cascaded one.
    Refined best;
    int total_accepted = 0;
    for (int k = 1; k <= n_harmonics; ++k) {
        Refined stage = gn_refine(ctx, trig_seed(ctx, k), k);
        total_accepted += stage.accepted;
        if (k > 1 && std::isfinite(best.cost)) {
            Eigen::VectorXd padded = Eigen::VectorXd::Zero(2 * k + 1);
            padded(0) = best.theta(0);
            padded.segment(1, k - 1) = best.theta.segment(1, k - 1);
            padded.segment(k + 1, k - 1) = best.theta.segment(k, k - 1);
            Refined warm = gn_refine(ctx, std::move(padded), k);
            total_accepted += warm.accepted;
            if (warm.cost < stage.cost) stage = std::move(warm);
        }
        if (!std::isfinite(stage.cost))
            throw FitError("fit_flux: no admissible initialization inside |flux| < Phi0/2",
                           stage.cost);
        best = std::move(stage);
    }

    FourierFlux out;
    out.offset = best.theta(0);
    out.period = period;
    out.amplitude.resize(n_harmonics);
    out.phase.resize(n_harmonics);
    for (int k = 1; k <= n_harmonics; ++k) {
        const double a = best.theta(k);
        const double b = best.theta(n_harmonics + k);
        out.amplitude[k - 1] = std::hypot(a, b);
        out.phase[k - 1] = (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(-b, a);
    }
    out.residual_rms = std::sqrt(best.cost / m);
    out.iterations = total_accepted;
    return out;
}

double harmonic_budget(double t_a, int n_harmonics) {
    if (!(t_a > 0.0)) throw std::invalid_argument("harmonic_budget: t_a must be positive");
    if (n_harmonics < 1)
        throw std::invalid_argument("harmonic_budget: need at least 1 harmonic");
    return n_harmonics / (4.0 * t_a);
}

void write_waveform_table(std::ostream& os, const FourierFlux& flux, int samples) {
    if (samples < 2) throw std::invalid_argument("write_waveform_table: samples < 2");
    char line[128];
    std::snprintf(line, sizeof line, "# period_s %.12e\n", flux.period);
    os << line;
    std::snprintf(line, sizeof line, "# harmonics %d\n", flux.n_harmonics());
    os << line;
    std::snprintf(line, sizeof line, "# residual_rms_m %.12e\n", flux.residual_rms);
    os << line;
    os << "# time_s flux_Wb\n";
    for (int i = 0; i <= samples; ++i) {
        const double t = flux.period * i / samples;
        std::snprintf(line, sizeof line, "%.12e %.12e\n", t, flux.evaluate(t));
        os << line;
    }
}

} // namespace cavsim
