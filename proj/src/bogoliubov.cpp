#include "cavsim/bogoliubov.hpp"
#include "cavsim/errors.hpp"

#include <cmath>
#include <numbers>

namespace cavsim {

namespace {

double max_abs(const Eigen::MatrixXcd& m) {
    return m.cwiseAbs().maxCoeff();
}

void require_same_shape(const BogoliubovTransform& t, const char* who) {
    if (t.alpha.rows() != t.alpha.cols() || t.beta.rows() != t.beta.cols() ||
        t.alpha.rows() != t.beta.rows() || t.alpha.rows() < 1)
        throw std::invalid_argument(std::string(who) + ": alpha/beta must be equal square matrices");
}

void require_valid(const BogoliubovTransform& t, const char* who) {
    require_same_shape(t, who);
    if (!t.physical) return;
    const double defect = identity_defect(t);
    if (defect > t.identity_tolerance)
        throw BogoliubovDefectError(std::string(who) + ": input violates Bogoliubov identities (defect " +
                                        std::to_string(defect) + " > tolerance " +
                                        std::to_string(t.identity_tolerance) + ")",
                                    defect);
}

} // namespace

BogoliubovTransform BogoliubovTransform::identity(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("identity: n_modes must be >= 1");
    BogoliubovTransform t;
    t.alpha = Eigen::MatrixXcd::Identity(n_modes, n_modes);
    t.beta = Eigen::MatrixXcd::Zero(n_modes, n_modes);
    t.identity_tolerance = default_tolerance(n_modes);
    return t;
}

double unitarity_defect(const BogoliubovTransform& t) {
    const int n = t.n_modes();
    Eigen::MatrixXcd d = t.alpha * t.alpha.adjoint() - t.beta * t.beta.adjoint() -
                         Eigen::MatrixXcd::Identity(n, n);
    return max_abs(d);
}

double symplectic_defect(const BogoliubovTransform& t) {
    Eigen::MatrixXcd d = t.alpha * t.beta.transpose() - t.beta * t.alpha.transpose();
    return max_abs(d);
}

double identity_defect(const BogoliubovTransform& t) {
    return std::max(unitarity_defect(t), symplectic_defect(t));
}

double identity_defect(const BogoliubovTransform& t, int corner) {
    const int n = t.n_modes();
    if (corner < 1 || corner > n)
        throw std::invalid_argument("identity_defect: corner must be in [1, n_modes]");
    const Eigen::MatrixXcd u = t.alpha * t.alpha.adjoint() - t.beta * t.beta.adjoint() -
                               Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd s = t.alpha * t.beta.transpose() - t.beta * t.alpha.transpose();
    return std::max(u.topLeftCorner(corner, corner).cwiseAbs().maxCoeff(),
                    s.topLeftCorner(corner, corner).cwiseAbs().maxCoeff());
}

BogoliubovTransform compose(const BogoliubovTransform& first,
                            const BogoliubovTransform& second) {
    require_valid(first, "compose(first)");
    require_valid(second, "compose(second)");
    if (first.n_modes() != second.n_modes())
        throw std::invalid_argument("compose: mode-count mismatch");

    // Substituting the first transform into the second:
    //   b'' = conj(A) b - conj(B) b^dag,  b = conj(alpha) a - conj(beta) a^dag
    // gives alpha_tot = A alpha + B conj(beta), beta_tot = A beta + B conj(alpha).
    BogoliubovTransform out;
    out.alpha = second.alpha * first.alpha + second.beta * first.beta.conjugate();
    out.beta = second.alpha * first.beta + second.beta * first.alpha.conjugate();
    out.identity_tolerance = first.identity_tolerance + second.identity_tolerance +
                             1e-12 * first.n_modes();
    out.physical = first.physical && second.physical;
    return out;
}

BogoliubovTransform inverse(const BogoliubovTransform& t) {
    require_same_shape(t, "inverse");
    if (!t.physical)
        throw std::invalid_argument("inverse: non-physical transform has no symplectic inverse");
    const double defect = identity_defect(t);
    if (defect > t.identity_tolerance)
        throw BogoliubovDefectError("inverse: input violates Bogoliubov identities (defect " +
                                        std::to_string(defect) + ")",
                                    defect);
    // From the dual identities alpha^dag alpha - beta^T conj(beta) = I and
    // alpha^dag beta = beta^T conj(alpha), the inverse in the same convention is
    // (alpha^dag, -beta^T).
    BogoliubovTransform out;
    out.alpha = t.alpha.adjoint();
    out.beta = -t.beta.transpose();
    out.identity_tolerance = 2.0 * t.identity_tolerance;
    return out;
}

BogoliubovTransform free_evolution(const std::vector<double>& omega, double duration) {
    const int n = static_cast<int>(omega.size());
    if (n < 1) throw std::invalid_argument("free_evolution: need at least one frequency");
    for (double w : omega)
        if (!(w > 0.0)) throw std::invalid_argument("free_evolution: frequencies must be positive");
    BogoliubovTransform t = BogoliubovTransform::identity(n);
    for (int i = 0; i < n; ++i)
        t.alpha(i, i) = std::polar(1.0, omega[i] * duration);
    return t;
}

double clock_phase(const BogoliubovTransform& t) {
    require_same_shape(t, "clock_phase");
    const std::complex<double> z = t.alpha(0, 0) - t.beta(0, 0);
    if (std::abs(z) == 0.0)
        throw std::domain_error("clock_phase: alpha_11 - beta_11 vanishes; phase undefined");
    return std::atan2(-z.imag(), z.real());
}

BogoliubovTransform strip_particle_creation(const BogoliubovTransform& t) {
    require_same_shape(t, "strip_particle_creation");
    BogoliubovTransform out = t;
    out.beta.setZero();
    out.physical = false;
    return out;
}

BogoliubovTransform repeat_trips(const BogoliubovTransform& single_trip, long count) {
    require_same_shape(single_trip, "repeat_trips");
    if (count < 1) throw std::invalid_argument("repeat_trips: count must be >= 1");
    BogoliubovTransform result = BogoliubovTransform::identity(single_trip.n_modes());
    result.physical = single_trip.physical;
    BogoliubovTransform base = single_trip;
    long k = count;
    while (k > 0) {
        if (k & 1) result = compose(result, base);
        k >>= 1;
        if (k > 0) base = compose(base, base);
    }
    return result;
}

double unwrap_near(double anchor, double principal) {
    const double two_pi = 2.0 * std::numbers::pi;
    return principal + two_pi * std::round((anchor - principal) / two_pi);
}

PhaseRecord PhaseRecord::relative_to_static(double raw_unwrapped, double omega_ref,
                                            double elapsed_lab_time) {
    PhaseRecord r;
    r.theta_raw = raw_unwrapped;
    r.theta_static = -omega_ref * elapsed_lab_time;
    r.theta_rel = r.theta_raw - r.theta_static;
    return r;
}

} // namespace cavsim
