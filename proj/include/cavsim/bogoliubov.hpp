#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace cavsim {

// Linear transformation between two sets of bosonic mode operators,
//
//     b_m = sum_n ( conj(alpha_mn) a_n - conj(beta_mn) a_n^dagger ),
//
// stored as the dense complex matrices (alpha, beta). A physically valid
// transform satisfies
//
//     alpha alpha^dagger - beta beta^dagger = I        (unitarity)
//     alpha beta^T - beta alpha^T           = 0        (symplectic condition)
//
// up to mode-truncation error. Each instance carries its own defect budget
// `identity_tolerance`; composition grows the budget, so long products of
// individually-valid transforms stay composable while genuinely corrupt inputs
// are rejected. `physical = false` marks deliberately non-physical diagnostic
// transforms (e.g. with particle creation stripped); identity checks are
// skipped for those.
struct BogoliubovTransform {
    Eigen::MatrixXcd alpha;
    Eigen::MatrixXcd beta;
    double identity_tolerance = 0.0;
    bool physical = true;

    int n_modes() const { return static_cast<int>(alpha.rows()); }

    static double default_tolerance(int n_modes) { return 1e-8 * n_modes; }

    static BogoliubovTransform identity(int n_modes);
};

// Max-norm of alpha alpha^dagger - beta beta^dagger - I.
double unitarity_defect(const BogoliubovTransform& t);

// Max-norm of alpha beta^T - beta alpha^T.
double symplectic_defect(const BogoliubovTransform& t);

// Larger of the two defects.
double identity_defect(const BogoliubovTransform& t);

// Both defects restricted to the leading corner x corner block of the residual
// matrices (the row/column sums still run over all n_modes). A transform
// truncated from an infinite mode ladder always carries an O(1) defect in its
// highest rows, while the corner that couples only weakly to the cut converges
// as the ladder grows; this measures that converged part.
double identity_defect(const BogoliubovTransform& t, int corner);

// Apply `first`, then `second`. Throws BogoliubovDefectError if a physical input
// violates its own identity budget, std::invalid_argument on dimension mismatch.
BogoliubovTransform compose(const BogoliubovTransform& first,
                            const BogoliubovTransform& second);

// Inverse transform (alpha^dagger, -beta^T), derived from the symplectic
// structure; valid only for physical transforms.
BogoliubovTransform inverse(const BogoliubovTransform& t);

// Free evolution for `duration` in a stationary basis with the given mode
// frequencies: each annihilation operator picks up exp(-i omega_n duration),
// i.e. alpha = diag(exp(+i omega_n duration)), beta = 0. With this sign a
// static cavity's clock phase decreases at rate omega_1.
BogoliubovTransform free_evolution(const std::vector<double>& omega, double duration);

// Phase of the clock mode (mode 1) extracted from a transform:
//     Delta theta = atan2(-Im(alpha_11 - beta_11), Re(alpha_11 - beta_11)),
// principal value in (-pi, pi]. Throws std::domain_error if alpha_11 == beta_11.
double clock_phase(const BogoliubovTransform& t);

// Same transform with beta forced to zero: the mode-mixing-only comparison
// object. Marked non-physical; do not feed to inverse().
BogoliubovTransform strip_particle_creation(const BogoliubovTransform& t);

// Compose a single round-trip transform with itself `count` times
// (exponentiation by squaring). Requires the transform's start and end bases
// to coincide, which the caller must guarantee.
BogoliubovTransform repeat_trips(const BogoliubovTransform& single_trip, long count);

// Unwrap a principal-value angle to the 2 pi branch nearest `anchor`.
double unwrap_near(double anchor, double principal);

// Clock-mode phase bookkeeping for one simulated scenario point.
// theta_rel = theta_raw - theta_static always; theta_static is the phase a
// static Dirichlet cavity of the same proper length accrues over the same lab
// time (-omega_D1 * elapsed_lab_time).
struct PhaseRecord {
    double theta_raw = 0.0;     // unwrapped clock phase of the transform [rad]
    double theta_static = 0.0;  // static Dirichlet reference phase [rad]
    double theta_rel = 0.0;     // theta_raw - theta_static [rad]

    static PhaseRecord relative_to_static(double raw_unwrapped, double omega_ref,
                                          double elapsed_lab_time);
};

} // namespace cavsim
