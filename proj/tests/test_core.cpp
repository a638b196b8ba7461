#include "cavsim/bogoliubov.hpp"
#include "cavsim/errors.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>

namespace {

using namespace cavsim;
using Eigen::MatrixXcd;

constexpr double kPi = 3.14159265358979323846;

// Independent construction of a valid transform: exponentiate a random element
// of the Lie algebra (X anti-Hermitian, Y symmetric) in the doubled
// [a; a^dag] representation and read alpha/beta off the block structure.
struct GroupElement {
    MatrixXcd big;   // exp(G), 2n x 2n
    BogoliubovTransform transform;
};

MatrixXcd random_complex(int n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::complex<double>(dist(rng), dist(rng));
    return m;
}

GroupElement random_element(int n, std::mt19937& rng, double scale = 0.3) {
    const MatrixXcd w = random_complex(n, rng, scale);
    const MatrixXcd v = random_complex(n, rng, scale);
    const MatrixXcd x = 0.5 * (w - w.adjoint());
    const MatrixXcd y = 0.5 * (v + v.transpose());
    MatrixXcd g(2 * n, 2 * n);
    g.topLeftCorner(n, n) = x;
    g.topRightCorner(n, n) = y;
    g.bottomLeftCorner(n, n) = y.conjugate();
    g.bottomRightCorner(n, n) = x.conjugate();

    GroupElement e;
    e.big = g.exp();
    e.transform.alpha = e.big.topLeftCorner(n, n).conjugate();
    e.transform.beta = -e.big.topRightCorner(n, n).conjugate();
    e.transform.identity_tolerance = BogoliubovTransform::default_tolerance(n);
    return e;
}

BogoliubovTransform from_big(const MatrixXcd& big) {
    const int n = static_cast<int>(big.rows()) / 2;
    BogoliubovTransform t;
    t.alpha = big.topLeftCorner(n, n).conjugate();
    t.beta = -big.topRightCorner(n, n).conjugate();
    t.identity_tolerance = BogoliubovTransform::default_tolerance(n);
    return t;
}

double max_diff(const BogoliubovTransform& a, const BogoliubovTransform& b) {
    return std::max((a.alpha - b.alpha).cwiseAbs().maxCoeff(),
                    (a.beta - b.beta).cwiseAbs().maxCoeff());
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("random group elements satisfy both identities") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 4; ++trial) {
        const GroupElement e = random_element(6, rng);
        CHECK(unitarity_defect(e.transform) < 1e-12 * 6);
        CHECK(symplectic_defect(e.transform) < 1e-12 * 6);
    }
}

TEST_CASE("compose matches the doubled-matrix product") {
    std::mt19937 rng(777);
    const GroupElement e1 = random_element(6, rng);
    const GroupElement e2 = random_element(6, rng);
    const BogoliubovTransform composed = compose(e1.transform, e2.transform);
    const BogoliubovTransform expected = from_big(e2.big * e1.big);
    CHECK(max_diff(composed, expected) < 1e-12);
}

TEST_CASE("compose is associative") {
    std::mt19937 rng(31);
    const BogoliubovTransform a = random_element(5, rng).transform;
    const BogoliubovTransform b = random_element(5, rng).transform;
    const BogoliubovTransform c = random_element(5, rng).transform;
    CHECK(max_diff(compose(compose(a, b), c), compose(a, compose(b, c))) < 1e-11);
}

TEST_CASE("inverse closes to the identity") {
    std::mt19937 rng(99);
    const BogoliubovTransform t = random_element(8, rng).transform;
    const BogoliubovTransform round = compose(t, inverse(t));
    const int n = round.n_modes();
    CHECK((round.alpha - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(round.beta.cwiseAbs().maxCoeff() < 1e-10);

    // And against the exponential of the negated generator.
    std::mt19937 rng2(99);
    const GroupElement e = random_element(8, rng2);
    CHECK(max_diff(inverse(t), from_big(e.big.inverse())) < 1e-11);
}

TEST_CASE("free evolution phases and additivity") {
    const BogoliubovTransform f = free_evolution({1.5, 2.5}, 0.4);
    CHECK(std::abs(f.alpha(0, 0) - std::polar(1.0, 1.5 * 0.4)) == 0.0);
    CHECK(std::abs(f.alpha(1, 1) - std::polar(1.0, 2.5 * 0.4)) == 0.0);
    CHECK(f.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(clock_phase(f) == doctest::Approx(-0.6).epsilon(1e-14));

    const BogoliubovTransform g = compose(free_evolution({1.5, 2.5}, 0.7),
                                          free_evolution({1.5, 2.5}, 0.2));
    const BogoliubovTransform direct = free_evolution({1.5, 2.5}, 0.9);
    CHECK(max_diff(g, direct) < 1e-14);

    CHECK_THROWS_AS(free_evolution({1.0, -2.0}, 0.1), std::invalid_argument);
}

TEST_CASE("clock phase sign convention") {
    // A static cavity's phase decreases at omega_1.
    const double omega = 2.0 * kPi * 3.0;
    const double tau = 0.01;
    CHECK(clock_phase(free_evolution({omega}, tau)) ==
          doctest::Approx(-omega * tau).epsilon(1e-12));

    BogoliubovTransform degenerate = BogoliubovTransform::identity(2);
    degenerate.beta(0, 0) = degenerate.alpha(0, 0);
    degenerate.physical = false;
    CHECK_THROWS_AS(clock_phase(degenerate), std::domain_error);
}

TEST_CASE("strip_particle_creation zeroes beta and marks non-physical") {
    std::mt19937 rng(5150);
    const BogoliubovTransform t = random_element(4, rng).transform;
    const BogoliubovTransform s = strip_particle_creation(t);
    CHECK(s.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.alpha - t.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(s.physical);
    CHECK_THROWS_AS(inverse(s), std::invalid_argument);
}

TEST_CASE("repeat_trips equals explicit composition") {
    std::mt19937 rng(2024);
    const BogoliubovTransform t = random_element(5, rng, 0.2).transform;
    BogoliubovTransform manual = t;
    for (int k = 1; k < 7; ++k) manual = compose(manual, t);
    CHECK(max_diff(repeat_trips(t, 7), manual) < 1e-11);
    CHECK(max_diff(repeat_trips(t, 1), t) < 1e-15);
    CHECK_THROWS_AS(repeat_trips(t, 0), std::invalid_argument);
}

TEST_CASE("defect budget grows under composition and trips validation") {
    const BogoliubovTransform id = BogoliubovTransform::identity(3);
    const BogoliubovTransform twice = compose(id, id);
    CHECK(twice.identity_tolerance > id.identity_tolerance);

    BogoliubovTransform corrupt = BogoliubovTransform::identity(3);
    corrupt.alpha(0, 0) = 1.05;
    CHECK_THROWS_AS(compose(corrupt, id), BogoliubovDefectError);
    try {
        compose(corrupt, id);
    } catch (const BogoliubovDefectError& e) {
        CHECK(e.defect() > 0.05);
    }

    // Non-physical inputs skip the budget check.
    corrupt.physical = false;
    CHECK_NOTHROW(compose(corrupt, id));
}

TEST_CASE("unwrap_near picks the branch nearest the anchor") {
    CHECK(unwrap_near(31.4, 0.1) == doctest::Approx(0.1 + 10.0 * kPi).epsilon(1e-12));
    CHECK(unwrap_near(-7.0, -0.7168146928204138) ==
          doctest::Approx(-0.7168146928204138 - 2.0 * kPi).epsilon(1e-12));
    CHECK(unwrap_near(0.2, 0.1) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(unwrap_near(-0.1, 3.141) == doctest::Approx(3.141 - 2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("phase record bookkeeping") {
    const PhaseRecord rec = PhaseRecord::relative_to_static(-5.0, 2.0, 1.0);
    CHECK(rec.theta_raw == -5.0);
    CHECK(rec.theta_static == -2.0);
    CHECK(rec.theta_rel == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("identity constructor sanity") {
    const BogoliubovTransform id = BogoliubovTransform::identity(4);
    CHECK(identity_defect(id) == 0.0);
    CHECK(id.identity_tolerance == doctest::Approx(4e-8));
    CHECK_THROWS_AS(BogoliubovTransform::identity(0), std::invalid_argument);
}

} // TEST_SUITE

