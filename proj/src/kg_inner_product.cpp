#include "cavsim/kg_inner_product.hpp"
#include "cavsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cavsim {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric half listed).
constexpr std::array<double, 8> kNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

} // namespace

std::complex<double> kg_inner_product(const SliceMode& a, const SliceMode& b,
                                      const SliceSurface& surface, double abs_tol) {
    const double lo = std::max({a.support_min, b.support_min, surface.s_min});
    const double hi = std::min({a.support_max, b.support_max, surface.s_max});
    if (!(lo < hi))
        throw std::domain_error("kg_inner_product: mode supports do not overlap the surface");

    const std::complex<double> i_unit(0.0, 1.0);
    auto integrand = [&](double s) {
        const std::complex<double> av = a.value(s);
        const std::complex<double> bt = std::conj(b.time_deriv(s));
        const std::complex<double> bv = std::conj(b.value(s));
        const std::complex<double> at = a.time_deriv(s);
        const double w = surface.measure ? surface.measure(s) : 1.0;
        return (-i_unit / surface.c) * (av * bt - bv * at) * w;
    };

    auto integrate = [&](int panels) {
        std::complex<double> total(0.0, 0.0);
        const double dw = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = lo + (p + 0.5) * dw;
            const double half = 0.5 * dw;
            std::complex<double> acc(0.0, 0.0);
            for (int q = 0; q < 8; ++q) {
                acc += kWeights[q] * (integrand(mid + half * kNodes[q]) +
                                      integrand(mid - half * kNodes[q]));
            }
            total += acc * half;
        }
        return total;
    };

    constexpr int kMaxPanels = 1 << 14;
    std::complex<double> prev = integrate(4);
    for (int panels = 8; panels <= kMaxPanels; panels *= 2) {
        const std::complex<double> cur = integrate(panels);
        if (std::abs(cur - prev) < abs_tol) return cur;
        prev = cur;
    }
    throw QuadratureError("kg_inner_product: failed to reach tolerance " +
                              std::to_string(abs_tol),
                          std::abs(prev));
}

} // namespace cavsim
