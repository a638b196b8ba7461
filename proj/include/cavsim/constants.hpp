#pragma once

#include <stdexcept>

namespace cavsim {

// Parameter bundle for the superconducting waveguide and its SQUID terminations.
// c is the speed of wave propagation along the coplanar waveguide, not the vacuum
// speed of light; it is configurable because published device numbers are not all
// consistent with a single value.
struct PhysicalConstants {
    double c = 1.19e8;                 // waveguide propagation speed [m/s]
    double Phi0 = 2.067833848e-15;     // magnetic flux quantum h/(2e) [Wb]
    double L0 = 0.44e-6;               // waveguide inductance per unit length [H/m]
    double Ic = 0.5e-6;                // SQUID junction critical current [A]

    void validate() const {
        if (!(c > 0.0) || !(Phi0 > 0.0) || !(L0 > 0.0) || !(Ic > 0.0))
            throw std::invalid_argument("PhysicalConstants: all parameters must be positive");
    }

    // Minimum effective length the SQUID can realize (at zero external flux).
    double delta_L_min() const { return Phi0 / (4.0 * 3.14159265358979323846 * L0 * Ic); }

    // Same waveguide, but with L0 rescaled so that delta_L_min() equals `target`.
    // Device studies quote alternative SQUID operating points by their minimum
    // effective length; this keeps the flux <-> length mapping well defined for them.
    PhysicalConstants with_delta_L_min(double target) const {
        if (!(target > 0.0))
            throw std::invalid_argument("with_delta_L_min: target must be positive");
        PhysicalConstants out = *this;
        out.L0 = L0 * (delta_L_min() / target);
        return out;
    }
};

} // namespace cavsim
