#pragma once

#include <cmath>
#include <complex>
#include <span>

namespace ringbus {

using Complex = std::complex<double>;

// Chain (ABCD) matrix of a reciprocal two-port. a, d dimensionless,
// b in ohm, c in siemens.
struct TwoPort {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};
    Complex d{1.0, 0.0};
    double frequency_hz = 0.0;

    static TwoPort identity(double freq_hz = 0.0) {
        return TwoPort{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, freq_hz};
    }

    Complex determinant() const { return a * d - b * c; }

    bool is_reciprocal(double tol = 1e-9) const {
        return std::abs(determinant() - 1.0) < tol;
    }

    // a, d real and b, c imaginary up to a relative tolerance.
    bool is_lossless(double rel_tol = 1e-9) const {
        double scale = std::abs(a) + std::abs(d) + 1.0;
        double bscale = std::abs(b) + 1.0;
        double cscale = std::abs(c) + 1.0;
        return std::abs(a.imag()) < rel_tol * scale &&
               std::abs(d.imag()) < rel_tol * scale &&
               std::abs(b.real()) < rel_tol * bscale &&
               std::abs(c.real()) < rel_tol * cscale;
    }

    TwoPort operator*(const TwoPort& o) const {
        return TwoPort{a * o.a + b * o.c, a * o.b + b * o.d,
                       c * o.a + d * o.c, c * o.b + d * o.d,
                       frequency_hz != 0.0 ? frequency_hz : o.frequency_hz};
    }

    // Transmission coefficient into reference impedance z0 at both ports.
    Complex s21(double z0) const {
        return 2.0 / (a + b / z0 + c * z0 + d);
    }
};

// Matrix product in the listed order (first element is the input side).
TwoPort cascade(std::span<const TwoPort> elements);

// Series coupling capacitor: [[1, -j/(w C)], [0, 1]].
TwoPort series_capacitor(double capacitance_f, double freq_hz);

} // namespace ringbus
