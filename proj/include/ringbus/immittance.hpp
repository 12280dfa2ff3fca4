#pragma once

#include <cmath>
#include <complex>

namespace ringbus {

// Impedance or admittance of a lossless one-port. Open circuits and
// resonance poles are represented explicitly instead of as overflow.
struct ComplexImmittance {
    enum class Kind { Impedance, Admittance };

    std::complex<double> value{0.0, 0.0};
    Kind kind = Kind::Impedance;
    bool pole = false; // infinite magnitude (open circuit / resonance)

    static ComplexImmittance impedance(std::complex<double> z) {
        return {z, Kind::Impedance, false};
    }
    static ComplexImmittance admittance(std::complex<double> y) {
        return {y, Kind::Admittance, false};
    }
    static ComplexImmittance short_circuit() { return impedance({0.0, 0.0}); }
    static ComplexImmittance open_circuit() {
        return {{0.0, 0.0}, Kind::Impedance, true};
    }

    bool is_short() const {
        return !pole && kind == Kind::Impedance && value == std::complex<double>{0.0, 0.0};
    }
    bool is_open() const { return pole && kind == Kind::Impedance; }

    // Impedance view; an admittance pole maps to a short.
    ComplexImmittance as_impedance() const {
        if (kind == Kind::Impedance) return *this;
        if (pole) return short_circuit();
        if (value == std::complex<double>{0.0, 0.0}) return open_circuit();
        return impedance(1.0 / value);
    }

    // For a lossless element the finite value is purely imaginary.
    bool is_reactive(double rel_tol = 1e-12) const {
        if (pole) return true;
        return std::abs(value.real()) < rel_tol * std::abs(value) ||
               value == std::complex<double>{0.0, 0.0};
    }
};

} // namespace ringbus
