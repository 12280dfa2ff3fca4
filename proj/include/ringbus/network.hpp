#pragma once

#include <utility>

#include "ringbus/immittance.hpp"
#include "ringbus/two_port.hpp"

namespace ringbus {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Transmission-line section. Electrical length is stored as a fraction of
// a reference ring whose fundamental has a full turn of 2*pi, so
// beta*x = 2*pi * (f / fundamental) * fraction; no physical length needed.
struct LineSection {
    double characteristic_impedance_ohm = 50.0;
    double ring_fraction = 0.0;      // x / L, in [0, 1]
    double fundamental_hz = 0.0;     // ring fundamental that fixes the scale

    double electrical_angle(double freq_hz) const {
        return kTwoPi * (freq_hz / fundamental_hz) * ring_fraction;
    }
};

// Two taps on one ring separated by angle theta.
struct RingTapPair {
    double theta_rad = 0.0;          // in (0, 2*pi)
    double fundamental_hz = 0.0;     // ring fundamental
    double z_ring_ohm = 50.0;        // characteristic impedance of the ring
    double z0_ohm = 50.0;            // reference port impedance (cancels)

    double r() const { return z_ring_ohm / z0_ohm; }
    void validate() const;
};

// Ring tap-to-tap ABCD in numerator form: every entry shares the real
// denominator s, so resonance poles stay representable. a = d = na/s,
// b = j*nb/s (ohm), c = j*nc/s (siemens).
struct ReducedRingTwoPort {
    double na = 0.0;
    double nb = 0.0;
    double nc = 0.0;
    double s = 1.0;
    double frequency_hz = 0.0;

    TwoPort to_two_port() const {
        return TwoPort{{na / s, 0.0}, {0.0, nb / s}, {0.0, nc / s}, {na / s, 0.0},
                       frequency_hz};
    }
};

// Impedance seen through a line section terminated in the given load.
// A transformation pole (resonance at the input plane) is returned as an
// open-circuit immittance, not an error.
ComplexImmittance transform_impedance(const ComplexImmittance& load,
                                      const LineSection& line, double freq_hz);

// Even/odd-mode impedances of the bisected ring (open / short stubs in
// parallel). Resonance poles come back tagged.
std::pair<ComplexImmittance, ComplexImmittance>
even_odd_impedances(const RingTapPair& pair, double freq_hz);

// Port reflection coefficients of the even and odd mode; unit magnitude
// for the lossless ring.
std::pair<Complex, Complex> reflection_coefficients(const RingTapPair& pair,
                                                    double freq_hz);

// Scattered-wave amplitudes at the driven and coupled tap,
// (gamma_e + gamma_o)/2 and (gamma_e - gamma_o)/2.
std::pair<Complex, Complex> tap_wave_amplitudes(const RingTapPair& pair,
                                                double freq_hz);

// Pole-safe numerator form of the tap-to-tap ABCD matrix.
ReducedRingTwoPort ring_reduced(const RingTapPair& pair, double freq_hz);

// Tap-to-tap ABCD matrix of the ring. Throws DecoupledPortsError when the
// two-path interference nulls the transmission (|K2| below the floor).
TwoPort ring_two_port(const RingTapPair& pair, double freq_hz,
                      double k2_floor = 1e-12);

// Closed form at the midpoint of two adjacent ring modes (half-integer k):
// a = d = 0, b = jZ', c = j/Z' with Z'(theta) = (Z_R/2) sin(k*theta).
TwoPort special_frequency_two_port(double theta_rad, double k, double z_ring_ohm);

} // namespace ringbus
