#include "ringbus/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ringbus/errors.hpp"

namespace ringbus {

namespace {

constexpr Complex kJ{0.0, 1.0};

// Half-angles of the two stub sections: alpha = beta*l/2, gamma = beta*(L-l)/2.
struct StubAngles {
    double alpha;
    double gamma;
};

StubAngles stub_angles(const RingTapPair& pair, double freq_hz) {
    double phi = kTwoPi * freq_hz / pair.fundamental_hz; // beta*L
    double p1 = phi * pair.theta_rad / kTwoPi;           // beta*l
    return {0.5 * p1, 0.5 * (phi - p1)};
}

} // namespace

void RingTapPair::validate() const {
    if (!(theta_rad > 0.0) || !(theta_rad < kTwoPi))
        throw ValidationError("RingTapPair: theta must lie strictly inside (0, 2*pi)");
    if (!(fundamental_hz > 0.0))
        throw ValidationError("RingTapPair: fundamental must be positive");
    if (!(z_ring_ohm > 0.0) || !(z0_ohm > 0.0))
        throw ValidationError("RingTapPair: impedances must be positive");
}

TwoPort cascade(std::span<const TwoPort> elements) {
    if (elements.empty())
        throw std::invalid_argument("cascade: empty element list");
    TwoPort out = elements[0];
    for (std::size_t i = 1; i < elements.size(); ++i) out = out * elements[i];
    return out;
}

TwoPort series_capacitor(double capacitance_f, double freq_hz) {
    if (!(capacitance_f > 0.0))
        throw std::invalid_argument("series_capacitor: capacitance must be positive");
    if (!(freq_hz > 0.0))
        throw std::invalid_argument("series_capacitor: frequency must be positive");
    double x = -1.0 / (kTwoPi * freq_hz * capacitance_f);
    return TwoPort{{1.0, 0.0}, {0.0, x}, {0.0, 0.0}, {1.0, 0.0}, freq_hz};
}

ComplexImmittance transform_impedance(const ComplexImmittance& load,
                                      const LineSection& line, double freq_hz) {
    if (!(freq_hz > 0.0))
        throw std::invalid_argument("transform_impedance: frequency must be positive");
    if (!(line.fundamental_hz > 0.0) || !(line.characteristic_impedance_ohm > 0.0))
        throw std::invalid_argument("transform_impedance: invalid line section");

    double bx = line.electrical_angle(freq_hz);
    double cb = std::cos(bx);
    double sb = std::sin(bx);
    double zr = line.characteristic_impedance_ohm;
    ComplexImmittance zl = load.as_impedance();

    // Z_in = Zr (Zl cos + j Zr sin) / (Zr cos + j Zl sin); open loads use the
    // limit Zl -> inf, i.e. Z_in = Zr (cos + 0) / (j sin).
    Complex num, den;
    if (zl.is_open()) {
        num = zr * Complex{cb, 0.0};
        den = kJ * sb;
    } else {
        num = zr * (zl.value * cb + kJ * zr * sb);
        den = Complex{zr * cb, 0.0} + kJ * zl.value * sb;
    }
    double scale = zr * (std::abs(zl.pole ? Complex{1.0, 0.0} : zl.value) + zr);
    if (std::abs(den) < 1e-12 * std::max(scale, 1.0) / zr)
        return ComplexImmittance::open_circuit();
    return ComplexImmittance::impedance(zr == 0.0 ? Complex{0.0, 0.0} : num / den);
}

std::pair<ComplexImmittance, ComplexImmittance>
even_odd_impedances(const RingTapPair& pair, double freq_hz) {
    pair.validate();
    auto [alpha, gamma] = stub_angles(pair, freq_hz);
    double ca = std::cos(alpha), sa = std::sin(alpha);
    double cg = std::cos(gamma), sg = std::sin(gamma);
    double den = std::sin(alpha + gamma);
    double num_e = ca * cg;
    double num_o = sa * sg;

    // Residual 0/0 at coincident zeros: nudge one-sided off the point.
    if (std::abs(den) < 1e-12 && (std::abs(num_e) < 1e-12 || std::abs(num_o) < 1e-12)) {
        return even_odd_impedances(pair, freq_hz + 1e-9 * pair.fundamental_hz);
    }

    auto make = [&](double num, double sign) -> ComplexImmittance {
        if (std::abs(den) < 1e-12 * std::max(std::abs(num), 1.0))
            return ComplexImmittance::open_circuit();
        return ComplexImmittance::impedance(kJ * sign * pair.z_ring_ohm * num / den);
    };
    return {make(num_e, -1.0), make(num_o, +1.0)};
}

std::pair<Complex, Complex> reflection_coefficients(const RingTapPair& pair,
                                                    double freq_hz) {
    pair.validate();
    auto [alpha, gamma] = stub_angles(pair, freq_hz);
    double ca = std::cos(alpha), sa = std::sin(alpha);
    double cg = std::cos(gamma), sg = std::sin(gamma);
    double spg = std::sin(alpha + gamma);
    double r = pair.r();
    // Tan-free rewrite of gamma_e = (jr + a + b)/(jr - a - b) and
    // gamma_o = (jr a b - a - b)/(jr a b + a + b).
    Complex ge = (kJ * r * ca * cg + spg) / (kJ * r * ca * cg - spg);
    Complex go = (kJ * r * sa * sg - spg) / (kJ * r * sa * sg + spg);
    return {ge, go};
}

std::pair<Complex, Complex> tap_wave_amplitudes(const RingTapPair& pair,
                                                double freq_hz) {
    auto [ge, go] = reflection_coefficients(pair, freq_hz);
    return {0.5 * (ge + go), 0.5 * (ge - go)};
}

ReducedRingTwoPort ring_reduced(const RingTapPair& pair, double freq_hz) {
    pair.validate();
    double phi = kTwoPi * freq_hz / pair.fundamental_hz;
    double p1 = phi * pair.theta_rad / kTwoPi;
    double p2 = phi - p1;
    ReducedRingTwoPort red;
    red.na = std::sin(phi);
    red.nb = pair.z_ring_ohm * std::sin(p1) * std::sin(p2);
    red.nc = (2.0 / pair.z_ring_ohm) * (1.0 - std::cos(phi));
    red.s = std::sin(p1) + std::sin(p2);
    red.frequency_hz = freq_hz;
    return red;
}

TwoPort ring_two_port(const RingTapPair& pair, double freq_hz, double k2_floor) {
    auto [k1, k2] = tap_wave_amplitudes(pair, freq_hz);
    if (std::abs(k2) < k2_floor)
        throw DecoupledPortsError(
            "ring_two_port: taps decoupled (|K2| = " + std::to_string(std::abs(k2)) +
            " below floor at " + std::to_string(freq_hz) + " Hz)");
    return ring_reduced(pair, freq_hz).to_two_port();
}

TwoPort special_frequency_two_port(double theta_rad, double k, double z_ring_ohm) {
    double frac = k - std::floor(k);
    if (!(k >= 1.0) || std::abs(frac - 0.5) > 1e-12)
        throw std::invalid_argument(
            "special_frequency_two_port: k must be a half-integer >= 1.5");
    if (!(z_ring_ohm > 0.0))
        throw std::invalid_argument("special_frequency_two_port: Z_R must be positive");
    double s = std::sin(k * theta_rad);
    if (std::abs(s) < 1e-12)
        throw DecoupledPortsError(
            "special_frequency_two_port: sin(k*theta) = 0, ports decoupled");
    double zp = 0.5 * z_ring_ohm * s;
    return TwoPort{{0.0, 0.0}, {0.0, zp}, {0.0, 1.0 / zp}, {0.0, 0.0}, 0.0};
}

} // namespace ringbus
