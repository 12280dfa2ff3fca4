#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ringbus/errors.hpp"
#include "ringbus/network.hpp"

using namespace ringbus;

namespace {

constexpr double kF0 = 3.127e9;

RingTapPair pair_at(double theta_rad, double z_ring = 50.0, double z0 = 50.0) {
    return RingTapPair{theta_rad, kF0, z_ring, z0};
}

// Literal tan-form evaluation of the reflection coefficients; oracle for the
// rewritten production expressions (long double to keep it independent).
std::pair<Complex, Complex> gamma_oracle(const RingTapPair& p, double f) {
    long double phi = 2.0L * M_PIl * (long double)f / (long double)p.fundamental_hz;
    long double alpha = 0.5L * phi * (long double)p.theta_rad / (2.0L * M_PIl);
    long double gamma = 0.5L * (phi - phi * (long double)p.theta_rad / (2.0L * M_PIl));
    long double a = std::tan(alpha);
    long double b = std::tan(gamma);
    long double r = (long double)p.z_ring_ohm / (long double)p.z0_ohm;
    std::complex<long double> j{0.0L, 1.0L};
    auto ge = (j * r + (a + b)) / (j * r - (a + b));
    auto go = (j * r * a * b - (a + b)) / (j * r * a * b + (a + b));
    return {Complex((double)ge.real(), (double)ge.imag()),
            Complex((double)go.real(), (double)go.imag())};
}

} // namespace

TEST_CASE("transform_impedance: matched, short and open loads") {
    LineSection line{50.0, 0.125, kF0}; // beta*x = pi/4 at the fundamental
    double f = kF0;

    auto matched = transform_impedance(ComplexImmittance::impedance({50.0, 0.0}), line, f);
    CHECK(matched.value.real() == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(std::abs(matched.value.imag()) < 1e-9);

    auto shorted = transform_impedance(ComplexImmittance::short_circuit(), line, f);
    CHECK(shorted.value.imag() == doctest::Approx(50.0).epsilon(1e-12)); // +j Z tan
    CHECK(std::abs(shorted.value.real()) < 1e-9);

    auto open = transform_impedance(ComplexImmittance::open_circuit(), line, f);
    CHECK(open.value.imag() == doctest::Approx(-50.0).epsilon(1e-12)); // -j Z cot
    CHECK(std::abs(open.value.real()) < 1e-9);
}

TEST_CASE("transform_impedance: quarter-wave pole reported, not thrown") {
    LineSection line{50.0, 0.25, kF0}; // beta*x = pi/2
    auto z = transform_impedance(ComplexImmittance::short_circuit(), line, kF0);
    CHECK(z.is_open()); // short seen through a quarter wave is an open
}

TEST_CASE("even_odd_impedances: fundamental resonance is a tagged pole") {
    for (double theta_deg : {30.0, 75.0, 145.0}) {
        auto [ze, zo] = even_odd_impedances(pair_at(theta_deg * M_PI / 180.0), kF0);
        CHECK(ze.pole);
    }
}

TEST_CASE("even_odd_impedances: theta = pi at 1.5 f0") {
    auto [ze, zo] = even_odd_impedances(pair_at(M_PI), 1.5 * kF0);
    REQUIRE(!ze.pole);
    REQUIRE(!zo.pole);
    // direct evaluation: Z_e = +j25, Z_o = -j25
    CHECK(ze.value.imag() == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(zo.value.imag() == doctest::Approx(-25.0).epsilon(1e-12));
    CHECK(std::abs(ze.value) == doctest::Approx(std::abs(zo.value)).epsilon(1e-12));
    CHECK(ze.is_reactive());
    CHECK(zo.is_reactive());
}

TEST_CASE("even_odd_impedances: symmetric under theta -> 2pi - theta") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> th(0.05, M_PI);
    std::uniform_real_distribution<double> fr(1.05, 1.95);
    for (int k = 0; k < 50; ++k) {
        double theta = th(rng);
        double f = fr(rng) * kF0;
        auto [ze1, zo1] = even_odd_impedances(pair_at(theta), f);
        auto [ze2, zo2] = even_odd_impedances(pair_at(2 * M_PI - theta), f);
        if (ze1.pole || ze2.pole) {
            CHECK(ze1.pole == ze2.pole);
        } else {
            CHECK(ze1.value.imag() == doctest::Approx(ze2.value.imag()).epsilon(1e-9));
        }
        if (!zo1.pole && !zo2.pole)
            CHECK(zo1.value.imag() == doctest::Approx(zo2.value.imag()).epsilon(1e-9));
    }
}

TEST_CASE("reflection_coefficients: unit magnitude everywhere off poles") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> th(0.02, 2 * M_PI - 0.02);
    std::uniform_real_distribution<double> fr(0.5, 2.5);
    int checked = 0;
    for (int k = 0; k < 1200; ++k) {
        double theta = th(rng);
        double f = fr(rng) * kF0;
        auto [ge, go] = reflection_coefficients(pair_at(theta), f);
        if (!std::isfinite(std::abs(ge)) || !std::isfinite(std::abs(go))) continue;
        CHECK(std::abs(ge) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(go) == doctest::Approx(1.0).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("reflection_coefficients: frozen point and tan-form oracle") {
    auto [ge, go] = reflection_coefficients(pair_at(M_PI), 1.5 * kF0);
    CHECK(ge.real() == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(ge.imag() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(go.real() == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(go.imag() == doctest::Approx(-0.8).epsilon(1e-12));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> th(0.1, 2 * M_PI - 0.1);
    std::uniform_real_distribution<double> fr(1.05, 1.95);
    for (int k = 0; k < 40; ++k) {
        RingTapPair p = pair_at(th(rng), 50.0, 35.0);
        double f = fr(rng) * kF0;
        auto [ge2, go2] = reflection_coefficients(p, f);
        auto [geo, goo] = gamma_oracle(p, f);
        CHECK(std::abs(ge2 - geo) < 1e-8);
        CHECK(std::abs(go2 - goo) < 1e-8);
    }
}

TEST_CASE("reflection symmetry under theta -> 2pi - theta") {
    for (double f : {1.2 * kF0, 1.5 * kF0, 1.83 * kF0}) {
        for (double theta : {0.4, 1.1, 2.0}) {
            auto [ge1, go1] = reflection_coefficients(pair_at(theta), f);
            auto [ge2, go2] = reflection_coefficients(pair_at(2 * M_PI - theta), f);
            CHECK(std::abs(ge1 - ge2) < 1e-10);
            CHECK(std::abs(go1 - go2) < 1e-10);
        }
    }
}

TEST_CASE("ring_two_port: special-frequency closed form at theta = pi") {
    TwoPort tp = ring_two_port(pair_at(M_PI), 1.5 * kF0);
    CHECK(std::abs(tp.a) < 1e-10);
    CHECK(std::abs(tp.d) < 1e-10);
    CHECK(tp.b.imag() == doctest::Approx(-25.0).epsilon(1e-10)); // Z'(pi) = -Z_R/2
    CHECK(std::abs(tp.b.real()) < 1e-9);
    CHECK(tp.c.imag() == doctest::Approx(-0.04).epsilon(1e-10));
    CHECK(tp.is_reciprocal(1e-9));
}

TEST_CASE("ring_two_port: |K1|^2 + |K2|^2 = 1 and reciprocity on a sweep") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> th(0.05, 2 * M_PI - 0.05);
    int count = 0;
    for (int k = 0; k < 1400 && count < 1000; ++k) {
        double theta = th(rng);
        double f = (0.5 + 2.0 * (k % 997) / 997.0) * kF0;
        auto [k1, k2] = tap_wave_amplitudes(pair_at(theta), f);
        double unit = std::norm(k1) + std::norm(k2);
        CHECK(unit == doctest::Approx(1.0).epsilon(1e-9));
        if (std::abs(k2) < 1e-9) continue; // decoupled or ring mode
        TwoPort tp = ring_two_port(pair_at(theta), f);
        CHECK(std::abs(tp.determinant() - 1.0) < 1e-9);
        CHECK(tp.is_lossless(1e-9));
        ++count;
    }
    CHECK(count >= 1000);
}

TEST_CASE("ring_two_port: independent of the reference impedance") {
    for (double z0 : {10.0, 50.0, 100.0}) {
        TwoPort tp = ring_two_port(pair_at(1.3, 50.0, z0), 1.62 * kF0);
        TwoPort ref = ring_two_port(pair_at(1.3, 50.0, 50.0), 1.62 * kF0);
        CHECK(std::abs(tp.a - ref.a) < 1e-9 * std::abs(ref.a));
        CHECK(std::abs(tp.b - ref.b) < 1e-9 * std::abs(ref.b));
        CHECK(std::abs(tp.c - ref.c) < 1e-9 * std::abs(ref.c));
    }
}

TEST_CASE("special_frequency_two_port: values and decoupled angles") {
    double zr = 50.0;
    CHECK_THROWS_AS(special_frequency_two_port(2 * M_PI / 3, 1.5, zr),
                    DecoupledPortsError);
    CHECK_THROWS_AS(special_frequency_two_port(40.0 * M_PI / 180.0, 4.5, zr),
                    DecoupledPortsError);

    // two-magnitude structure of Z' at 30-degree multiples
    auto zp = [&](double theta) {
        return std::abs(special_frequency_two_port(theta, 1.5, zr).b.imag());
    };
    double hi = zr / 2.0, lo = zr / (2.0 * std::sqrt(2.0));
    CHECK(zp(M_PI / 6) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(zp(M_PI / 2) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(zp(5 * M_PI / 6) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(zp(M_PI / 3) == doctest::Approx(hi).epsilon(1e-12));
    CHECK(zp(M_PI) == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("closed-form agreement on a 1-degree grid") {
    for (double k : {1.5, 4.5}) {
        double f = k * kF0;
        for (int deg = 1; deg < 360; ++deg) {
            double theta = deg * M_PI / 180.0;
            double s = std::sin(k * theta);
            // skip half-degree neighbourhoods of the decoupled angles
            if (std::abs(s) < std::sin(k * 0.5 * M_PI / 180.0)) continue;
            TwoPort ring = ring_two_port(pair_at(theta), f);
            TwoPort sp = special_frequency_two_port(theta, k, 50.0);
            CHECK(std::abs(ring.b - sp.b) < 1e-8 * std::abs(sp.b));
            CHECK(std::abs(ring.c - sp.c) < 1e-8 * std::abs(sp.c));
            CHECK(std::abs(ring.a) < 1e-8);
        }
    }
}

TEST_CASE("cascade and series_capacitor basics") {
    TwoPort x = ring_two_port(pair_at(1.1), 1.4 * kF0);
    std::vector<TwoPort> v{TwoPort::identity(1.4 * kF0), x};
    TwoPort c = cascade(v);
    CHECK(std::abs(c.a - x.a) < 1e-15);
    CHECK(std::abs(c.b - x.b) < 1e-15);

    // huge capacitance: series impedance vanishes
    TwoPort cap = series_capacitor(1.0, 1e9);
    CHECK(std::abs(cap.b) < 1e-9);
    CHECK(std::abs(cap.a - 1.0) < 1e-15);

    CHECK_THROWS(cascade(std::span<const TwoPort>{}));
}

TEST_CASE("combined cap-ring-cap matches the literal closed forms") {
    // oracle: tan-form expressions for the combined matrix entries
    auto combined_oracle = [&](double theta, double f, double cg) {
        long double phi = 2.0L * M_PIl * (long double)f / (long double)kF0;
        long double a = std::tan(0.5L * phi * (long double)theta / (2.0L * M_PIl));
        long double b = std::tan(0.5L * (phi - phi * (long double)theta / (2.0L * M_PIl)));
        long double w = 2.0L * M_PIl * (long double)f;
        long double zr = 50.0L;
        long double cw = (long double)cg * zr * w;
        std::complex<long double> j{0.0L, 1.0L};
        std::complex<long double> At{
            (2.0L * (a + b) + cw * (1.0L - a * b)) / (cw * (1.0L + a * b)), 0.0L};
        std::complex<long double> Bt =
            j * zr *
            (2.0L * cw * cw * a * b - 2.0L * (a + b) * (a + b) +
             2.0L * cw * (a + b) * (a * b - 1.0L)) /
            (cw * cw * (a + b) * (1.0L + a * b));
        std::complex<long double> Ct = (2.0L * j / zr) * (a + b) / (1.0L + a * b);
        return std::array<Complex, 3>{
            Complex((double)At.real(), (double)At.imag()),
            Complex((double)Bt.real(), (double)Bt.imag()),
            Complex((double)Ct.real(), (double)Ct.imag())};
    };

    double cg = 13e-15;
    for (double theta : {0.7, 1.9, M_PI}) {
        for (double f : {1.31 * kF0, 1.5 * kF0, 1.77 * kF0}) {
            TwoPort cap = series_capacitor(cg, f);
            TwoPort comb = cap * ring_two_port(pair_at(theta), f) * cap;
            auto [At, Bt, Ct] = combined_oracle(theta, f, cg);
            CHECK(std::abs(comb.a - At) < 1e-7 * std::abs(At));
            CHECK(std::abs(comb.b - Bt) < 1e-7 * std::abs(Bt));
            CHECK(std::abs(comb.c - Ct) < 1e-7 * std::abs(Ct));
            CHECK(std::abs(comb.d - At) < 1e-7 * std::abs(At));
            CHECK(std::abs(comb.determinant() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("lossless structure holds for every constructed network") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> th(0.1, 2 * M_PI - 0.1);
    std::uniform_real_distribution<double> fr(0.6, 2.4);
    for (int k = 0; k < 200; ++k) {
        double f = fr(rng) * kF0;
        auto [k1, k2] = tap_wave_amplitudes(pair_at(th(rng)), f);
        if (std::abs(k2) < 1e-6) continue;
        TwoPort tp = series_capacitor(9e-15, f) * ring_two_port(pair_at(th(rng)), f);
        CHECK(tp.is_lossless(1e-9));
    }
}
