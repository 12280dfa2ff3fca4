#include "ringbus/ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ringbus/errors.hpp"
#include "ringbus/optimize.hpp"
#include "ringbus/parallel.hpp"

namespace ringbus {

namespace {

constexpr Complex kJ{0.0, 1.0};

double angular(double freq_hz) { return kTwoPi * freq_hz; }

// Capacitor-dressed numerators: cap(cg1) . core . cap(cg2), still over the
// core denominator s. For lossless cores a_hat/d_hat are real and b_hat is
// imaginary; the real characteristic function below relies on that split.
struct HattedNetwork {
    double a_hat;  // real part of n11 + Z1 n21
    double b_hat;  // imag part of Z2(n11 + Z1 n21) + n12 + Z1 n22
    double d_hat;  // real part of n22 + Z2 n21
    double s;
};

HattedNetwork hatted(const ReducedNetwork& net, double w, double cg1, double cg2) {
    Complex z1{0.0, -1.0 / (w * cg1)};
    Complex z2{0.0, -1.0 / (w * cg2)};
    Complex ah = net.n11 + z1 * net.n21;
    Complex bh = z2 * ah + net.n12 + z1 * net.n22;
    Complex dh = net.n22 + z2 * net.n21;
    return {ah.real(), bh.imag(), dh.real(), net.s};
}

// Denominator-cleared characteristic function. Zeros coincide with the
// zeros of det(M)/j^2 away from the (removable) denominator zeros.
struct CharacteristicSystem {
    const ReducedNetworkFn& core;
    double wq1_sq, wq2_sq;
    double cq1, cq2, cg1, cg2;

    double operator()(double freq_hz) const {
        double w = angular(freq_hz);
        HattedNetwork h = hatted(core(freq_hz), w, cg1, cg2);
        double m1 = h.b_hat * (wq1_sq - w * w) + w * h.d_hat / cq1;
        double m2 = h.b_hat * (wq2_sq - w * w) + w * h.a_hat / cq2;
        return m1 * m2 - w * w * h.s * h.s / (cq1 * cq2);
    }
};

double ring_mode_distance(double freq_hz, const std::vector<double>& fundamentals) {
    double best = std::numeric_limits<double>::infinity();
    for (double f0 : fundamentals) {
        if (!(f0 > 0.0)) continue;
        double n = std::round(freq_hz / f0);
        if (n < 1.0) n = 1.0;
        best = std::min(best, std::abs(freq_hz - n * f0));
    }
    return best;
}

} // namespace

double LinearizedQubit::bare_frequency_hz() const {
    return 1.0 / (kTwoPi * std::sqrt(l_q_henry * c_q_farad));
}

LinearizedQubit LinearizedQubit::from_frequency(double freq_hz, double c_q_farad,
                                                double coupling_cap_f) {
    double w = angular(freq_hz);
    return LinearizedQubit{1.0 / (w * w * c_q_farad), c_q_farad, coupling_cap_f};
}

void LinearizedQubit::validate() const {
    if (!(l_q_henry > 0.0) || !(c_q_farad > 0.0) || !(coupling_cap_f > 0.0))
        throw ValidationError("LinearizedQubit: all electrical values must be positive");
}

void RingSpec::validate() const {
    if (!(fundamental_hz > 0.0) || !(z_ring_ohm > 0.0))
        throw ValidationError("RingSpec: fundamental and impedance must be positive");
}

ReducedNetwork ReducedNetwork::then(const TwoPort& link) const {
    ReducedNetwork out;
    out.n11 = n11 * link.a + n12 * link.c;
    out.n12 = n11 * link.b + n12 * link.d;
    out.n21 = n21 * link.a + n22 * link.c;
    out.n22 = n21 * link.b + n22 * link.d;
    out.s = s;
    out.symmetric = false;
    return out;
}

ReducedNetwork ReducedNetwork::then(const ReducedNetwork& o) const {
    ReducedNetwork out;
    out.n11 = n11 * o.n11 + n12 * o.n21;
    out.n12 = n11 * o.n12 + n12 * o.n22;
    out.n21 = n21 * o.n11 + n22 * o.n21;
    out.n22 = n21 * o.n12 + n22 * o.n22;
    out.s = s * o.s;
    out.symmetric = false;
    return out;
}

Eigen::Matrix2cd characteristic_matrix(const LinearizedQubit& q1,
                                       const LinearizedQubit& q2,
                                       const RingTapPair& pair, double freq_hz) {
    q1.validate();
    q2.validate();
    TwoPort ring = ring_two_port(pair, freq_hz); // throws when decoupled
    TwoPort comb = series_capacitor(q1.coupling_cap_f, freq_hz) * ring *
                   series_capacitor(q2.coupling_cap_f, freq_hz);
    double w = angular(freq_hz);
    double wq1 = angular(q1.bare_frequency_hz());
    double wq2 = angular(q2.bare_frequency_hz());
    Eigen::Matrix2cd m;
    m(0, 0) = comb.b * (wq1 * wq1 - w * w) + kJ * w * comb.d / q1.c_q_farad;
    m(0, 1) = kJ * w / q2.c_q_farad * (comb.b * comb.c - comb.a * comb.d);
    m(1, 0) = -kJ * w / q1.c_q_farad;
    m(1, 1) = comb.b * (wq2 * wq2 - w * w) + kJ * w * comb.a / q2.c_q_farad;
    return m;
}

std::vector<EigenmodeRoot> find_eigenmodes_network(const LinearizedQubit& q1,
                                                   const LinearizedQubit& q2,
                                                   const ReducedNetworkFn& core,
                                                   double lo_hz, double hi_hz,
                                                   const EigenmodeOptions& opts) {
    q1.validate();
    q2.validate();
    if (!(hi_hz > lo_hz) || !(lo_hz > 0.0))
        throw std::invalid_argument("find_eigenmodes: invalid bracket");
    double tol = std::max(opts.tol_hz, 1.0);

    double wq1 = angular(q1.bare_frequency_hz());
    double wq2 = angular(q2.bare_frequency_hz());
    CharacteristicSystem g{core, wq1 * wq1, wq2 * wq2,
                           q1.c_q_farad, q2.c_q_farad,
                           q1.coupling_cap_f, q2.coupling_cap_f};

    int n = opts.scan_points;
    if (n <= 0) {
        n = static_cast<int>(std::clamp((hi_hz - lo_hz) / (0.25e6), 4096.0, 131072.0));
    }

    // Sign-change scan with automatic splitting around non-finite points.
    std::vector<double> roots;
    double prev_x = lo_hz;
    double prev_f = g(lo_hz);
    int bad_points = 0;
    for (int i = 1; i < n; ++i) {
        double x = lo_hz + (hi_hz - lo_hz) * static_cast<double>(i) / (n - 1);
        double fx = g(x);
        if (!std::isfinite(fx)) {
            ++bad_points;
            fx = g(x + (hi_hz - lo_hz) * 0.1 / (n - 1)); // one-sided nudge
            if (!std::isfinite(fx)) {
                if (bad_points > n / 4)
                    throw PoleInBracketError(
                        "find_eigenmodes: characteristic function not finite over the bracket");
                prev_x = x;
                prev_f = fx;
                continue;
            }
        }
        if (std::isfinite(prev_f)) {
            if (prev_f == 0.0) {
                roots.push_back(prev_x);
            } else if (prev_f * fx < 0.0) {
                roots.push_back(optimize::bisect([&](double y) { return g(y); },
                                                 prev_x, x, tol));
            }
        }
        prev_x = x;
        prev_f = fx;
    }
    if (roots.empty())
        throw NoRootInBracketError("find_eigenmodes: no sign change in bracket");

    std::vector<EigenmodeRoot> out;
    out.reserve(roots.size());
    for (double r : roots) {
        double dist = ring_mode_distance(r, opts.ring_fundamentals_hz);
        out.push_back({r, dist < opts.ring_mode_window_hz, dist});
    }
    return out;
}

std::vector<EigenmodeRoot> find_eigenmodes(const LinearizedQubit& q1,
                                           const LinearizedQubit& q2,
                                           const RingTapPair& pair,
                                           double lo_hz, double hi_hz,
                                           const EigenmodeOptions& opts) {
    pair.validate();
    EigenmodeOptions o = opts;
    if (o.ring_fundamentals_hz.empty())
        o.ring_fundamentals_hz.push_back(pair.fundamental_hz);
    ReducedNetworkFn core = [pair](double f) {
        return ReducedNetwork::from_ring(ring_reduced(pair, f));
    };
    return find_eigenmodes_network(q1, q2, core, lo_hz, hi_hz, o);
}

CouplingResult coupling_for_network(const LinearizedQubit& qa,
                                    const LinearizedQubit& qb,
                                    const ReducedNetworkFn& core,
                                    double freq_hz, double k2_floor) {
    qa.validate();
    qb.validate();
    double wp = angular(freq_hz);
    ReducedNetwork probe_net = core(freq_hz);

    // Exact interference null: no transmission, J = 0 by definition.
    if (std::abs(probe_net.s21(50.0)) < k2_floor)
        return CouplingResult{0.0, CouplingMethod::ClosedForm, {freq_hz, freq_hz}, 0.0};

    HattedNetwork h = hatted(probe_net, wp, qa.coupling_cap_f, qb.coupling_cap_f);
    double bt = h.b_hat / h.s;
    double at = h.a_hat / h.s;
    double dt = h.d_hat / h.s;

    // Retune each qubit so its loaded resonance sits exactly at the probe:
    // solve m1(probe) = 0 and m2(probe) = 0 for the bare frequencies.
    double wq1_sq = wp * wp - wp * dt / (qa.c_q_farad * bt);
    double wq2_sq = wp * wp - wp * at / (qb.c_q_farad * bt);
    if (!(wq1_sq > 0.0) || !(wq2_sq > 0.0))
        throw NoRootInBracketError("coupling_at: loaded retuning has no positive root");

    double j_est = std::abs(1.0 / (2.0 * kTwoPi * qa.c_q_farad * bt));
    double window = std::max(8.0 * j_est, 2e6);

    CharacteristicSystem g{core, wq1_sq, wq2_sq,
                           qa.c_q_farad, qb.c_q_farad,
                           qa.coupling_cap_f, qb.coupling_cap_f};

    double f_lo = 0.0, f_hi = 0.0;
    bool have_roots = false;
    bool symmetric = probe_net.symmetric &&
                     qa.c_q_farad == qb.c_q_farad &&
                     qa.coupling_cap_f == qb.coupling_cap_f;
    if (symmetric) {
        // Identical halves: det factorizes into m -/+ w s / C_Q, and each
        // factor has one simple root even for vanishing splitting.
        auto factor = [&](double sign) {
            return [&, sign](double f) {
                double w = angular(f);
                HattedNetwork hh = hatted(core(f), w, qa.coupling_cap_f, qb.coupling_cap_f);
                double m = hh.b_hat * (wq1_sq - w * w) + w * hh.d_hat / qa.c_q_farad;
                return m + sign * w * hh.s / qa.c_q_farad;
            };
        };
        auto root_of = [&](double sign) {
            auto fn = factor(sign);
            for (double wscale : {1.0, 2.0, 4.0, 8.0}) {
                double wlo = freq_hz - wscale * window;
                double whi = freq_hz + wscale * window;
                auto roots = optimize::scan_roots(fn, wlo, whi, 2048, 0.05);
                if (!roots.empty()) {
                    // nearest to the probe
                    double best = roots[0];
                    for (double r : roots)
                        if (std::abs(r - freq_hz) < std::abs(best - freq_hz)) best = r;
                    return best;
                }
            }
            throw NoRootInBracketError("coupling_at: normal-mode root not found");
        };
        f_lo = root_of(+1.0);
        f_hi = root_of(-1.0);
        if (f_lo > f_hi) std::swap(f_lo, f_hi);
        have_roots = true;
    } else {
        for (double wscale : {1.0, 2.0, 4.0, 8.0}) {
            double wlo = freq_hz - wscale * window;
            double whi = freq_hz + wscale * window;
            auto roots = optimize::scan_roots([&](double f) { return g(f); },
                                              wlo, whi, 4096, 0.05);
            if (roots.size() >= 2) {
                std::sort(roots.begin(), roots.end(),
                          [&](double x, double y) {
                              return std::abs(x - freq_hz) < std::abs(y - freq_hz);
                          });
                f_lo = std::min(roots[0], roots[1]);
                f_hi = std::max(roots[0], roots[1]);
                have_roots = true;
                break;
            }
        }
        if (!have_roots)
            throw NoRootInBracketError("coupling_at: fewer than two normal modes near probe");
    }

    double j_mag = 0.5 * (f_hi - f_lo);
    double sign = bt < 0.0 ? +1.0 : -1.0; // sign of the transfer reactance
    CouplingResult out;
    out.j_hz = sign * j_mag;
    out.method = CouplingMethod::DeterminantSplitting;
    out.eigenfrequencies_hz = {f_lo, f_hi};
    out.residual = std::abs(0.5 * (f_lo + f_hi) - freq_hz) / freq_hz;
    return out;
}

CouplingResult coupling_at(const LinearizedQubit& q_template,
                           const RingTapPair& pair, double freq_hz,
                           double k2_floor) {
    pair.validate();
    ReducedNetworkFn core = [pair](double f) {
        return ReducedNetwork::from_ring(ring_reduced(pair, f));
    };
    return coupling_for_network(q_template, q_template, core, freq_hz, k2_floor);
}

CouplingMap coupling_map(const LinearizedQubit& q_template,
                         const RingTapPair& pair_template,
                         const std::vector<double>& theta_grid_rad,
                         const std::vector<double>& freq_grid_hz,
                         double guard_band_hz) {
    if (theta_grid_rad.empty() || freq_grid_hz.empty())
        throw std::invalid_argument("coupling_map: empty grid");
    CouplingMap map;
    map.theta_rad = theta_grid_rad;
    map.freq_hz = freq_grid_hz;
    map.cells.resize(theta_grid_rad.size() * freq_grid_hz.size());

    const std::size_t nf = freq_grid_hz.size();
    auto eval_cell = [&](std::size_t idx) {
        std::size_t ti = idx / nf;
        std::size_t fi = idx % nf;
        CouplingCell& cell = map.cells[idx];
        double f = freq_grid_hz[fi];
        double dist = ring_mode_distance(f, {pair_template.fundamental_hz});
        if (dist < guard_band_hz) {
            cell.error = "within ring-mode guard band";
            return;
        }
        RingTapPair pair = pair_template;
        pair.theta_rad = theta_grid_rad[ti];
        try {
            cell.result = coupling_at(q_template, pair, f);
        } catch (const Error& e) {
            cell.error = e.what();
        }
    };
    parallel_for(map.cells.size(), eval_cell);
    return map;
}

double calibrate_coupling_cap(double target_j_hz, double at_theta_rad,
                              double at_freq_hz, double c_q_farad,
                              const RingSpec& ring, double cap_lo_f,
                              double cap_hi_f, double rel_tol) {
    ring.validate();
    if (!(target_j_hz > 0.0))
        throw UnachievableError("calibrate_coupling_cap: target must be positive");
    RingTapPair pair{at_theta_rad, ring.fundamental_hz, ring.z_ring_ohm, 50.0};
    auto j_of = [&](double cap) {
        LinearizedQubit q = LinearizedQubit::from_frequency(at_freq_hz, c_q_farad, cap);
        return std::abs(coupling_at(q, pair, at_freq_hz).j_hz);
    };
    double f_lo = j_of(cap_lo_f) - target_j_hz;
    double f_hi = j_of(cap_hi_f) - target_j_hz;
    if (f_lo * f_hi > 0.0)
        throw UnachievableError(
            "calibrate_coupling_cap: target not bracketed by the cap search window");
    // Bisection on log-capacitance until the coupling matches to rel_tol.
    double lo = std::log(cap_lo_f), hi = std::log(cap_hi_f);
    double sign_lo = f_lo;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double cap = std::exp(mid);
        double err = j_of(cap) - target_j_hz;
        if (std::abs(err) <= rel_tol * target_j_hz) return cap;
        if (sign_lo * err < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            sign_lo = err;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

} // namespace ringbus
