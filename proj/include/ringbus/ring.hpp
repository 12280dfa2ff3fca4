#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringbus/network.hpp"

namespace ringbus {

// Qubit with the junction replaced by a linear inductor.
struct LinearizedQubit {
    double l_q_henry = 0.0;        // phi0^2 / E_J
    double c_q_farad = 0.0;        // e^2 / (2 E_C)
    double coupling_cap_f = 0.0;   // series cap to the ring tap

    double bare_frequency_hz() const;

    // Retune the inductor so the bare frequency lands at freq_hz.
    static LinearizedQubit from_frequency(double freq_hz, double c_q_farad,
                                          double coupling_cap_f);
    void validate() const;
};

struct RingSpec {
    double fundamental_hz = 3.127e9;
    double z_ring_ohm = 50.0;
    void validate() const;
};

// Default electrical parameters used when a device file does not pin them.
// The charging capacitance comes from a -308 MHz anharmonicity; the coupling
// cap reproduces |J| = 4.74 MHz at (180 deg, 4.65 GHz) on the default ring.
constexpr double kDefaultQubitCapF = 6.2890e-14;
constexpr double kDefaultCouplingCapF = 1.47553e-14; // see calibrate_coupling_cap
constexpr double kDefaultK2Floor = 1e-12;
constexpr double kRingModeWindowHz = 5e6;

enum class CouplingMethod { DeterminantSplitting, ClosedForm };

struct CouplingResult {
    double j_hz = 0.0;  // signed
    CouplingMethod method = CouplingMethod::DeterminantSplitting;
    std::array<double, 2> eigenfrequencies_hz{0.0, 0.0};
    double residual = 0.0; // relative offset of the root midpoint from the probe
};

// Cascaded tap-to-tap network in numerator form: entries are n../s with a
// shared real denominator, so ring-mode poles never appear explicitly.
struct ReducedNetwork {
    Complex n11, n12, n21, n22;
    double s = 1.0;
    bool symmetric = true; // n11 == n22 by construction

    static ReducedNetwork from_ring(const ReducedRingTwoPort& r) {
        return {{r.na, 0.0}, {0.0, r.nb}, {0.0, r.nc}, {r.na, 0.0}, r.s, true};
    }
    // Append an entire (denominator-free) element, then another reduced one.
    ReducedNetwork then(const TwoPort& link) const;
    ReducedNetwork then(const ReducedNetwork& other) const;
    Complex s21(double z0) const {
        return 2.0 * s / (n11 + n12 / z0 + n21 * z0 + n22);
    }
};

using ReducedNetworkFn = std::function<ReducedNetwork(double freq_hz)>;

// Coupled-mode matrix per the frequency-domain circuit equations;
// entries mix the combined ABCD matrix with the qubit electricals.
Eigen::Matrix2cd characteristic_matrix(const LinearizedQubit& q1,
                                       const LinearizedQubit& q2,
                                       const RingTapPair& pair, double freq_hz);

struct EigenmodeRoot {
    double freq_hz = 0.0;
    bool ring_mode = false;           // within the window of an integer ring mode
    double ring_mode_distance_hz = 0.0;
};

struct EigenmodeOptions {
    double tol_hz = 1e3;
    int scan_points = 0;              // 0: automatic from bracket width
    std::vector<double> ring_fundamentals_hz; // anchors for ring-mode tagging
    double ring_mode_window_hz = kRingModeWindowHz;
};

// All roots of the real characteristic function inside [lo, hi], found by
// sign-change bracketing and bisection.
std::vector<EigenmodeRoot> find_eigenmodes(const LinearizedQubit& q1,
                                           const LinearizedQubit& q2,
                                           const RingTapPair& pair,
                                           double lo_hz, double hi_hz,
                                           const EigenmodeOptions& opts = {});

// Same machinery against an arbitrary reduced network (used by multi-ring
// cascades as well as the plain ring).
std::vector<EigenmodeRoot> find_eigenmodes_network(const LinearizedQubit& q1,
                                                   const LinearizedQubit& q2,
                                                   const ReducedNetworkFn& core,
                                                   double lo_hz, double hi_hz,
                                                   const EigenmodeOptions& opts);

// Exchange coupling between two identical qubits probed at freq_hz. Both
// qubits are retuned so their loaded single-qubit resonances sit exactly at
// the probe, then the normal-mode splitting gives |J|; the sign follows the
// transfer reactance of the combined network (equal to sign(sin(k theta)) at
// the special frequency).
CouplingResult coupling_at(const LinearizedQubit& q_template,
                           const RingTapPair& pair, double freq_hz,
                           double k2_floor = kDefaultK2Floor);

CouplingResult coupling_for_network(const LinearizedQubit& qa,
                                    const LinearizedQubit& qb,
                                    const ReducedNetworkFn& core,
                                    double freq_hz,
                                    double k2_floor = kDefaultK2Floor);

struct CouplingCell {
    std::optional<CouplingResult> result;
    std::string error; // empty on success
};

struct CouplingMap {
    std::vector<double> theta_rad;
    std::vector<double> freq_hz;
    std::vector<CouplingCell> cells; // row-major: theta index * n_freq + freq index
    const CouplingCell& at(std::size_t ti, std::size_t fi) const {
        return cells[ti * freq_hz.size() + fi];
    }
};

// Dense J(theta, f) map; per-cell failures are recorded in the cell. Cells
// closer than guard_band_hz to an integer ring mode are skipped.
CouplingMap coupling_map(const LinearizedQubit& q_template,
                         const RingTapPair& pair_template,
                         const std::vector<double>& theta_grid_rad,
                         const std::vector<double>& freq_grid_hz,
                         double guard_band_hz = 20e6);

// Solve for the coupling cap that reproduces target_j_hz at the given tap
// angle and frequency. Search window in farad.
double calibrate_coupling_cap(double target_j_hz, double at_theta_rad,
                              double at_freq_hz, double c_q_farad,
                              const RingSpec& ring,
                              double cap_lo_f = 0.1e-15,
                              double cap_hi_f = 100e-15,
                              double rel_tol = 1e-3);

} // namespace ringbus
