#pragma once

#include <string>
#include <vector>

#include "ringbus/ring.hpp"

namespace ringbus {

struct RingLink {
    int ring_a = 0;
    double angle_a_rad = 0.0;
    int ring_b = 0;
    double angle_b_rad = 0.0;
    double z_c_ohm = 0.0; // 0: default Z_R/2 (matched)
};

struct QubitPlacement {
    std::string label;
    int ring = 0;
    double angle_rad = 0.0;
    LinearizedQubit qubit;
};

// Several rings joined by half-wave line sections; v1 supports trees only.
struct MultiRingTopology {
    std::vector<RingSpec> rings;
    std::vector<RingLink> links;
    std::vector<QubitPlacement> qubits;
    double z0_ohm = 50.0;

    void validate() const;
};

// Half-wave line resonating at f_res: [[cos bL, jZc sin bL], [j sin bL / Zc,
// cos bL]] with bL = pi f / f_res.
TwoPort half_wave_two_port(double z_c_ohm, double f_res_hz, double freq_hz);

// Reduced (numerator-form) network along the unique link path between two
// qubits on distinct rings: ring section, half-wave link, ..., ring section.
ReducedNetworkFn inter_ring_network(const MultiRingTopology& topo,
                                    std::size_t qubit_a, std::size_t qubit_b);

// Combined ABCD between the two qubits including both coupling caps.
TwoPort inter_ring_two_port(const MultiRingTopology& topo, std::size_t qubit_a,
                            std::size_t qubit_b, double freq_hz);

// Identical-qubit splitting solve through the multi-ring cascade; same-ring
// pairs fall back to the plain tap-pair treatment.
CouplingResult multi_ring_coupling(const MultiRingTopology& topo,
                                   std::size_t qubit_a, std::size_t qubit_b,
                                   double freq_hz);

enum class CouplingClass { Zero, Weak, Strong };

struct ReportEntry {
    std::size_t i = 0, j = 0;
    std::string label_i, label_j;
    double theta_deg = 0.0; // same-ring separation; 0 for cross-ring pairs
    std::string path;       // ring-path descriptor for cross-ring pairs
    double j_hz = 0.0;
    CouplingClass cls = CouplingClass::Zero;
    std::string error;
};

struct ConnectivityReport {
    std::vector<ReportEntry> entries; // ordered by (i, j)
    double zero_threshold_hz = 0.0;
    double class_split_hz = 0.0;

    int partners_of(std::size_t q) const; // nonzero-coupled neighbours
};

// All-pairs couplings with strong/weak/zero classification.
ConnectivityReport connectivity_report(const MultiRingTopology& topo,
                                       double freq_hz);

// Uniformly loaded single long ring (default: 36 qubits, 10 degree spacing).
ConnectivityReport long_ring_report(const RingSpec& ring, double freq_hz,
                                    int n_qubits = 36,
                                    double spacing_rad = kTwoPi / 36.0,
                                    const LinearizedQubit* q_template = nullptr);

const char* to_string(CouplingClass cls);

} // namespace ringbus
