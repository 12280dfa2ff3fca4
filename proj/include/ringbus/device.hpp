#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ringbus/inversion.hpp"
#include "ringbus/scaling.hpp"
#include "ringbus/spectrum.hpp"

namespace ringbus::device {

struct CalibrationTarget {
    double target_j_hz = 4.74e6;
    double at_theta_deg = 180.0;
    double at_freq_hz = 4.65e9;
};

struct Defaults {
    double z0_ohm = 50.0;
    CalibrationTarget calibration;
};

struct RingEntry {
    double fundamental_hz = 3.127e9;
    double impedance_ohm = 50.0;
};

struct LinkEntry {
    int ring_a = 0;
    double angle_a_deg = 0.0;
    int ring_b = 0;
    double angle_b_deg = 0.0;
    std::optional<double> z_c_ohm;
};

struct QubitEntry {
    std::string label;
    int ring = 0;
    double angle_deg = 0.0;
    double freq_hz = 0.0;
    double anharmonicity_hz = 0.0;
    std::optional<double> coupling_cap_f;
    // Readout metadata carried through untouched (not used in computations).
    std::map<std::string, double> passthrough;
};

// Single source of truth for a device; parsed from JSON and validated.
struct DeviceSpec {
    std::vector<RingEntry> rings;
    std::vector<LinkEntry> links;
    std::vector<QubitEntry> qubits;
    Defaults defaults;

    void validate() const;
    int qubit_index(const std::string& label) const;
};

DeviceSpec parse_device_spec(const std::string& path);
DeviceSpec parse_device_spec_text(const std::string& json_text);

// Charging capacitance from the measured anharmonicity, C_Q = e^2/(2 h |delta|).
double qubit_capacitance_from_anharmonicity(double delta_hz);

// Computational topology; qubits without an explicit coupling cap receive
// cap_f (normally the calibrated value).
MultiRingTopology to_topology(const DeviceSpec& spec, double calibrated_cap_f);

// Calibrates against spec.defaults.calibration when any qubit omits its cap;
// returns the cap actually used (calibrated or 0 when all caps are explicit).
double resolve_coupling_cap(const DeviceSpec& spec);

// Transmon view of the device for the spectrum/inversion modules.
std::vector<spectrum::TransmonSpec> to_transmons(const DeviceSpec& spec);

// Pair angle in degrees folded to [0, 180].
double pair_angle_deg(const DeviceSpec& spec, int i, int j);

// Measurement-set document: qubits[] (label, freq_hz, anharmonicity_hz) and
// pairs[] (q1, q2, angle_deg, cross_kerr_khz, sigma_khz, splitting_mhz?).
inversion::MeasurementSet load_measurement_set(const std::string& path);
inversion::MeasurementSet parse_measurement_set_text(const std::string& json_text);

} // namespace ringbus::device
