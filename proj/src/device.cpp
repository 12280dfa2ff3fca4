#include "ringbus/device.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ringbus/errors.hpp"

namespace ringbus::device {

namespace {

using nlohmann::json;

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw ValidationError(where + ": missing field '" + key + "'");
    if (!obj[key].is_number())
        throw ValidationError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

} // namespace

double qubit_capacitance_from_anharmonicity(double delta_hz) {
    constexpr double e = 1.602176634e-19;
    constexpr double h = 6.62607015e-34;
    double ec = h * std::abs(delta_hz);
    if (!(ec > 0.0))
        throw ValidationError("qubit capacitance: anharmonicity must be nonzero");
    return e * e / (2.0 * ec);
}

void DeviceSpec::validate() const {
    if (rings.empty()) throw ValidationError("device.rings: at least one ring required");
    for (std::size_t k = 0; k < rings.size(); ++k) {
        if (!(rings[k].fundamental_hz > 0.0) || !(rings[k].impedance_ohm > 0.0))
            throw ValidationError("device.rings[" + std::to_string(k) +
                                  "]: fundamental_hz and impedance_ohm must be positive");
    }
    for (std::size_t k = 0; k < links.size(); ++k) {
        const auto& l = links[k];
        std::string where = "device.links[" + std::to_string(k) + "]";
        if (l.ring_a < 0 || l.ring_a >= static_cast<int>(rings.size()) ||
            l.ring_b < 0 || l.ring_b >= static_cast<int>(rings.size()))
            throw ValidationError(where + ": referenced ring does not exist");
        if (l.ring_a == l.ring_b)
            throw ValidationError(where + ": link must join two distinct rings");
        if (l.z_c_ohm && !(*l.z_c_ohm > 0.0))
            throw ValidationError(where + ".z_c_ohm: must be positive");
    }
    std::set<std::string> labels;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        const auto& q = qubits[k];
        std::string where = "device.qubits[" + std::to_string(k) + "]";
        if (q.label.empty()) throw ValidationError(where + ".label: must be nonempty");
        if (!labels.insert(q.label).second)
            throw ValidationError(where + ".label: duplicate label '" + q.label + "'");
        if (q.ring < 0 || q.ring >= static_cast<int>(rings.size()))
            throw ValidationError(where + ".ring: referenced ring does not exist");
        if (q.angle_deg < 0.0 || q.angle_deg >= 360.0)
            throw ValidationError(where + ".angle_deg: must lie in [0, 360)");
        if (!(q.freq_hz > 0.0))
            throw ValidationError(where + ".freq_hz: must be positive");
        if (!(std::abs(q.anharmonicity_hz) > 0.0))
            throw ValidationError(where + ".anharmonicity_hz: must be nonzero");
        if (q.coupling_cap_f && !(*q.coupling_cap_f > 0.0))
            throw ValidationError(where + ".coupling_cap_f: must be positive");
    }
    if (!(defaults.z0_ohm > 0.0))
        throw ValidationError("device.defaults.z0_ohm: must be positive");
    if (!(defaults.calibration.target_j_hz > 0.0))
        throw ValidationError("device.defaults.calibration.target_j_hz: must be positive");
}

int DeviceSpec::qubit_index(const std::string& label) const {
    for (std::size_t k = 0; k < qubits.size(); ++k)
        if (qubits[k].label == label) return static_cast<int>(k);
    throw ValidationError("device: unknown qubit label '" + label + "'");
}

DeviceSpec parse_device_spec_text(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("device spec: ") + e.what());
    }
    DeviceSpec spec;
    if (!doc.contains("rings") || !doc["rings"].is_array())
        throw ValidationError("device.rings: required array missing");
    for (std::size_t k = 0; k < doc["rings"].size(); ++k) {
        const auto& r = doc["rings"][k];
        std::string where = "device.rings[" + std::to_string(k) + "]";
        RingEntry e;
        e.fundamental_hz = require_number(r, "fundamental_hz", where);
        e.impedance_ohm = r.value("impedance_ohm", 50.0);
        spec.rings.push_back(e);
    }
    if (doc.contains("links")) {
        for (std::size_t k = 0; k < doc["links"].size(); ++k) {
            const auto& l = doc["links"][k];
            std::string where = "device.links[" + std::to_string(k) + "]";
            LinkEntry e;
            e.ring_a = static_cast<int>(require_number(l, "ring_a", where));
            e.angle_a_deg = require_number(l, "angle_a_deg", where);
            e.ring_b = static_cast<int>(require_number(l, "ring_b", where));
            e.angle_b_deg = require_number(l, "angle_b_deg", where);
            if (l.contains("z_c_ohm")) e.z_c_ohm = l["z_c_ohm"].get<double>();
            spec.links.push_back(e);
        }
    }
    if (!doc.contains("qubits") || !doc["qubits"].is_array())
        throw ValidationError("device.qubits: required array missing");
    for (std::size_t k = 0; k < doc["qubits"].size(); ++k) {
        const auto& q = doc["qubits"][k];
        std::string where = "device.qubits[" + std::to_string(k) + "]";
        QubitEntry e;
        if (!q.contains("label") || !q["label"].is_string())
            throw ValidationError(where + ".label: required string missing");
        e.label = q["label"].get<std::string>();
        e.ring = static_cast<int>(q.value("ring", 0.0));
        e.angle_deg = require_number(q, "angle_deg", where);
        e.freq_hz = require_number(q, "freq_hz", where);
        e.anharmonicity_hz = require_number(q, "anharmonicity_hz", where);
        if (q.contains("coupling_cap_f")) e.coupling_cap_f = q["coupling_cap_f"].get<double>();
        for (auto it = q.begin(); it != q.end(); ++it) {
            static const std::set<std::string> known{
                "label", "ring", "angle_deg", "freq_hz", "anharmonicity_hz",
                "coupling_cap_f"};
            if (!known.count(it.key()) && it.value().is_number())
                e.passthrough[it.key()] = it.value().get<double>();
        }
        spec.qubits.push_back(e);
    }
    if (doc.contains("defaults")) {
        const auto& d = doc["defaults"];
        spec.defaults.z0_ohm = d.value("z0_ohm", 50.0);
        if (d.contains("calibration")) {
            const auto& c = d["calibration"];
            spec.defaults.calibration.target_j_hz = c.value("target_j_hz", 4.74e6);
            spec.defaults.calibration.at_theta_deg = c.value("at_theta_deg", 180.0);
            spec.defaults.calibration.at_freq_hz = c.value("at_freq_hz", 4.65e9);
        }
    }
    spec.validate();
    return spec;
}

DeviceSpec parse_device_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("device spec: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_device_spec_text(text);
}

double resolve_coupling_cap(const DeviceSpec& spec) {
    bool needed = false;
    for (const auto& q : spec.qubits)
        if (!q.coupling_cap_f) needed = true;
    if (!needed) return 0.0;

    // Calibrate on the first ring with a representative charging capacitance.
    double cq = qubit_capacitance_from_anharmonicity(
        spec.qubits.empty() ? -308e6 : spec.qubits[0].anharmonicity_hz);
    RingSpec ring{spec.rings[0].fundamental_hz, spec.rings[0].impedance_ohm};
    const auto& cal = spec.defaults.calibration;
    return calibrate_coupling_cap(cal.target_j_hz,
                                  cal.at_theta_deg * M_PI / 180.0,
                                  cal.at_freq_hz, cq, ring);
}

MultiRingTopology to_topology(const DeviceSpec& spec, double calibrated_cap_f) {
    spec.validate();
    MultiRingTopology topo;
    topo.z0_ohm = spec.defaults.z0_ohm;
    for (const auto& r : spec.rings)
        topo.rings.push_back(RingSpec{r.fundamental_hz, r.impedance_ohm});
    for (const auto& l : spec.links) {
        RingLink link;
        link.ring_a = l.ring_a;
        link.angle_a_rad = l.angle_a_deg * M_PI / 180.0;
        link.ring_b = l.ring_b;
        link.angle_b_rad = l.angle_b_deg * M_PI / 180.0;
        link.z_c_ohm = l.z_c_ohm.value_or(0.0);
        topo.links.push_back(link);
    }
    for (const auto& q : spec.qubits) {
        QubitPlacement p;
        p.label = q.label;
        p.ring = q.ring;
        p.angle_rad = q.angle_deg * M_PI / 180.0;
        double cq = qubit_capacitance_from_anharmonicity(q.anharmonicity_hz);
        double cap = q.coupling_cap_f.value_or(calibrated_cap_f);
        if (!(cap > 0.0))
            throw ValidationError("device: qubit '" + q.label +
                                  "' has no coupling cap and none was calibrated");
        p.qubit = LinearizedQubit::from_frequency(q.freq_hz, cq, cap);
        topo.qubits.push_back(p);
    }
    topo.validate();
    return topo;
}

std::vector<spectrum::TransmonSpec> to_transmons(const DeviceSpec& spec) {
    std::vector<spectrum::TransmonSpec> out;
    for (const auto& q : spec.qubits)
        out.push_back({q.freq_hz, q.anharmonicity_hz, q.label});
    return out;
}

double pair_angle_deg(const DeviceSpec& spec, int i, int j) {
    double d = std::fmod(std::abs(spec.qubits[i].angle_deg - spec.qubits[j].angle_deg),
                         360.0);
    return d > 180.0 ? 360.0 - d : d;
}

inversion::MeasurementSet parse_measurement_set_text(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("measurement set: ") + e.what());
    }
    inversion::MeasurementSet meas;
    if (!doc.contains("qubits") || !doc["qubits"].is_array())
        throw ValidationError("measurements.qubits: required array missing");
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < doc["qubits"].size(); ++k) {
        const auto& q = doc["qubits"][k];
        std::string where = "measurements.qubits[" + std::to_string(k) + "]";
        if (!q.contains("label"))
            throw ValidationError(where + ".label: required string missing");
        labels.push_back(q["label"].get<std::string>());
        meas.qubits.push_back({require_number(q, "freq_hz", where),
                               require_number(q, "anharmonicity_hz", where),
                               labels.back()});
    }
    auto index_of = [&](const std::string& label, const std::string& where) {
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == label) return static_cast<int>(k);
        throw ValidationError(where + ": unknown qubit label '" + label + "'");
    };
    if (!doc.contains("pairs") || !doc["pairs"].is_array())
        throw ValidationError("measurements.pairs: required array missing");
    for (std::size_t k = 0; k < doc["pairs"].size(); ++k) {
        const auto& p = doc["pairs"][k];
        std::string where = "measurements.pairs[" + std::to_string(k) + "]";
        inversion::PairMeasurement m;
        m.i = index_of(p.value("q1", ""), where + ".q1");
        m.j = index_of(p.value("q2", ""), where + ".q2");
        m.angle_deg = require_number(p, "angle_deg", where);
        if (p.contains("cross_kerr_khz")) {
            m.cross_kerr_hz = p["cross_kerr_khz"].get<double>() * 1e3;
            m.sigma_cross_kerr_hz = p.value("sigma_khz", 5.0) * 1e3;
        }
        if (p.contains("splitting_mhz")) {
            m.splitting_hz = p["splitting_mhz"].get<double>() * 1e6;
            m.sigma_splitting_hz = p.value("sigma_splitting_mhz", 0.1) * 1e6;
        }
        meas.pairs.push_back(m);
    }
    meas.validate();
    return meas;
}

inversion::MeasurementSet load_measurement_set(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("measurement set: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_measurement_set_text(text);
}

} // namespace ringbus::device
