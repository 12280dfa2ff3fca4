#include "ringbus/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ringbus/errors.hpp"
#include "ringbus/parallel.hpp"

namespace ringbus {

namespace {

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

// Tap separation in (0, 2*pi); coincident taps are rejected upstream.
double separation(double a, double b) {
    double d = wrap_angle(a - b);
    return d == 0.0 ? 0.0 : d;
}

struct PathStep {
    int ring;
    double from_angle;
    double to_angle;
    int link_index; // link leaving this ring (-1 on the last ring)
};

// Unique link path between two rings; the link graph must be a tree.
std::vector<int> link_path(const MultiRingTopology& topo, int ring_a, int ring_b) {
    const int n = static_cast<int>(topo.rings.size());
    std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbour, link idx)
    for (int li = 0; li < static_cast<int>(topo.links.size()); ++li) {
        const RingLink& l = topo.links[li];
        adj[l.ring_a].push_back({l.ring_b, li});
        adj[l.ring_b].push_back({l.ring_a, li});
    }
    std::vector<int> parent_link(n, -2);
    std::vector<int> parent_ring(n, -1);
    std::vector<int> stack{ring_a};
    parent_link[ring_a] = -1;
    bool cycle = false;
    while (!stack.empty()) {
        int r = stack.back();
        stack.pop_back();
        for (auto [nb, li] : adj[r]) {
            if (li == parent_link[r]) continue;
            if (parent_link[nb] != -2) {
                cycle = true;
                continue;
            }
            parent_link[nb] = li;
            parent_ring[nb] = r;
            stack.push_back(nb);
        }
    }
    if (parent_link[ring_b] == -2)
        throw NoPathError("inter_ring: rings are not connected by any link path");
    if (cycle)
        throw MultiplePathsError("inter_ring: link graph has a cycle; only trees are supported");
    std::vector<int> path;
    for (int r = ring_b; r != ring_a; r = parent_ring[r]) path.push_back(parent_link[r]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<PathStep> qubit_path(const MultiRingTopology& topo, std::size_t qa,
                                 std::size_t qb) {
    const QubitPlacement& A = topo.qubits[qa];
    const QubitPlacement& B = topo.qubits[qb];
    std::vector<int> links = link_path(topo, A.ring, B.ring);
    std::vector<PathStep> steps;
    int ring = A.ring;
    double from = A.angle_rad;
    for (int li : links) {
        const RingLink& l = topo.links[li];
        double attach = (l.ring_a == ring) ? l.angle_a_rad : l.angle_b_rad;
        steps.push_back({ring, from, attach, li});
        ring = (l.ring_a == ring) ? l.ring_b : l.ring_a;
        from = (topo.links[li].ring_a == ring) ? l.angle_a_rad : l.angle_b_rad;
    }
    steps.push_back({ring, from, B.angle_rad, -1});
    return steps;
}

double link_impedance(const MultiRingTopology& topo, const RingLink& l) {
    return l.z_c_ohm > 0.0 ? l.z_c_ohm : 0.5 * topo.rings[l.ring_a].z_ring_ohm;
}

std::vector<double> fundamentals(const MultiRingTopology& topo) {
    std::vector<double> f;
    for (const auto& r : topo.rings) f.push_back(r.fundamental_hz);
    return f;
}

} // namespace

void MultiRingTopology::validate() const {
    if (rings.empty()) throw ValidationError("topology: at least one ring required");
    for (const auto& r : rings) r.validate();
    for (const auto& l : links) {
        if (l.ring_a < 0 || l.ring_a >= static_cast<int>(rings.size()) ||
            l.ring_b < 0 || l.ring_b >= static_cast<int>(rings.size()))
            throw ValidationError("topology: link references a missing ring");
        if (l.ring_a == l.ring_b)
            throw ValidationError("topology: link must join two distinct rings");
    }
    for (const auto& q : qubits) {
        if (q.ring < 0 || q.ring >= static_cast<int>(rings.size()))
            throw ValidationError("topology: qubit '" + q.label + "' references a missing ring");
        q.qubit.validate();
        for (const auto& l : links) {
            if ((l.ring_a == q.ring && separation(l.angle_a_rad, q.angle_rad) == 0.0) ||
                (l.ring_b == q.ring && separation(l.angle_b_rad, q.angle_rad) == 0.0))
                throw ValidationError("topology: qubit '" + q.label +
                                      "' sits on a link attach point");
        }
    }
}

TwoPort half_wave_two_port(double z_c_ohm, double f_res_hz, double freq_hz) {
    if (!(z_c_ohm > 0.0) || !(f_res_hz > 0.0))
        throw std::invalid_argument("half_wave_two_port: Z_C and resonance must be positive");
    double bl = M_PI * freq_hz / f_res_hz;
    double cb = std::cos(bl), sb = std::sin(bl);
    return TwoPort{{cb, 0.0}, {0.0, z_c_ohm * sb}, {0.0, sb / z_c_ohm}, {cb, 0.0},
                   freq_hz};
}

ReducedNetworkFn inter_ring_network(const MultiRingTopology& topo,
                                    std::size_t qubit_a, std::size_t qubit_b) {
    topo.validate();
    if (qubit_a >= topo.qubits.size() || qubit_b >= topo.qubits.size())
        throw std::invalid_argument("inter_ring: qubit index out of range");
    if (topo.qubits[qubit_a].ring == topo.qubits[qubit_b].ring)
        throw std::invalid_argument("inter_ring: qubits share a ring; use the tap pair");
    auto steps = qubit_path(topo, qubit_a, qubit_b);

    struct Segment {
        RingTapPair pair;
        double link_z = 0.0;     // impedance of the link after this section
        double link_fres = 0.0;
    };
    std::vector<Segment> segs;
    for (const auto& st : steps) {
        const RingSpec& ring = topo.rings[st.ring];
        double theta = separation(st.to_angle, st.from_angle);
        Segment s;
        s.pair = RingTapPair{theta, ring.fundamental_hz, ring.z_ring_ohm, topo.z0_ohm};
        if (st.link_index >= 0) {
            const RingLink& l = topo.links[st.link_index];
            s.link_z = link_impedance(topo, l);
            s.link_fres = topo.rings[l.ring_a].fundamental_hz;
        }
        segs.push_back(s);
    }

    return [segs](double f) {
        ReducedNetwork net = ReducedNetwork::from_ring(ring_reduced(segs[0].pair, f));
        for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
            TwoPort link = half_wave_two_port(segs[k].link_z, segs[k].link_fres, f);
            net = net.then(link).then(
                ReducedNetwork::from_ring(ring_reduced(segs[k + 1].pair, f)));
        }
        return net;
    };
}

TwoPort inter_ring_two_port(const MultiRingTopology& topo, std::size_t qubit_a,
                            std::size_t qubit_b, double freq_hz) {
    ReducedNetworkFn core = inter_ring_network(topo, qubit_a, qubit_b);
    ReducedNetwork net = core(freq_hz);
    if (std::abs(net.s21(topo.z0_ohm)) < kDefaultK2Floor)
        throw DecoupledPortsError("inter_ring_two_port: no transmission at this frequency");
    TwoPort mid{net.n11 / net.s, net.n12 / net.s, net.n21 / net.s, net.n22 / net.s,
                freq_hz};
    TwoPort ca = series_capacitor(topo.qubits[qubit_a].qubit.coupling_cap_f, freq_hz);
    TwoPort cb = series_capacitor(topo.qubits[qubit_b].qubit.coupling_cap_f, freq_hz);
    return ca * mid * cb;
}

CouplingResult multi_ring_coupling(const MultiRingTopology& topo,
                                   std::size_t qubit_a, std::size_t qubit_b,
                                   double freq_hz) {
    topo.validate();
    const QubitPlacement& A = topo.qubits[qubit_a];
    const QubitPlacement& B = topo.qubits[qubit_b];
    if (A.ring == B.ring) {
        const RingSpec& ring = topo.rings[A.ring];
        RingTapPair pair{separation(A.angle_rad, B.angle_rad), ring.fundamental_hz,
                         ring.z_ring_ohm, topo.z0_ohm};
        return coupling_at(A.qubit, pair, freq_hz);
    }
    ReducedNetworkFn core = inter_ring_network(topo, qubit_a, qubit_b);
    return coupling_for_network(A.qubit, B.qubit, core, freq_hz);
}

int ConnectivityReport::partners_of(std::size_t q) const {
    int n = 0;
    for (const auto& e : entries) {
        if (e.error.empty() && (e.i == q || e.j == q) && e.cls != CouplingClass::Zero)
            ++n;
    }
    return n;
}

const char* to_string(CouplingClass cls) {
    switch (cls) {
        case CouplingClass::Zero: return "zero";
        case CouplingClass::Weak: return "weak";
        case CouplingClass::Strong: return "strong";
    }
    return "zero";
}

namespace {

void classify(ConnectivityReport& rep) {
    double vmax = 0.0;
    for (const auto& e : rep.entries)
        if (e.error.empty()) vmax = std::max(vmax, std::abs(e.j_hz));
    rep.zero_threshold_hz = 0.01 * vmax;
    double lo = vmax, hi = 0.0;
    for (const auto& e : rep.entries) {
        if (!e.error.empty()) continue;
        double v = std::abs(e.j_hz);
        if (v < rep.zero_threshold_hz) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    rep.class_split_hz = (hi > 0.0) ? std::sqrt(lo * hi) : 0.0;
    for (auto& e : rep.entries) {
        if (!e.error.empty()) continue;
        double v = std::abs(e.j_hz);
        if (v < rep.zero_threshold_hz)
            e.cls = CouplingClass::Zero;
        else
            e.cls = (v >= rep.class_split_hz) ? CouplingClass::Strong : CouplingClass::Weak;
    }
}

std::string path_descriptor(const MultiRingTopology& topo, std::size_t qa,
                            std::size_t qb) {
    const QubitPlacement& A = topo.qubits[qa];
    const QubitPlacement& B = topo.qubits[qb];
    if (A.ring == B.ring) return "";
    std::string s = "r" + std::to_string(A.ring);
    try {
        for (int li : link_path(topo, A.ring, B.ring)) {
            const RingLink& l = topo.links[li];
            int next = (l.ring_a == -1) ? l.ring_b : l.ring_b;
            s += "-l" + std::to_string(li) + "-r" +
                 std::to_string(l.ring_a == A.ring ? l.ring_b : l.ring_a);
            (void)next;
        }
    } catch (const Error&) {
        s += "-?";
    }
    return s;
}

} // namespace

ConnectivityReport connectivity_report(const MultiRingTopology& topo,
                                       double freq_hz) {
    topo.validate();
    ConnectivityReport rep;
    const std::size_t n = topo.qubits.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            ReportEntry e;
            e.i = i;
            e.j = j;
            e.label_i = topo.qubits[i].label;
            e.label_j = topo.qubits[j].label;
            if (topo.qubits[i].ring == topo.qubits[j].ring) {
                e.theta_deg = separation(topo.qubits[j].angle_rad,
                                         topo.qubits[i].angle_rad) * 180.0 / M_PI;
            } else {
                e.path = path_descriptor(topo, i, j);
            }
            rep.entries.push_back(e);
        }

    parallel_for(rep.entries.size(), [&](std::size_t k) {
        ReportEntry& e = rep.entries[k];
        try {
            e.j_hz = multi_ring_coupling(topo, e.i, e.j, freq_hz).j_hz;
        } catch (const Error& err) {
            e.error = err.what();
        }
    });
    classify(rep);
    return rep;
}

ConnectivityReport long_ring_report(const RingSpec& ring, double freq_hz,
                                    int n_qubits, double spacing_rad,
                                    const LinearizedQubit* q_template) {
    ring.validate();
    if (n_qubits < 2) throw std::invalid_argument("long_ring_report: need >= 2 qubits");
    LinearizedQubit q = q_template
                            ? *q_template
                            : LinearizedQubit::from_frequency(freq_hz, kDefaultQubitCapF,
                                                              kDefaultCouplingCapF);

    // One solve per distinct separation; qubits are identical.
    std::map<long long, double> j_by_angle_key;
    std::set<long long> keys;
    auto key_of = [&](double theta) {
        return static_cast<long long>(std::llround(theta * 1e9));
    };
    for (int d = 1; d < n_qubits; ++d) keys.insert(key_of(wrap_angle(d * spacing_rad)));

    std::vector<long long> key_list(keys.begin(), keys.end());
    std::vector<double> j_list(key_list.size(), 0.0);
    std::vector<std::string> err_list(key_list.size());
    parallel_for(key_list.size(), [&](std::size_t k) {
        double theta = key_list[k] * 1e-9;
        RingTapPair pair{theta, ring.fundamental_hz, ring.z_ring_ohm, 50.0};
        try {
            j_list[k] = coupling_at(q, pair, freq_hz).j_hz;
        } catch (const Error& e) {
            err_list[k] = e.what();
        }
    });
    std::map<long long, std::string> err_by_key;
    for (std::size_t k = 0; k < key_list.size(); ++k) {
        j_by_angle_key[key_list[k]] = j_list[k];
        if (!err_list[k].empty()) err_by_key[key_list[k]] = err_list[k];
    }

    ConnectivityReport rep;
    for (int i = 0; i < n_qubits; ++i)
        for (int j = i + 1; j < n_qubits; ++j) {
            double theta = wrap_angle((j - i) * spacing_rad);
            ReportEntry e;
            e.i = static_cast<std::size_t>(i);
            e.j = static_cast<std::size_t>(j);
            e.label_i = "Q" + std::to_string(i + 1);
            e.label_j = "Q" + std::to_string(j + 1);
            e.theta_deg = theta * 180.0 / M_PI;
            long long key = key_of(theta);
            e.j_hz = j_by_angle_key[key];
            auto it = err_by_key.find(key);
            if (it != err_by_key.end()) e.error = it->second;
            rep.entries.push_back(e);
        }
    classify(rep);
    return rep;
}

} // namespace ringbus
