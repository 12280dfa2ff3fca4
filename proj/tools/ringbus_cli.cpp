// Command-line front end: parses device and measurement files, dispatches
// the computations and emits CSV/JSON artifacts.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringbus/crosstalk.hpp"
#include "ringbus/device.hpp"
#include "ringbus/errors.hpp"
#include "ringbus/ring.hpp"
#include "ringbus/scaling.hpp"

using nlohmann::json;
using namespace ringbus;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Output {
    std::string path = "-";

    void write(const std::string& text) const {
        if (path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot open output path '" + path + "'");
        out << text;
    }
};

std::vector<double> parse_grid(const std::string& text) {
    // "a:b:n" inclusive linear grid
    double a = 0, b = 0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
        throw ValidationError("grid: expected a:b:n, got '" + text + "'");
    std::vector<double> out;
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (long k = 0; k < n; ++k)
        out.push_back(a + (b - a) * static_cast<double>(k) / (n - 1));
    return out;
}

struct DeviceContext {
    device::DeviceSpec spec;
    MultiRingTopology topo;
    double calibrated_cap_f = 0.0;
};

DeviceContext load_device(const std::string& path) {
    DeviceContext ctx;
    ctx.spec = device::parse_device_spec(path);
    ctx.calibrated_cap_f = device::resolve_coupling_cap(ctx.spec);
    ctx.topo = device::to_topology(ctx.spec, ctx.calibrated_cap_f);
    if (ctx.calibrated_cap_f > 0.0) {
        json prov;
        prov["provenance"]["coupling_cap_f"] = ctx.calibrated_cap_f;
        prov["provenance"]["calibrated"] = true;
        prov["provenance"]["calibration"] = {
            {"target_j_hz", ctx.spec.defaults.calibration.target_j_hz},
            {"at_theta_deg", ctx.spec.defaults.calibration.at_theta_deg},
            {"at_freq_hz", ctx.spec.defaults.calibration.at_freq_hz}};
        std::cerr << prov.dump() << "\n";
    }
    return ctx;
}

// Built-in single-ring defaults for device-less runs.
DeviceContext default_device() {
    DeviceContext ctx;
    ctx.spec.rings.push_back({3.127e9, 50.0});
    ctx.topo.rings = {RingSpec{3.127e9, 50.0}};
    ctx.calibrated_cap_f = kDefaultCouplingCapF;
    return ctx;
}

LinearizedQubit template_qubit(const DeviceContext& ctx, double freq_hz) {
    if (!ctx.topo.qubits.empty()) {
        LinearizedQubit q = ctx.topo.qubits[0].qubit;
        return LinearizedQubit::from_frequency(freq_hz, q.c_q_farad, q.coupling_cap_f);
    }
    return LinearizedQubit::from_frequency(freq_hz, kDefaultQubitCapF,
                                           ctx.calibrated_cap_f);
}

// Ring-theory couplings for every device pair at the mean pair frequency.
spectrum::CouplingMatrixJ theory_couplings(const DeviceContext& ctx) {
    const auto& topo = ctx.topo;
    int n = static_cast<int>(topo.qubits.size());
    auto j = spectrum::CouplingMatrixJ::zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            double f = 0.5 * (ctx.spec.qubits[a].freq_hz + ctx.spec.qubits[b].freq_hz);
            j.set(a, b, multi_ring_coupling(topo, a, b, f).j_hz);
        }
    return j;
}

const char* method_name(CouplingMethod m) {
    return m == CouplingMethod::DeterminantSplitting ? "determinant-splitting"
                                                     : "closed-form";
}

json error_json(const std::string& type, const std::string& message) {
    return json{{"error", {{"type", type}, {"message", message}}}};
}

std::string classify_error(const std::exception& e) {
    if (dynamic_cast<const DecoupledPortsError*>(&e)) return "DecoupledPorts";
    if (dynamic_cast<const NoRootInBracketError*>(&e)) return "NoRootInBracket";
    if (dynamic_cast<const PoleInBracketError*>(&e)) return "PoleInBracket";
    if (dynamic_cast<const UnachievableError*>(&e)) return "Unachievable";
    if (dynamic_cast<const DimensionOverflowError*>(&e)) return "DimensionOverflow";
    if (dynamic_cast<const AmbiguousLabelError*>(&e)) return "AmbiguousLabel";
    if (dynamic_cast<const NonConvergenceError*>(&e)) return "NonConvergence";
    if (dynamic_cast<const UnderdeterminedSystemError*>(&e)) return "UnderdeterminedSystem";
    if (dynamic_cast<const SinglePeakError*>(&e)) return "SinglePeak";
    if (dynamic_cast<const FitDivergedError*>(&e)) return "FitDiverged";
    if (dynamic_cast<const ResonantDenominatorError*>(&e)) return "ResonantDenominator";
    if (dynamic_cast<const UnresolvedCoefficientError*>(&e)) return "UnresolvedCoefficient";
    if (dynamic_cast<const NoPathError*>(&e)) return "NoPath";
    if (dynamic_cast<const MultiplePathsError*>(&e)) return "MultiplePaths";
    if (dynamic_cast<const ParseError*>(&e)) return "Parse";
    if (dynamic_cast<const ValidationError*>(&e)) return "Validation";
    return "Error";
}

std::string report_csv(const ConnectivityReport& rep) {
    std::string csv = "qubit_i,qubit_j,theta_ij_deg,path,j_hz,class\n";
    for (const auto& e : rep.entries) {
        csv += e.label_i + "," + e.label_j + ",";
        if (e.path.empty()) csv += fmt(e.theta_deg);
        csv += "," + e.path + ",";
        if (e.error.empty()) {
            csv += fmt(e.j_hz);
            csv += std::string(",") + to_string(e.cls) + "\n";
        } else {
            csv += ",error\n";
        }
    }
    return csv;
}

json report_json(const ConnectivityReport& rep) {
    json adj = json::object();
    for (const auto& e : rep.entries) {
        json edge{{"to", e.label_j},
                  {"j_hz", e.j_hz},
                  {"class", to_string(e.cls)}};
        if (!e.path.empty()) edge["path"] = e.path;
        else edge["theta_ij_deg"] = e.theta_deg;
        if (!e.error.empty()) edge["error"] = e.error;
        adj[e.label_i].push_back(edge);
    }
    return json{{"adjacency", adj},
                {"zero_threshold_hz", rep.zero_threshold_hz},
                {"class_split_hz", rep.class_split_hz}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ring-resonator qubit network design and analysis"};
    app.require_subcommand(1);

    std::string device_path, out_path = "-", json_out_path;
    long seed = 0;
    app.add_option("--device", device_path, "device spec JSON");
    app.add_option("--out", out_path, "output path or - for stdout");
    app.add_option("--json-out", json_out_path, "secondary JSON output path");
    app.add_option("--seed", seed, "seed for synthetic noise");

    auto* c_coupling = app.add_subcommand("coupling", "J at one tap angle and frequency");
    double theta_deg = 180.0, freq_hz = 4.65e9;
    c_coupling->add_option("--theta", theta_deg, "tap separation in degrees")->required();
    c_coupling->add_option("--freq", freq_hz, "probe frequency in Hz")->required();

    auto* c_map = app.add_subcommand("coupling-map", "J over a (theta, f) grid");
    std::string theta_grid = "10:350:35", freq_grid = "4.2e9:5.2e9:41";
    double guard_hz = 20e6;
    c_map->add_option("--theta-grid", theta_grid, "degrees a:b:n");
    c_map->add_option("--freq-grid", freq_grid, "Hz a:b:n");
    c_map->add_option("--guard", guard_hz, "ring-mode guard band in Hz");

    auto* c_report = app.add_subcommand("report", "all-pairs connectivity report");
    double report_freq = 0.0;
    c_report->add_option("--freq", report_freq, "probe frequency (default special)");

    auto* c_spectrum = app.add_subcommand("spectrum", "dressed levels of the device");
    int levels = 8, max_exc = 8;
    c_spectrum->add_option("--levels", levels, "levels per transmon");
    c_spectrum->add_option("--max-excitations", max_exc, "total excitation cap");

    auto* c_kerr = app.add_subcommand("cross-kerr", "pairwise dressed-level shifts");
    c_kerr->add_option("--levels", levels, "levels per transmon");
    c_kerr->add_option("--max-excitations", max_exc, "total excitation cap");

    auto* c_anti = app.add_subcommand("anticross", "avoided-crossing branch scan");
    std::string pair_arg, grid_arg;
    c_anti->add_option("--pair", pair_arg, "swept,partner qubit labels")->required();
    c_anti->add_option("--grid", grid_arg, "sweep frequency grid a:b:n in Hz")->required();
    c_anti->add_option("--levels", levels, "levels per transmon");
    c_anti->add_option("--max-excitations", max_exc, "total excitation cap");

    auto* c_fit = app.add_subcommand("fit", "invert measurements to couplings");
    std::string meas_path;
    int max_iter = 2000;
    c_fit->add_option("--measurements", meas_path, "measurement JSON")->required();
    c_fit->add_option("--max-iter", max_iter, "optimizer iteration cap");
    c_fit->add_option("--levels", levels, "levels per transmon");
    c_fit->add_option("--max-excitations", max_exc, "total excitation cap");

    auto* c_crsim = app.add_subcommand("cr-sim", "cross-resonance tomography traces");
    double cr_control_freq = 4.6566e9, cr_control_delta = -309e6;
    double cr_target_freq = 4.7488e9, cr_target_delta = -308e6;
    double cr_j = 3.45e6, cr_omega = 9.22e6, cr_m = 0.0, cr_phase_ct = 0.0;
    int cr_phases = 8, cr_samples = 160, cr_levels = 3;
    c_crsim->add_option("--control-freq", cr_control_freq, "control frequency Hz");
    c_crsim->add_option("--control-delta", cr_control_delta, "control anharmonicity Hz");
    c_crsim->add_option("--target-freq", cr_target_freq, "target frequency Hz");
    c_crsim->add_option("--target-delta", cr_target_delta, "target anharmonicity Hz");
    c_crsim->add_option("--j", cr_j, "exchange coupling Hz");
    c_crsim->add_option("--omega", cr_omega, "drive amplitude Hz");
    c_crsim->add_option("--m", cr_m, "injected cross-talk fraction");
    c_crsim->add_option("--ct-phase", cr_phase_ct, "cross-talk phase rad");
    c_crsim->add_option("--phases", cr_phases, "number of drive phases");
    c_crsim->add_option("--samples", cr_samples, "time samples per trajectory");
    c_crsim->add_option("--cr-levels", cr_levels, "levels per transmon");

    auto* c_crest = app.add_subcommand("cr-estimate", "cross-talk fraction from a trace");
    std::string trace_path;
    double est_j = 3.45e6, est_delta = -92.2e6, est_delta1 = -309e6;
    c_crest->add_option("--trace", trace_path, "tomography CSV from cr-sim")->required();
    c_crest->add_option("--j", est_j, "exchange coupling Hz")->required();
    c_crest->add_option("--delta", est_delta, "control-target detuning Hz")->required();
    c_crest->add_option("--delta1", est_delta1, "control anharmonicity Hz")->required();

    auto* c_deph = app.add_subcommand("dephasing", "excess dephasing rate per photon");
    double tau_base = 0.0, tau_tone = 0.0, nbar = 0.0;
    c_deph->add_option("--tau-baseline", tau_base, "echo time without tone, s")->required();
    c_deph->add_option("--tau-tone", tau_tone, "echo time with tone, s")->required();
    c_deph->add_option("--nbar", nbar, "calibrated photon number")->required();

    auto* c_cal = app.add_subcommand("calibrate", "solve the coupling cap");
    double cal_target = 0.0, cal_theta = 0.0, cal_freq = 0.0;
    c_cal->add_option("--target-j", cal_target, "target |J| in Hz");
    c_cal->add_option("--at-theta", cal_theta, "tap angle in degrees");
    c_cal->add_option("--at-freq", cal_freq, "probe frequency in Hz");

    CLI11_PARSE(app, argc, argv);
    Output out{out_path};

    try {
        DeviceContext ctx =
            device_path.empty() ? default_device() : load_device(device_path);
        const RingSpec ring0 = ctx.topo.rings.at(0);
        double fsp = 1.5 * ring0.fundamental_hz;

        if (*c_coupling) {
            LinearizedQubit q = template_qubit(ctx, freq_hz);
            RingTapPair pair{theta_deg * M_PI / 180.0, ring0.fundamental_hz,
                             ring0.z_ring_ohm, ctx.topo.z0_ohm};
            auto res = coupling_at(q, pair, freq_hz);
            std::string csv =
                "theta_deg,freq_hz,j_hz,method,f_minus_hz,f_plus_hz,residual\n";
            csv += fmt(theta_deg) + "," + fmt(freq_hz) + "," + fmt(res.j_hz) + "," +
                   method_name(res.method) + "," + fmt(res.eigenfrequencies_hz[0]) +
                   "," + fmt(res.eigenfrequencies_hz[1]) + "," + fmt(res.residual) +
                   "\n";
            out.write(csv);
        } else if (*c_map) {
            std::vector<double> thetas_deg = parse_grid(theta_grid);
            std::vector<double> freqs = parse_grid(freq_grid);
            std::vector<double> thetas;
            for (double d : thetas_deg) thetas.push_back(d * M_PI / 180.0);
            LinearizedQubit q = template_qubit(ctx, freqs.front());
            RingTapPair pair{1.0, ring0.fundamental_hz, ring0.z_ring_ohm,
                             ctx.topo.z0_ohm};
            CouplingMap map = coupling_map(q, pair, thetas, freqs, guard_hz);
            std::string csv = "theta_deg,freq_hz,j_hz,method,status\n";
            for (std::size_t ti = 0; ti < thetas.size(); ++ti)
                for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
                    const auto& cell = map.at(ti, fi);
                    csv += fmt(thetas_deg[ti]) + "," + fmt(freqs[fi]) + ",";
                    if (cell.result) {
                        csv += fmt(cell.result->j_hz);
                        csv += std::string(",") + method_name(cell.result->method) +
                               ",ok\n";
                    } else {
                        csv += ",,\"" + cell.error + "\"\n";
                    }
                }
            out.write(csv);
        } else if (*c_report) {
            double f = report_freq > 0.0 ? report_freq : fsp;
            ConnectivityReport rep = connectivity_report(ctx.topo, f);
            out.write(report_csv(rep));
            if (!json_out_path.empty()) {
                Output jout{json_out_path};
                jout.write(report_json(rep).dump(2) + "\n");
            }
        } else if (*c_spectrum) {
            auto specs = device::to_transmons(ctx.spec);
            auto j = theory_couplings(ctx);
            auto dressed = spectrum::diagonalize(spectrum::build_hamiltonian(
                specs, j, spectrum::TruncationPolicy{levels, max_exc}));
            std::string csv = "state,energy_hz,overlap,ambiguous\n";
            for (std::size_t k = 0; k < dressed.energies_hz.size(); ++k) {
                const auto& occ = dressed.basis[dressed.bare_of_state[k]];
                std::string label;
                for (int v : occ) label += std::to_string(v);
                csv += label + "," + fmt(dressed.energies_hz[k]) + "," +
                       fmt(dressed.overlap_of_state[k]) + "," +
                       (dressed.ambiguous[k] ? "1" : "0") + "\n";
            }
            out.write(csv);
        } else if (*c_kerr) {
            auto specs = device::to_transmons(ctx.spec);
            auto j = theory_couplings(ctx);
            auto dressed = spectrum::diagonalize(spectrum::build_hamiltonian(
                specs, j, spectrum::TruncationPolicy{levels, max_exc}));
            std::string csv =
                "qubit_i,qubit_j,angle_deg,j_hz,zeta_hz,reported_shift_hz\n";
            int n = static_cast<int>(specs.size());
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    double zeta = spectrum::cross_kerr(dressed, a, b);
                    csv += specs[a].label + "," + specs[b].label + "," +
                           fmt(device::pair_angle_deg(ctx.spec, a, b)) + "," +
                           fmt(j.j_hz(a, b)) + "," + fmt(zeta) + "," +
                           fmt(-0.5 * zeta) + "\n";
                }
            out.write(csv);
        } else if (*c_anti) {
            auto comma = pair_arg.find(',');
            if (comma == std::string::npos)
                throw ValidationError("--pair expects 'swept,partner' labels");
            int qa = ctx.spec.qubit_index(pair_arg.substr(0, comma));
            int qb = ctx.spec.qubit_index(pair_arg.substr(comma + 1));
            auto specs = device::to_transmons(ctx.spec);
            auto j = theory_couplings(ctx);
            auto scan = spectrum::avoided_crossing_scan(
                specs, j, qa, qb, parse_grid(grid_arg),
                spectrum::TruncationPolicy{levels, max_exc});
            std::string csv = "sweep_freq_hz,lower_hz,upper_hz,gap_hz\n";
            for (std::size_t k = 0; k < scan.sweep_freq_hz.size(); ++k)
                csv += fmt(scan.sweep_freq_hz[k]) + "," + fmt(scan.lower_branch_hz[k]) +
                       "," + fmt(scan.upper_branch_hz[k]) + "," +
                       fmt(scan.upper_branch_hz[k] - scan.lower_branch_hz[k]) + "\n";
            out.write(csv);
            if (!json_out_path.empty()) {
                Output jout{json_out_path};
                jout.write(json{{"min_gap_hz", scan.min_gap_hz},
                                {"freq_at_min_hz", scan.freq_at_min_hz}}
                               .dump(2) +
                           "\n");
            }
        } else if (*c_fit) {
            auto meas = device::load_measurement_set(meas_path);
            auto fit = inversion::fit_couplings(
                meas, spectrum::TruncationPolicy{levels, max_exc}, max_iter);
            std::string csv = "qubit_i,qubit_j,angle_deg,j_hz,residual_sigma\n";
            json jpairs = json::array();
            for (std::size_t k = 0; k < meas.pairs.size(); ++k) {
                const auto& p = meas.pairs[k];
                double jv = fit.j.j_hz(p.i, p.j);
                csv += meas.qubits[p.i].label + "," + meas.qubits[p.j].label + "," +
                       fmt(p.angle_deg) + "," + fmt(jv) + "," +
                       fmt(fit.residuals.at(k)) + "\n";
                jpairs.push_back({{"q1", meas.qubits[p.i].label},
                                  {"q2", meas.qubits[p.j].label},
                                  {"angle_deg", p.angle_deg},
                                  {"j_hz", jv},
                                  {"residual_sigma", fit.residuals.at(k)}});
            }
            out.write(csv);
            if (!json_out_path.empty()) {
                json doc{{"pairs", jpairs},
                         {"objective", fit.objective},
                         {"iterations", fit.iterations},
                         {"final_step", fit.final_step},
                         {"converged", fit.converged}};
                Output jout{json_out_path};
                jout.write(doc.dump(2) + "\n");
            }
        } else if (*c_crsim) {
            crosstalk::CRSetup setup;
            setup.control = {cr_control_freq, cr_control_delta, "control"};
            setup.target = {cr_target_freq, cr_target_delta, "target"};
            setup.j_hz = cr_j;
            setup.drive_amp_hz = cr_omega;
            setup.crosstalk_m = cr_m;
            setup.crosstalk_phase_rad = cr_phase_ct;
            std::vector<double> phases;
            for (int k = 0; k < cr_phases; ++k)
                phases.push_back(2 * M_PI * k / cr_phases);
            crosstalk::TomographyOptions opts;
            opts.n_levels = cr_levels;
            opts.n_samples = cr_samples;
            auto trace = crosstalk::simulate_cr_tomography(setup, phases, opts);
            std::string csv =
                "phase_rad,a_zx_hz,a_zy_hz,a_ix_hz,a_iy_hz,a_zz_hz,a_iz_hz\n";
            for (std::size_t k = 0; k < trace.phase_rad.size(); ++k)
                csv += fmt(trace.phase_rad[k]) + "," + fmt(trace.a_zx_hz[k]) + "," +
                       fmt(trace.a_zy_hz[k]) + "," + fmt(trace.a_ix_hz[k]) + "," +
                       fmt(trace.a_iy_hz[k]) + "," + fmt(trace.a_zz_hz[k]) + "," +
                       fmt(trace.a_iz_hz[k]) + "\n";
            out.write(csv);
        } else if (*c_crest) {
            std::ifstream in(trace_path);
            if (!in) throw ParseError("cr-estimate: cannot open '" + trace_path + "'");
            crosstalk::TomographyTrace trace;
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream row(line);
                std::vector<double> vals;
                std::string cell;
                while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
                if (vals.size() != 7)
                    throw ParseError("cr-estimate: expected 7 columns per row");
                trace.phase_rad.push_back(vals[0]);
                trace.a_zx_hz.push_back(vals[1]);
                trace.a_zy_hz.push_back(vals[2]);
                trace.a_ix_hz.push_back(vals[3]);
                trace.a_iy_hz.push_back(vals[4]);
                trace.a_zz_hz.push_back(vals[5]);
                trace.a_iz_hz.push_back(vals[6]);
            }
            double m = crosstalk::estimate_crosstalk(trace, est_j, est_delta, est_delta1);
            out.write(json{{"m", m}}.dump(2) + "\n");
        } else if (*c_deph) {
            double gamma =
                crosstalk::readout_dephasing_rate({tau_base, tau_tone, nbar});
            out.write("gamma_hz_per_photon\n" + fmt(gamma) + "\n");
        } else if (*c_cal) {
            const auto& cal = ctx.spec.defaults.calibration;
            double target = cal_target > 0.0 ? cal_target : cal.target_j_hz;
            double th = (cal_theta > 0.0 ? cal_theta : cal.at_theta_deg) * M_PI / 180.0;
            double f = cal_freq > 0.0 ? cal_freq : cal.at_freq_hz;
            double cq = ctx.topo.qubits.empty()
                            ? kDefaultQubitCapF
                            : ctx.topo.qubits[0].qubit.c_q_farad;
            double cap = calibrate_coupling_cap(target, th, f, cq, ring0);
            out.write(json{{"coupling_cap_f", cap},
                           {"target_j_hz", target},
                           {"at_theta_deg", th * 180.0 / M_PI},
                           {"at_freq_hz", f}}
                          .dump(2) +
                      "\n");
        }
    } catch (const Error& e) {
        out.write(error_json(classify_error(e), e.what()).dump() + "\n");
        return 1;
    } catch (const std::exception& e) {
        out.write(error_json("Error", e.what()).dump() + "\n");
        return 1;
    }
    (void)seed;
    return 0;
}
