#include "ringbus/crosstalk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ringbus/optimize.hpp"
#include "ringbus/parallel.hpp"

namespace ringbus::crosstalk {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

void check_denominator(double value, double scale, const char* name) {
    if (std::abs(value) < 1e-9 * scale)
        throw ResonantDenominatorError(std::string("cr_amplitudes: resonant denominator ") +
                                       name + " vanishes");
}

double f3_zx(double j, double om, double d, double d1) {
    double lead = -(j * om / d) * (d1 / (d1 + d));
    double num = j * std::pow(om, 3) * d1 * d1 *
                 (3 * std::pow(d1, 3) + 11 * d1 * d1 * d + 15 * d1 * d * d +
                  9 * std::pow(d, 3));
    double den = 4 * std::pow(d, 3) * std::pow(d1 + d, 3) * (d1 + 2 * d) *
                 (3 * d1 + 2 * d);
    return lead + num / den;
}

double f4_ix(double j, double om, double d, double d1) {
    double lead = -j * om / (d1 + d);
    double num = j * std::pow(om, 3) * d1 * d;
    double den = std::pow(d1 + d, 3) * (d1 + 2 * d) * (3 * d1 + 2 * d);
    return lead + num / den;
}

Matrix ladder(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct PairFrame {
    int n_levels;
    Matrix b1, b2, n1, n2;          // control / target operators
    Matrix x2, y2, z2;              // target qubit-subspace Paulis
    Matrix h_static;                // undriven rotating-frame Hamiltonian (Hz)
    Vector dressed00, dressed10;    // prepared control states
    double drive_freq_hz;           // dressed target frequency

    PairFrame(const CRSetup& s, int levels) : n_levels(levels) {
        Matrix a = ladder(levels);
        Matrix id = Matrix::Identity(levels, levels);
        b1 = kron(a, id);
        b2 = kron(id, a);
        n1 = b1.adjoint() * b1;
        n2 = b2.adjoint() * b2;

        Matrix sx = Matrix::Zero(levels, levels), sy = sx, sz = sx;
        sx(0, 1) = sx(1, 0) = 1.0;
        sy(0, 1) = Complex(0, -1);
        sy(1, 0) = Complex(0, 1);
        sz(0, 0) = 1.0;
        sz(1, 1) = -1.0;
        x2 = kron(id, sx);
        y2 = kron(id, sy);
        z2 = kron(id, sz);

        // Lab-frame pair Hamiltonian (Hz) without drive.
        Matrix h0 = s.control.omega_hz * n1 + s.target.omega_hz * n2 +
                    0.5 * s.control.delta_hz * (n1 * n1 - n1) +
                    0.5 * s.target.delta_hz * (n2 * n2 - n2) +
                    s.j_hz * (b1.adjoint() * b2 + b2.adjoint() * b1);

        Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
        auto dressed = [&](int bare_index) {
            int best = 0;
            double w = -1.0;
            for (int k = 0; k < es.eigenvectors().cols(); ++k) {
                double v = std::norm(es.eigenvectors()(bare_index, k));
                if (v > w) {
                    w = v;
                    best = k;
                }
            }
            return std::pair<double, Vector>(es.eigenvalues()[best],
                                             es.eigenvectors().col(best));
        };
        auto [e00, v00] = dressed(0);
        auto [e01, v01] = dressed(1);          // |0, 1>
        auto [e10, v10] = dressed(n_levels);   // |1, 0>
        (void)v01;
        drive_freq_hz = e01 - e00; // drive at the measured target line
        dressed00 = v00;
        dressed10 = v10;

        h_static = h0 - drive_freq_hz * (n1 + n2);
    }

    // Rotating-frame Hamiltonian with the RWA drive at phase phi0.
    Matrix with_drive(const CRSetup& s, double phi0) const {
        Complex e1 = std::exp(Complex(0, -phi0));
        Complex e2 = std::exp(Complex(0, -(phi0 + s.crosstalk_phase_rad)));
        Matrix h = h_static;
        h += 0.5 * s.drive_amp_hz * (e1 * b1.adjoint() + std::conj(e1) * b1);
        h += 0.5 * s.crosstalk_m * s.drive_amp_hz *
             (e2 * b2.adjoint() + std::conj(e2) * b2);
        return h;
    }
};

struct BlochSample {
    double x, y, z;
};

std::vector<BlochSample> evolve(const Matrix& h, const PairFrame& fr,
                                const Vector& psi0,
                                const std::vector<double>& times) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector c0 = es.eigenvectors().adjoint() * psi0;
    std::vector<BlochSample> out;
    out.reserve(times.size());
    for (double t : times) {
        Vector phase(c0.size());
        for (int k = 0; k < c0.size(); ++k)
            phase[k] = c0[k] * std::exp(Complex(0, -kTwoPi * es.eigenvalues()[k] * t));
        Vector psi = es.eigenvectors() * phase;
        auto expect = [&](const Matrix& op) {
            return (psi.adjoint() * op * psi)(0, 0).real();
        };
        out.push_back({expect(fr.x2), expect(fr.y2), expect(fr.z2)});
    }
    return out;
}

// Precession of (0,0,1) about a constant field F (Hz).
void precession(const Eigen::Vector3d& field, const std::vector<double>& times,
                std::vector<BlochSample>& out) {
    out.resize(times.size());
    double w = field.norm();
    if (w == 0.0) {
        for (auto& s : out) s = {0.0, 0.0, 1.0};
        return;
    }
    Eigen::Vector3d nvec = field / w;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double th = kTwoPi * w * times[k];
        double c = std::cos(th), s = std::sin(th);
        out[k] = {(1 - c) * nvec[0] * nvec[2] + s * nvec[1],
                  (1 - c) * nvec[1] * nvec[2] - s * nvec[0],
                  c + (1 - c) * nvec[2] * nvec[2]};
    }
}

struct FieldFit {
    Eigen::Vector3d field;
    double rms;
};

FieldFit refine_field(const std::vector<double>& times,
                      const std::vector<BlochSample>& data,
                      const Eigen::Vector3d& seed) {
    auto residual = [&](const Eigen::VectorXd& p) {
        std::vector<BlochSample> model;
        precession(Eigen::Vector3d(p[0], p[1], p[2]), times, model);
        Eigen::VectorXd r(3 * times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            r[3 * k + 0] = model[k].x - data[k].x;
            r[3 * k + 1] = model[k].y - data[k].y;
            r[3 * k + 2] = model[k].z - data[k].z;
        }
        return r;
    };
    Eigen::VectorXd p0(3);
    p0 << seed[0], seed[1], seed[2];
    auto lm = optimize::levenberg_marquardt(residual, p0, 300, 1e-11);
    return {Eigen::Vector3d(lm.x[0], lm.x[1], lm.x[2]), lm.rms};
}

FieldFit fit_field(const std::vector<double>& times,
                   const std::vector<BlochSample>& data) {
    // Slope at t=0 gives the transverse field, zero crossings of z give |F|.
    double dt = times[1] - times[0];
    double fy = (data[1].x - data[0].x) / dt / kTwoPi;
    double fx = -(data[1].y - data[0].y) / dt / kTwoPi;
    double zbar = 0.0;
    for (const auto& s : data) zbar += s.z;
    zbar /= data.size();
    int crossings = 0;
    for (std::size_t k = 1; k < data.size(); ++k)
        if ((data[k].z - zbar) * (data[k - 1].z - zbar) < 0.0) ++crossings;
    double tspan = times.back() - times.front();
    double w_est = std::max(crossings / (2.0 * tspan), 1.0 / (2.0 * tspan));

    FieldFit best{Eigen::Vector3d::Zero(), std::numeric_limits<double>::infinity()};
    for (double wscale : {1.0, 0.5, 2.0}) {
        double w = wscale * w_est;
        double fz2 = w * w - fx * fx - fy * fy;
        double fz = fz2 > 0.0 ? std::sqrt(fz2) : 0.25 * w;
        for (double sg : {1.0, -1.0}) {
            FieldFit fit = refine_field(times, data, {fx, fy, sg * fz});
            if (fit.rms < best.rms) best = fit;
        }
        if (best.rms < 1e-8) break;
    }
    return best;
}

struct Sinusoid {
    double amplitude;
    double phase;   // y = amplitude * cos(phi + phase) + offset
    double offset;
};

Sinusoid fit_sinusoid(const std::vector<double>& phis, const std::vector<double>& ys) {
    Eigen::MatrixXd m(phis.size(), 3);
    Eigen::VectorXd b(phis.size());
    for (std::size_t k = 0; k < phis.size(); ++k) {
        m(k, 0) = 1.0;
        m(k, 1) = std::cos(phis[k]);
        m(k, 2) = std::sin(phis[k]);
        b[k] = ys[k];
    }
    Eigen::Vector3d c = m.colPivHouseholderQr().solve(b);
    return {std::hypot(c[1], c[2]), std::atan2(-c[2], c[1]), c[0]};
}

} // namespace

void CRSetup::validate() const {
    control.validate();
    target.validate();
    if (drive_amp_hz < 0.0)
        throw ValidationError("CRSetup: drive amplitude must be >= 0");
    if (crosstalk_m < 0.0)
        throw ValidationError("CRSetup: cross-talk fraction must be >= 0");
}

std::pair<double, double> cr_amplitudes(const CRSetup& setup) {
    setup.validate();
    double d = setup.detuning_hz();
    double d1 = setup.control.delta_hz;
    double scale = std::abs(d1) + std::abs(d);
    check_denominator(d, scale, "Delta");
    check_denominator(d1 + d, scale, "delta1 + Delta");
    check_denominator(d1 + 2 * d, scale, "delta1 + 2*Delta");
    check_denominator(3 * d1 + 2 * d, scale, "3*delta1 + 2*Delta");
    return {f3_zx(setup.j_hz, setup.drive_amp_hz, d, d1),
            f4_ix(setup.j_hz, setup.drive_amp_hz, d, d1)};
}

TomographyTrace simulate_cr_tomography(const CRSetup& setup,
                                       const std::vector<double>& phase_grid_rad,
                                       const TomographyOptions& opts) {
    setup.validate();
    if (phase_grid_rad.empty())
        throw std::invalid_argument("simulate_cr_tomography: empty phase grid");
    if (opts.n_levels < 2 || opts.n_samples < 16)
        throw std::invalid_argument("simulate_cr_tomography: bad options");

    PairFrame frame(setup, opts.n_levels);

    double t_total = opts.evolution_time_s;
    if (t_total <= 0.0) {
        double a_est = std::abs(f3_zx(setup.j_hz, std::max(setup.drive_amp_hz, 1.0),
                                      setup.detuning_hz(), setup.control.delta_hz));
        t_total = 5.0 / std::max(a_est, 1e3);
    }
    std::vector<double> times(opts.n_samples);
    for (int k = 0; k < opts.n_samples; ++k)
        times[k] = t_total * k / (opts.n_samples - 1);

    TomographyTrace trace;
    trace.phase_rad = phase_grid_rad;
    const std::size_t np = phase_grid_rad.size();
    trace.a_zx_hz.resize(np);
    trace.a_zy_hz.resize(np);
    trace.a_ix_hz.resize(np);
    trace.a_iy_hz.resize(np);
    trace.a_zz_hz.resize(np);
    trace.a_iz_hz.resize(np);

    std::vector<std::string> failures(np);
    parallel_for(np, [&](std::size_t k) {
        Matrix h = frame.with_drive(setup, phase_grid_rad[k]);
        auto r0 = evolve(h, frame, frame.dressed00, times);
        auto r1 = evolve(h, frame, frame.dressed10, times);
        FieldFit f0 = fit_field(times, r0);
        FieldFit f1 = fit_field(times, r1);
        if (f0.rms > opts.max_fit_rms || f1.rms > opts.max_fit_rms) {
            failures[k] = "rms " + std::to_string(std::max(f0.rms, f1.rms));
            return;
        }
        trace.a_zx_hz[k] = 0.5 * (f0.field[0] - f1.field[0]);
        trace.a_ix_hz[k] = 0.5 * (f0.field[0] + f1.field[0]);
        trace.a_zy_hz[k] = 0.5 * (f0.field[1] - f1.field[1]);
        trace.a_iy_hz[k] = 0.5 * (f0.field[1] + f1.field[1]);
        trace.a_zz_hz[k] = 0.5 * (f0.field[2] - f1.field[2]);
        trace.a_iz_hz[k] = 0.5 * (f0.field[2] + f1.field[2]);
    });
    for (const auto& f : failures)
        if (!f.empty())
            throw UnresolvedCoefficientError(
                "simulate_cr_tomography: trajectory fit residual too large (" + f + ")");
    return trace;
}

double estimate_crosstalk(const TomographyTrace& trace, double j_hz,
                          double detuning_hz, double control_delta_hz) {
    if (trace.phase_rad.size() < 3)
        throw std::invalid_argument("estimate_crosstalk: need >= 3 phase points");
    Sinusoid zx = fit_sinusoid(trace.phase_rad, trace.a_zx_hz);
    Sinusoid ix = fit_sinusoid(trace.phase_rad, trace.a_ix_hz);

    // Invert |A_ZX|(Omega) for the applied drive amplitude.
    auto abs_f3 = [&](double om) {
        return std::abs(f3_zx(j_hz, om, detuning_hz, control_delta_hz));
    };
    double hi = std::abs(detuning_hz);
    double lo = 1.0;
    if (abs_f3(hi) < zx.amplitude)
        throw UnresolvedCoefficientError(
            "estimate_crosstalk: ZX amplitude outside the invertible drive range");
    double omega = optimize::brent_root(
        [&](double om) { return abs_f3(om) - zx.amplitude; }, lo, hi, 1e-3);

    double ix_pred = f4_ix(j_hz, omega, detuning_hz, control_delta_hz);
    double zx_pred = f3_zx(j_hz, omega, detuning_hz, control_delta_hz);
    // Natural relative phase of the two series when no leak is present.
    double xi = (zx_pred * ix_pred >= 0.0) ? 0.0 : M_PI;
    double phi_ct = (zx.phase - ix.phase) - xi + M_PI;
    double rp = std::abs(ix_pred);
    double rm = ix.amplitude;
    double oct2 = rp * rp + 2.0 * std::cos(phi_ct) * rm * rp + rm * rm;
    double omega_ct = std::sqrt(std::max(oct2, 0.0));
    return omega_ct / omega;
}

void DephasingInput::validate() const {
    if (!(tau_baseline_s > 0.0) || !(tau_with_tone_s > 0.0) || !(nbar > 0.0))
        throw ValidationError("DephasingInput: all values must be positive");
}

double readout_dephasing_rate(const DephasingInput& in) {
    in.validate();
    return (1.0 / in.nbar) * (1.0 / in.tau_with_tone_s - 1.0 / in.tau_baseline_s);
}

} // namespace ringbus::crosstalk
