#include "ringbus/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ringbus/optimize.hpp"

namespace ringbus::inversion {

namespace {

using spectrum::CouplingMatrixJ;
using spectrum::TransmonSpec;
using spectrum::TruncationPolicy;

// Predicted minimum vacuum Rabi splitting for a pair: sweep the bare
// frequency of qubit i through the partner and minimize the dressed gap.
double predicted_min_splitting(const std::vector<TransmonSpec>& specs,
                               const CouplingMatrixJ& j, int qi, int qj,
                               const TruncationPolicy& policy) {
    const int n = static_cast<int>(specs.size());
    std::vector<int> ground(n, 0), si(n, 0), sj(n, 0);
    si[qi] = 1;
    sj[qj] = 1;
    double j_abs = std::max(std::abs(j.j_hz(qi, qj)), 1e4);
    auto gap_at = [&](double f) {
        std::vector<TransmonSpec> s = specs;
        s[qi].omega_hz = f;
        auto spec = spectrum::diagonalize(spectrum::build_hamiltonian(s, j, policy));
        double e0 = spec.energy_of(ground);
        return std::abs((spec.energy_of(si) - e0) - (spec.energy_of(sj) - e0));
    };
    double center = specs[qj].omega_hz;
    double span = 6.0 * j_abs;
    double fmin = optimize::golden_min(gap_at, center - span, center + span,
                                       std::max(j_abs * 1e-4, 10.0));
    return gap_at(fmin);
}

} // namespace

void MeasurementSet::validate() const {
    const int n = static_cast<int>(qubits.size());
    for (const auto& q : qubits) q.validate();
    std::set<std::pair<int, int>> seen;
    for (const auto& p : pairs) {
        if (p.i < 0 || p.j < 0 || p.i >= n || p.j >= n || p.i == p.j)
            throw ValidationError("MeasurementSet: pair references unknown or equal qubits");
        if (!p.cross_kerr_hz && !p.splitting_hz)
            throw ValidationError("MeasurementSet: pair carries no measurement");
        if (!(p.sigma_cross_kerr_hz > 0.0) || !(p.sigma_splitting_hz > 0.0))
            throw ValidationError("MeasurementSet: uncertainties must be positive");
    }
}

double coupling_sign_for_angle(double angle_deg) {
    double a = std::fmod(angle_deg, 360.0);
    if (a < 0.0) a += 360.0;
    return (a > 120.0 && a < 240.0) ? -1.0 : 1.0;
}

double reported_cross_kerr_shift(const spectrum::DressedSpectrum& spec, int i, int j) {
    return -0.5 * spectrum::cross_kerr(spec, i, j);
}

FitResult fit_couplings(const MeasurementSet& meas, const TruncationPolicy& policy,
                        int max_iterations,
                        const std::optional<Eigen::VectorXd>& seed_abs_j_hz) {
    meas.validate();
    const int n = static_cast<int>(meas.qubits.size());

    // Unknowns: one |J| per measured pair.
    std::vector<std::pair<int, int>> unknown_pairs;
    std::vector<double> signs;
    for (const auto& p : meas.pairs) {
        auto key = std::minmax(p.i, p.j);
        std::pair<int, int> pr{key.first, key.second};
        if (std::find(unknown_pairs.begin(), unknown_pairs.end(), pr) ==
            unknown_pairs.end()) {
            unknown_pairs.push_back(pr);
            signs.push_back(coupling_sign_for_angle(p.angle_deg));
        }
    }
    int n_meas = 0;
    for (const auto& p : meas.pairs)
        n_meas += (p.cross_kerr_hz ? 1 : 0) + (p.splitting_hz ? 1 : 0);
    if (n_meas < static_cast<int>(unknown_pairs.size()))
        throw UnderdeterminedSystemError(
            "fit_couplings: fewer measurements than unknown couplings");

    const int np = static_cast<int>(unknown_pairs.size());
    auto j_from = [&](const Eigen::VectorXd& x) {
        CouplingMatrixJ j = CouplingMatrixJ::zero(n);
        for (int k = 0; k < np; ++k)
            j.set(unknown_pairs[k].first, unknown_pairs[k].second,
                  signs[k] * std::abs(x[k]) * 1e6);
        return j;
    };

    auto residuals_of = [&](const Eigen::VectorXd& x) {
        CouplingMatrixJ j = j_from(x);
        auto spec = spectrum::diagonalize(
            spectrum::build_hamiltonian(meas.qubits, j, policy));
        std::vector<double> res;
        for (const auto& p : meas.pairs) {
            if (p.cross_kerr_hz) {
                double pred = reported_cross_kerr_shift(spec, p.i, p.j);
                res.push_back((pred - *p.cross_kerr_hz) / p.sigma_cross_kerr_hz);
            }
            if (p.splitting_hz) {
                double pred =
                    predicted_min_splitting(meas.qubits, j, p.i, p.j, policy);
                res.push_back((pred - *p.splitting_hz) / p.sigma_splitting_hz);
            }
        }
        return res;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        double s = 0.0;
        for (double r : residuals_of(x)) s += r * r;
        return s;
    };

    // Seed from the interference-theory shape unless the caller supplied one:
    // |J| ~ 4.74 MHz * |sin(1.5 theta)| for the 30-degree-slot geometry.
    Eigen::VectorXd x0(np);
    for (int k = 0; k < np; ++k) {
        double seeded = 0.0;
        if (seed_abs_j_hz && seed_abs_j_hz->size() == np) {
            seeded = std::abs((*seed_abs_j_hz)[k]) * 1e-6;
        } else {
            double theta = 0.0;
            for (const auto& p : meas.pairs) {
                auto key = std::minmax(p.i, p.j);
                if (std::pair<int, int>{key.first, key.second} == unknown_pairs[k]) {
                    theta = p.angle_deg * M_PI / 180.0;
                    break;
                }
            }
            seeded = 4.74 * std::abs(std::sin(1.5 * theta));
            if (seeded < 0.05) seeded = 0.05;
        }
        x0[k] = seeded;
    }
    double f0 = objective(x0);

    // One-shot leading-order refinement: the pair-only dressed-level
    // combination is c_k |J_k|^2 with c_k = 2/(E11-E20) + 2/(E11-E02) from
    // the bare ladders, so each measured shift inverts directly. This lands
    // in the physical solution's basin before the simplex polish (the joint
    // equations can have distinct exact solutions for large couplings).
    Eigen::VectorXd x = x0;
    for (int k = 0; k < np; ++k) {
        const PairMeasurement* pm = nullptr;
        for (const auto& p : meas.pairs) {
            auto key = std::minmax(p.i, p.j);
            if (std::pair<int, int>{key.first, key.second} == unknown_pairs[k] &&
                p.cross_kerr_hz)
                pm = &p;
        }
        if (!pm) continue;
        const auto& qi = meas.qubits[pm->i];
        const auto& qj = meas.qubits[pm->j];
        double gap_20 = qj.omega_hz - qi.omega_hz - qi.delta_hz; // E11 - E20
        double gap_02 = qi.omega_hz - qj.omega_hz - qj.delta_hz; // E11 - E02
        if (gap_20 == 0.0 || gap_02 == 0.0) continue;
        double c = 2.0 / gap_20 + 2.0 / gap_02;
        double zeta = -2.0 * (*pm->cross_kerr_hz);
        if (c != 0.0 && zeta / c > 0.0) x[k] = std::sqrt(zeta / c) * 1e-6;
    }
    if (objective(x) > f0) x = x0; // keep the better start

    // The joint shift equations can have several exact solutions for large
    // couplings; a vanishing proximal term anchors the descent to the
    // leading-order branch without biasing the optimum measurably.
    const Eigen::VectorXd x_anchor = x;
    const double anchor_weight = 1e-8; // (MHz units)^-2
    auto penalized = [&](const Eigen::VectorXd& xv) {
        return objective(xv) + anchor_weight * (xv - x_anchor).squaredNorm();
    };

    optimize::NelderMeadOptions opts;
    opts.max_iterations = max_iterations;
    opts.ftol = 1e-14;
    opts.fstop = 1e-9;
    opts.max_restarts = 8;
    opts.initial_step = 0.05;
    auto nm = optimize::nelder_mead(penalized, x, opts);
    nm.fmin = objective(nm.x);

    FitResult out;
    out.j = j_from(nm.x);
    out.residuals = residuals_of(nm.x);
    out.objective = nm.fmin;
    out.iterations = nm.iterations;
    out.final_step = nm.final_step;
    // The optimum must not sit above the theory-seeded start.
    out.converged = nm.converged && nm.fmin <= f0 + 1e-12;
    return out;
}

namespace {

struct Lorentzian7 {
    // y = o + a1 / (1 + ((f - c1)/w1)^2) + a2 / (1 + ((f - c2)/w2)^2)
    static double eval(const Eigen::VectorXd& p, double f) {
        double t1 = (f - p[1]) / p[2];
        double t2 = (f - p[4]) / p[5];
        return p[6] + p[0] / (1.0 + t1 * t1) + p[3] / (1.0 + t2 * t2);
    }
};

} // namespace

SplittingFit extract_splitting(const std::vector<double>& freq_hz,
                               const std::vector<double>& response) {
    const std::size_t n = freq_hz.size();
    if (n < 20 || response.size() != n)
        throw std::invalid_argument("extract_splitting: need >= 20 aligned samples");
    for (double v : response)
        if (v < 0.0)
            throw std::invalid_argument("extract_splitting: response must be non-negative");

    double fspan = freq_hz.back() - freq_hz.front();
    if (!(fspan > 0.0))
        throw std::invalid_argument("extract_splitting: frequency axis must increase");

    // Initial guess: the two highest interior local maxima.
    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (response[k] >= response[k - 1] && response[k] > response[k + 1])
            peaks.push_back(k);
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return response[a] > response[b]; });

    double base = *std::min_element(response.begin(), response.end());
    std::size_t p1 = peaks.empty()
                         ? static_cast<std::size_t>(
                               std::max_element(response.begin(), response.end()) -
                               response.begin())
                         : peaks[0];
    std::size_t p2;
    if (peaks.size() >= 2) {
        p2 = peaks[1];
    } else {
        // fall back to the best sample at least a tenth of the span away
        p2 = p1;
        double best = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(freq_hz[k] - freq_hz[p1]) < 0.1 * fspan) continue;
            if (response[k] > best) {
                best = response[k];
                p2 = k;
            }
        }
    }

    Eigen::VectorXd p(7);
    p[0] = response[p1] - base;
    p[1] = freq_hz[p1];
    p[2] = 0.05 * fspan;
    p[3] = response[p2] - base;
    p[4] = freq_hz[p2];
    p[5] = 0.05 * fspan;
    p[6] = base;

    auto resid = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(n);
        for (std::size_t k = 0; k < n; ++k)
            r[k] = Lorentzian7::eval(q, freq_hz[k]) - response[k];
        return r;
    };
    auto lm = optimize::levenberg_marquardt(resid, p, 400, 1e-12);

    double c1 = lm.x[1], c2 = lm.x[4];
    double w1 = std::abs(lm.x[2]), w2 = std::abs(lm.x[5]);
    double a1 = lm.x[0], a2 = lm.x[3];
    bool sane = std::isfinite(c1) && std::isfinite(c2) &&
                c1 > freq_hz.front() - fspan && c1 < freq_hz.back() + fspan &&
                c2 > freq_hz.front() - fspan && c2 < freq_hz.back() + fspan;
    if (!lm.converged || !sane)
        throw FitDivergedError("extract_splitting: two-Lorentzian fit diverged");
    if (std::abs(c1 - c2) < 0.5 * (w1 + w2))
        throw SinglePeakError(
            "extract_splitting: peaks are not resolved (center distance below half a linewidth)");
    // collapse: one component carries essentially no weight, or the fitted
    // line has no dip between the two centers
    if (std::min(std::abs(a1), std::abs(a2)) < 0.05 * std::max(std::abs(a1), std::abs(a2)))
        throw SinglePeakError("extract_splitting: second peak amplitude collapsed");
    double mid = Lorentzian7::eval(lm.x, 0.5 * (c1 + c2));
    double at1 = Lorentzian7::eval(lm.x, c1);
    double at2 = Lorentzian7::eval(lm.x, c2);
    if (mid > 0.98 * std::min(at1, at2))
        throw SinglePeakError("extract_splitting: fitted line has no dip between peaks");

    SplittingFit out;
    out.peak1_hz = std::min(c1, c2);
    out.peak2_hz = std::max(c1, c2);
    out.splitting_hz = out.peak2_hz - out.peak1_hz;
    out.width1_hz = c1 <= c2 ? w1 : w2;
    out.width2_hz = c1 <= c2 ? w2 : w1;
    out.rms = lm.rms;
    return out;
}

} // namespace ringbus::inversion
