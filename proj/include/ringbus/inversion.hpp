#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ringbus/spectrum.hpp"

namespace ringbus::inversion {

// One measured pair. Cross-Kerr values follow the reported conditional-shift
// convention of the bundled data sets: shift = -(E11 - E10 - E01 + E00)/2.
struct PairMeasurement {
    int i = 0, j = 0; // indices into MeasurementSet::qubits
    double angle_deg = 0.0;
    std::optional<double> cross_kerr_hz;
    double sigma_cross_kerr_hz = 5e3;
    std::optional<double> splitting_hz;
    double sigma_splitting_hz = 1e5;
};

struct MeasurementSet {
    std::vector<spectrum::TransmonSpec> qubits;
    std::vector<PairMeasurement> pairs;

    void validate() const;
};

struct FitResult {
    spectrum::CouplingMatrixJ j;
    std::vector<double> residuals;   // (predicted - measured) / sigma, per measurement
    double objective = 0.0;          // sum of squared residuals
    int iterations = 0;
    double final_step = 0.0;
    bool converged = true;
};

// Coupling sign by tap angle: negative strictly inside (120, 240) degrees.
double coupling_sign_for_angle(double angle_deg);

// Reported conditional-Ramsey shift for a pair, derived from the dressed
// level combination zeta = E11 - E10 - E01 + E00 as shift = -zeta/2.
double reported_cross_kerr_shift(const spectrum::DressedSpectrum& spec, int i, int j);

// Weighted least squares over |J| per measured pair (signs fixed by the
// angle mask), forward-modelled through the truncated-transmon spectrum.
FitResult fit_couplings(const MeasurementSet& meas,
                        const spectrum::TruncationPolicy& policy = {},
                        int max_iterations = 2000,
                        const std::optional<Eigen::VectorXd>& seed_abs_j_hz = {});

struct SplittingFit {
    double peak1_hz = 0.0;
    double peak2_hz = 0.0;
    double splitting_hz = 0.0;
    double width1_hz = 0.0; // Lorentzian HWHM
    double width2_hz = 0.0;
    double rms = 0.0;
};

// Two-Lorentzian-plus-offset fit of a spectroscopy trace.
SplittingFit extract_splitting(const std::vector<double>& freq_hz,
                               const std::vector<double>& response);

inline double splitting_to_j(double min_splitting_hz) {
    if (min_splitting_hz < 0.0)
        throw std::invalid_argument("splitting_to_j: splitting must be >= 0");
    return 0.5 * min_splitting_hz;
}

} // namespace ringbus::inversion
