#pragma once

#include <utility>
#include <vector>

#include "ringbus/spectrum.hpp"

namespace ringbus::crosstalk {

// Cross-resonance drive setup: drive the control at the target's frequency;
// a fraction m of the drive leaks onto the target with a fixed phase offset.
struct CRSetup {
    spectrum::TransmonSpec control;
    spectrum::TransmonSpec target;
    double j_hz = 0.0;
    double drive_amp_hz = 0.0;       // Omega
    double drive_phase_rad = 0.0;    // phi_0
    double crosstalk_m = 0.0;        // leaked fraction of Omega
    double crosstalk_phase_rad = 0.0;// phase offset of the leaked tone

    double detuning_hz() const { return control.omega_hz - target.omega_hz; }
    void validate() const;
};

// Closed-form ZX and IX amplitudes including the cubic drive corrections,
// phi_0 = 0 convention. Throws ResonantDenominatorError naming the factor
// that vanishes.
std::pair<double, double> cr_amplitudes(const CRSetup& setup);

struct TomographyTrace {
    std::vector<double> phase_rad;
    std::vector<double> a_zx_hz, a_zy_hz, a_ix_hz, a_iy_hz, a_zz_hz, a_iz_hz;
};

struct TomographyOptions {
    double evolution_time_s = 0.0; // 0: automatic, >= 5 / |A_ZX estimate|
    int n_levels = 3;
    int n_samples = 160;
    double max_fit_rms = 0.05;     // UnresolvedCoefficientError above this
};

// Time-evolve the driven pair in the frame rotating at the dressed target
// frequency (RWA drive), reconstruct the target Bloch trajectories
// conditioned on the control state, and fit the six interaction
// coefficients for every drive phase on the grid.
TomographyTrace simulate_cr_tomography(const CRSetup& setup,
                                       const std::vector<double>& phase_grid_rad,
                                       const TomographyOptions& opts = {});

// Cross-talk fraction m from a tomography trace plus the known couplings:
// infer Omega from the ZX series, predict the leak-free IX from the closed
// form, and extract the leaked-drive magnitude by phasor subtraction. The
// phase convention is fixed so that matching predicted and measured IX with
// phi_CT = pi yields m = 0.
double estimate_crosstalk(const TomographyTrace& trace, double j_hz,
                          double detuning_hz, double control_delta_hz);

struct DephasingInput {
    double tau_baseline_s = 0.0;   // echo time without the extra tone
    double tau_with_tone_s = 0.0;  // echo time with the tone on
    double nbar = 0.0;             // calibrated photon number of the tone

    void validate() const;
};

// Excess dephasing rate per photon: (1/nbar)(1/tau_tone - 1/tau_baseline).
// May be negative for noisy inputs; returned as-is.
double readout_dephasing_rate(const DephasingInput& in);

} // namespace ringbus::crosstalk
