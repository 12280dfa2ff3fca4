#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ringbus/errors.hpp"

namespace ringbus::spectrum {

struct TransmonSpec {
    double omega_hz = 0.0;  // lowest transition
    double delta_hz = 0.0;  // anharmonicity, negative for transmons
    std::string label;

    void validate() const;
};

// Symmetric exchange-coupling matrix in Hz with zero diagonal.
struct CouplingMatrixJ {
    Eigen::MatrixXd j_hz;

    static CouplingMatrixJ zero(int n) {
        return CouplingMatrixJ{Eigen::MatrixXd::Zero(n, n)};
    }
    void set(int i, int j, double value) {
        j_hz(i, j) = value;
        j_hz(j, i) = value;
    }
    void validate() const;
};

struct TruncationPolicy {
    int levels_per_transmon = 8;
    int max_total_excitations = 8;
    std::size_t state_cap = 200000;

    void validate() const;
};

// Occupation-basis Hamiltonian. Total excitation number is conserved, so
// the matrix is stored as one dense block per excitation number.
class Hamiltonian {
public:
    Hamiltonian(std::vector<TransmonSpec> specs, CouplingMatrixJ j,
                TruncationPolicy policy);

    std::size_t dimension() const { return basis_.size(); }
    int n_transmons() const { return static_cast<int>(specs_.size()); }
    const std::vector<std::vector<int>>& basis() const { return basis_; }
    const TruncationPolicy& policy() const { return policy_; }
    const std::vector<TransmonSpec>& specs() const { return specs_; }

    // Index of an occupation state, -1 when outside the truncated basis.
    long index_of(const std::vector<int>& occupation) const;

    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<long>& block_states(int n_exc) const { return blocks_[n_exc]; }
    const Eigen::MatrixXd& block_matrix(int n_exc) const { return block_h_[n_exc]; }

    // Dense matrix over the full basis (test/diagnostic use).
    Eigen::MatrixXd dense() const;

private:
    std::vector<TransmonSpec> specs_;
    CouplingMatrixJ j_;
    TruncationPolicy policy_;
    std::vector<std::vector<int>> basis_;
    std::unordered_map<std::uint64_t, long> index_;
    std::vector<std::vector<long>> blocks_;   // basis indices per excitation number
    std::vector<Eigen::MatrixXd> block_h_;
};

Hamiltonian build_hamiltonian(const std::vector<TransmonSpec>& specs,
                              const CouplingMatrixJ& j,
                              const TruncationPolicy& policy = {});

struct DressedSpectrum {
    std::vector<double> energies_hz;     // ascending
    std::vector<long> bare_of_state;     // eigenstate -> basis index
    std::vector<double> overlap_of_state;
    std::vector<bool> ambiguous;
    std::vector<long> state_of_bare;     // basis index -> eigenstate

    // Basis bookkeeping copied from the Hamiltonian for label lookups.
    std::vector<std::vector<int>> basis;

    long state_for(const std::vector<int>& occupation) const;
    double energy_of(const std::vector<int>& occupation) const;
    bool is_ambiguous(const std::vector<int>& occupation) const;
};

// Block-wise eigensolve with maximum-overlap labelling; conflicts resolved
// greedily by descending overlap, ties by ascending energy.
DressedSpectrum diagonalize(const Hamiltonian& h);

// chi_ij = E(1_i 1_j) - E(1_i) - E(1_j) + E(0), spectators in ground.
double cross_kerr(const DressedSpectrum& spec, int i, int j);

struct AvoidedCrossingScan {
    std::vector<double> sweep_freq_hz;
    std::vector<double> lower_branch_hz; // energy above ground
    std::vector<double> upper_branch_hz;
    double min_gap_hz = 0.0;
    double freq_at_min_hz = 0.0;
};

// Sweep the bare frequency of one qubit of a pair and follow the two dressed
// single-excitation levels connected to the pair.
AvoidedCrossingScan avoided_crossing_scan(const std::vector<TransmonSpec>& specs,
                                          const CouplingMatrixJ& j,
                                          int sweep_qubit, int partner_qubit,
                                          const std::vector<double>& sweep_freq_hz,
                                          const TruncationPolicy& policy = {});

struct StarkMapPoint {
    double energy_hz = 0.0; // above ground
    double weight = 0.0;    // overlap with the probed qubit's bare excitation
};

struct StarkMap {
    std::vector<double> shift_hz;
    std::vector<std::vector<StarkMapPoint>> columns; // one per shift
};

// Spectral-weight map vs a frequency shift applied to one qubit, emulating a
// spectroscopy scan on the probed qubit.
StarkMap stark_map(const std::vector<TransmonSpec>& specs,
                   const CouplingMatrixJ& j, int shifted_qubit, int probe_qubit,
                   const std::vector<double>& shift_grid_hz,
                   const TruncationPolicy& policy = {});

} // namespace ringbus::spectrum
