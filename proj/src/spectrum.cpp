#include "ringbus/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ringbus::spectrum {

namespace {

// Occupations pack into 4 bits per transmon (levels <= 16, <= 16 transmons).
std::uint64_t pack(const std::vector<int>& occ) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < occ.size(); ++k)
        key |= static_cast<std::uint64_t>(occ[k] & 0xF) << (4 * k);
    return key;
}

} // namespace

void TransmonSpec::validate() const {
    if (!(omega_hz > 0.0))
        throw ValidationError("TransmonSpec: omega must be positive");
    if (!(std::abs(delta_hz) < omega_hz))
        throw ValidationError("TransmonSpec: |delta| must be below omega");
}

void CouplingMatrixJ::validate() const {
    if (j_hz.rows() != j_hz.cols())
        throw ValidationError("CouplingMatrixJ: matrix must be square");
    for (int i = 0; i < j_hz.rows(); ++i) {
        if (j_hz(i, i) != 0.0)
            throw ValidationError("CouplingMatrixJ: diagonal must be zero");
        for (int j = i + 1; j < j_hz.cols(); ++j)
            if (j_hz(i, j) != j_hz(j, i))
                throw ValidationError("CouplingMatrixJ: matrix must be symmetric");
    }
}

void TruncationPolicy::validate() const {
    if (levels_per_transmon < 2 || levels_per_transmon > 16)
        throw ValidationError("TruncationPolicy: levels_per_transmon in [2, 16]");
    if (max_total_excitations < 2)
        throw ValidationError("TruncationPolicy: max_total_excitations >= 2");
}

Hamiltonian::Hamiltonian(std::vector<TransmonSpec> specs, CouplingMatrixJ j,
                         TruncationPolicy policy)
    : specs_(std::move(specs)), j_(std::move(j)), policy_(policy) {
    for (const auto& s : specs_) s.validate();
    j_.validate();
    policy_.validate();
    const int n = static_cast<int>(specs_.size());
    if (j_.j_hz.rows() != n)
        throw ValidationError("Hamiltonian: J dimension does not match spec count");
    if (n > 16)
        throw DimensionOverflowError("Hamiltonian: more than 16 transmons unsupported");

    // Enumerate occupations with n_k < levels and sum <= max_total, grouped
    // by total excitation number so the conserved blocks come out directly.
    blocks_.resize(policy_.max_total_excitations + 1);
    std::vector<int> occ(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int total) {
        if (pos == n) {
            long idx = static_cast<long>(basis_.size());
            if (basis_.size() >= policy_.state_cap)
                throw DimensionOverflowError(
                    "Hamiltonian: basis exceeds the configured state cap");
            basis_.push_back(occ);
            index_[pack(occ)] = idx;
            blocks_[total].push_back(idx);
            return;
        }
        int cap = std::min(policy_.levels_per_transmon - 1,
                           policy_.max_total_excitations - total);
        for (int v = 0; v <= cap; ++v) {
            occ[pos] = v;
            rec(pos + 1, total + v);
        }
        occ[pos] = 0;
    };
    rec(0, 0);

    block_h_.resize(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& states = blocks_[b];
        const int dim = static_cast<int>(states.size());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (int col = 0; col < dim; ++col) {
            const std::vector<int>& s = basis_[states[col]];
            double diag = 0.0;
            for (int k = 0; k < n; ++k)
                diag += specs_[k].omega_hz * s[k] +
                        0.5 * specs_[k].delta_hz * s[k] * (s[k] - 1);
            h(col, col) = diag;
            // exchange: J_kl a_k^dag a_l moves one quantum from l to k
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    if (k == l || j_.j_hz(k, l) == 0.0) continue;
                    if (s[l] < 1 || s[k] + 1 >= policy_.levels_per_transmon) continue;
                    std::vector<int> t = s;
                    t[l] -= 1;
                    t[k] += 1;
                    auto it = index_.find(pack(t));
                    if (it == index_.end()) continue;
                    // position of t inside this block
                    long row_global = it->second;
                    auto pos = std::lower_bound(states.begin(), states.end(), row_global);
                    int row = static_cast<int>(pos - states.begin());
                    h(row, col) += j_.j_hz(k, l) *
                                   std::sqrt(static_cast<double>(s[l]) * (s[k] + 1));
                }
            }
        }
        block_h_[b] = 0.5 * (h + h.transpose()); // hermitian by construction
    }
}

long Hamiltonian::index_of(const std::vector<int>& occupation) const {
    auto it = index_.find(pack(occupation));
    return it == index_.end() ? -1 : it->second;
}

Eigen::MatrixXd Hamiltonian::dense() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dimension(), dimension());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& states = blocks_[b];
        for (std::size_t r = 0; r < states.size(); ++r)
            for (std::size_t c = 0; c < states.size(); ++c)
                h(states[r], states[c]) = block_h_[b](r, c);
    }
    return h;
}

Hamiltonian build_hamiltonian(const std::vector<TransmonSpec>& specs,
                              const CouplingMatrixJ& j,
                              const TruncationPolicy& policy) {
    return Hamiltonian(specs, j, policy);
}

long DressedSpectrum::state_for(const std::vector<int>& occupation) const {
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis[k] == occupation) return state_of_bare[k];
    return -1;
}

double DressedSpectrum::energy_of(const std::vector<int>& occupation) const {
    long s = state_for(occupation);
    if (s < 0)
        throw ValidationError("DressedSpectrum: occupation outside the basis");
    return energies_hz[s];
}

bool DressedSpectrum::is_ambiguous(const std::vector<int>& occupation) const {
    long s = state_for(occupation);
    if (s < 0)
        throw ValidationError("DressedSpectrum: occupation outside the basis");
    return ambiguous[s];
}

DressedSpectrum diagonalize(const Hamiltonian& h) {
    struct Entry {
        double energy;
        long bare;     // assigned basis index
        double overlap;
    };
    std::vector<Entry> entries;
    entries.reserve(h.dimension());

    for (int b = 0; b < h.block_count(); ++b) {
        const auto& states = h.block_states(b);
        const int dim = static_cast<int>(states.size());
        if (dim == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.block_matrix(b));
        const Eigen::MatrixXd& v = solver.eigenvectors();
        const Eigen::VectorXd& e = solver.eigenvalues();

        // Greedy maximum-overlap assignment inside the block.
        struct Cand {
            double w;
            int eig;
            int bare;
        };
        std::vector<Cand> cands;
        cands.reserve(dim * dim);
        for (int eig = 0; eig < dim; ++eig)
            for (int bare = 0; bare < dim; ++bare) {
                double w = v(bare, eig) * v(bare, eig);
                cands.push_back({w, eig, bare});
            }
        std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& c) {
            if (a.w != c.w) return a.w > c.w;
            if (e[a.eig] != e[c.eig]) return e[a.eig] < e[c.eig];
            return a.bare < c.bare;
        });
        std::vector<int> eig_assigned(dim, -1), bare_taken(dim, 0);
        int assigned = 0;
        for (const Cand& c : cands) {
            if (assigned == dim) break;
            if (eig_assigned[c.eig] >= 0 || bare_taken[c.bare]) continue;
            eig_assigned[c.eig] = c.bare;
            bare_taken[c.bare] = 1;
            ++assigned;
        }
        for (int eig = 0; eig < dim; ++eig) {
            int bare = eig_assigned[eig];
            entries.push_back({e[eig], states[bare], v(bare, eig) * v(bare, eig)});
        }
    }

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.bare < b.bare;
    });

    DressedSpectrum out;
    out.basis = h.basis();
    out.energies_hz.reserve(entries.size());
    out.state_of_bare.assign(h.dimension(), -1);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        out.energies_hz.push_back(entries[k].energy);
        out.bare_of_state.push_back(entries[k].bare);
        out.overlap_of_state.push_back(entries[k].overlap);
        out.ambiguous.push_back(entries[k].overlap < 0.5);
        out.state_of_bare[entries[k].bare] = static_cast<long>(k);
    }
    return out;
}

double cross_kerr(const DressedSpectrum& spec, int i, int j) {
    if (spec.basis.empty())
        throw ValidationError("cross_kerr: empty spectrum");
    const int n = static_cast<int>(spec.basis[0].size());
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw std::invalid_argument("cross_kerr: bad qubit indices");
    std::vector<int> ground(n, 0), si(n, 0), sj(n, 0), sij(n, 0);
    si[i] = 1;
    sj[j] = 1;
    sij[i] = 1;
    sij[j] = 1;
    for (const auto& occ : {ground, si, sj, sij})
        if (spec.is_ambiguous(occ))
            throw AmbiguousLabelError(
                "cross_kerr: a required dressed state has ambiguous labelling");
    return spec.energy_of(sij) - spec.energy_of(si) - spec.energy_of(sj) +
           spec.energy_of(ground);
}

AvoidedCrossingScan avoided_crossing_scan(const std::vector<TransmonSpec>& specs,
                                          const CouplingMatrixJ& j,
                                          int sweep_qubit, int partner_qubit,
                                          const std::vector<double>& sweep_freq_hz,
                                          const TruncationPolicy& policy) {
    if (sweep_qubit == partner_qubit)
        throw std::invalid_argument("avoided_crossing_scan: distinct qubits required");
    const int n = static_cast<int>(specs.size());
    std::vector<int> ground(n, 0), s_sweep(n, 0), s_partner(n, 0);
    s_sweep[sweep_qubit] = 1;
    s_partner[partner_qubit] = 1;

    AvoidedCrossingScan out;
    out.sweep_freq_hz = sweep_freq_hz;
    out.min_gap_hz = std::numeric_limits<double>::infinity();
    for (double f : sweep_freq_hz) {
        std::vector<TransmonSpec> s = specs;
        s[sweep_qubit].omega_hz = f;
        DressedSpectrum spec = diagonalize(build_hamiltonian(s, j, policy));
        double e0 = spec.energy_of(ground);
        double ea = spec.energy_of(s_sweep) - e0;
        double eb = spec.energy_of(s_partner) - e0;
        double lo = std::min(ea, eb), hi = std::max(ea, eb);
        out.lower_branch_hz.push_back(lo);
        out.upper_branch_hz.push_back(hi);
        if (hi - lo < out.min_gap_hz) {
            out.min_gap_hz = hi - lo;
            out.freq_at_min_hz = f;
        }
    }
    return out;
}

StarkMap stark_map(const std::vector<TransmonSpec>& specs,
                   const CouplingMatrixJ& j, int shifted_qubit, int probe_qubit,
                   const std::vector<double>& shift_grid_hz,
                   const TruncationPolicy& policy) {
    const int n = static_cast<int>(specs.size());
    if (shifted_qubit < 0 || shifted_qubit >= n || probe_qubit < 0 || probe_qubit >= n)
        throw std::invalid_argument("stark_map: qubit index out of range");

    StarkMap out;
    out.shift_hz = shift_grid_hz;
    for (double shift : shift_grid_hz) {
        std::vector<TransmonSpec> s = specs;
        s[shifted_qubit].omega_hz += shift;
        Hamiltonian h = build_hamiltonian(s, j, policy);

        // Single-excitation block spectroscopy with weights on the probe.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.block_matrix(1));
        const auto& states = h.block_states(1);
        std::vector<int> probe_occ(n, 0);
        probe_occ[probe_qubit] = 1;
        long probe_idx = h.index_of(probe_occ);
        int probe_row = -1;
        for (std::size_t r = 0; r < states.size(); ++r)
            if (states[r] == probe_idx) probe_row = static_cast<int>(r);

        std::vector<StarkMapPoint> col;
        double e0 = h.block_matrix(0)(0, 0);
        for (int eig = 0; eig < solver.eigenvalues().size(); ++eig) {
            double w = solver.eigenvectors()(probe_row, eig);
            col.push_back({solver.eigenvalues()[eig] - e0, w * w});
        }
        out.columns.push_back(std::move(col));
    }
    return out;
}

} // namespace ringbus::spectrum
