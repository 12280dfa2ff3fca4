#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "ringbus/errors.hpp"
#include "ringbus/spectrum.hpp"

using namespace ringbus;
using namespace ringbus::spectrum;

namespace {

std::vector<TransmonSpec> table_specs() {
    return {{4.6376e9, -318e6, "Q1"},
            {4.5932e9, -306e6, "Q3"},
            {4.6566e9, -309e6, "Q9"},
            {4.7488e9, -308e6, "Q10"}};
}

CouplingMatrixJ table_j() {
    CouplingMatrixJ j = CouplingMatrixJ::zero(4);
    j.set(2, 3, 3.45e6);   // 30 deg
    j.set(0, 1, 4.57e6);   // 60 deg
    j.set(0, 3, 2.40e6);   // 90 deg
    j.set(0, 2, 0.05e6);   // 120 deg
    j.set(1, 3, -3.58e6);  // 150 deg
    j.set(1, 2, -4.74e6);  // 180 deg
    return j;
}

// Independent count of {n in [0, levels)^m : sum n <= max} by dynamic
// programming over one transmon at a time.
long composition_count(int m, int levels, int max_total) {
    std::vector<long> counts(max_total + 1, 0);
    counts[0] = 1;
    for (int k = 0; k < m; ++k) {
        std::vector<long> next(max_total + 1, 0);
        for (int t = 0; t <= max_total; ++t)
            for (int v = 0; v < levels && v + t <= max_total; ++v)
                next[t + v] += counts[t];
        counts.swap(next);
    }
    long total = 0;
    for (long c : counts) total += c;
    return total;
}

} // namespace

TEST_CASE("build_hamiltonian: single Duffing ladder") {
    Hamiltonian h = build_hamiltonian({{5e9, -0.3e9, "q"}}, CouplingMatrixJ::zero(1),
                                      TruncationPolicy{3, 3});
    REQUIRE(h.dimension() == 3);
    Eigen::MatrixXd d = h.dense();
    CHECK(d(0, 0) == 0.0);
    CHECK(d(1, 1) == doctest::Approx(5e9));
    CHECK(d(2, 2) == doctest::Approx(2 * 5e9 - 0.3e9));
    CHECK(d(0, 1) == 0.0);
}

TEST_CASE("build_hamiltonian: J = 0 eigenvalues are ladder sums") {
    auto specs = table_specs();
    Hamiltonian h = build_hamiltonian(specs, CouplingMatrixJ::zero(4),
                                      TruncationPolicy{4, 4});
    DressedSpectrum spec = diagonalize(h);
    for (std::size_t k = 0; k < h.dimension(); ++k) {
        const auto& occ = h.basis()[spec.bare_of_state[k]];
        double expect = 0.0;
        for (int q = 0; q < 4; ++q)
            expect += specs[q].omega_hz * occ[q] +
                      0.5 * specs[q].delta_hz * occ[q] * (occ[q] - 1);
        CHECK(spec.energies_hz[k] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(spec.overlap_of_state[k] == doctest::Approx(1.0));
        CHECK(!spec.ambiguous[k]);
    }
}

TEST_CASE("build_hamiltonian: basis size matches the combinatorial count") {
    Hamiltonian h = build_hamiltonian(table_specs(), table_j(), TruncationPolicy{8, 8});
    CHECK(static_cast<long>(h.dimension()) == composition_count(4, 8, 8));
    CHECK(h.dimension() == 491); // four 8-level transmons, <= 8 quanta

    // hermiticity of the stored blocks
    Eigen::MatrixXd d = h.dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_hamiltonian: state cap raises DimensionOverflow") {
    TruncationPolicy tight{8, 8, 100};
    CHECK_THROWS_AS(build_hamiltonian(table_specs(), table_j(), tight),
                    DimensionOverflowError);
}

TEST_CASE("diagonalize: resonant two-level pair splits by exactly 2J") {
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, 3e6);
    Hamiltonian h = build_hamiltonian({{4.7e9, -0.3e9, "a"}, {4.7e9, -0.3e9, "b"}}, j,
                                      TruncationPolicy{2, 2});
    DressedSpectrum spec = diagonalize(h);
    double gap = spec.energies_hz[2] - spec.energies_hz[1];
    CHECK(gap == doctest::Approx(2 * 3e6).epsilon(1e-12));
}

TEST_CASE("diagonalize: dispersive shifts match second-order perturbation") {
    // detuned pair: dressed 01/10 move by J^2/Delta at leading order
    double f1 = 4.5e9, f2 = 4.9e9, j12 = 3e6;
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, j12);
    auto spec = diagonalize(build_hamiltonian(
        {{f1, -0.30e9, "a"}, {f2, -0.31e9, "b"}}, j, TruncationPolicy{6, 6}));
    double e0 = spec.energy_of({0, 0});
    double shift_lo = (spec.energy_of({1, 0}) - e0) - f1;
    double shift_hi = (spec.energy_of({0, 1}) - e0) - f2;
    double expect = j12 * j12 / (f1 - f2);
    CHECK(shift_lo == doctest::Approx(expect).epsilon(0.10));
    CHECK(shift_hi == doctest::Approx(-expect).epsilon(0.10));
}

TEST_CASE("cross_kerr: zero coupling gives exactly zero") {
    auto spec = diagonalize(build_hamiltonian(
        {{4.6e9, -0.3e9, "a"}, {4.8e9, -0.3e9, "b"}}, CouplingMatrixJ::zero(2),
        TruncationPolicy{5, 5}));
    CHECK(cross_kerr(spec, 0, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cross_kerr: matches a brute-force dense two-transmon oracle") {
    // independent 3-level-per-transmon dense diagonalization
    double w1 = 4.6566e9, w2 = 4.7488e9, d1 = -308e6, d2 = -308e6, j = 3.45e6;
    auto n_of = [](int s, int q) { return q == 0 ? s / 3 : s % 3; };
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(9, 9);
    for (int s = 0; s < 9; ++s) {
        int n1 = n_of(s, 0), n2 = n_of(s, 1);
        h(s, s) = w1 * n1 + 0.5 * d1 * n1 * (n1 - 1) + w2 * n2 +
                  0.5 * d2 * n2 * (n2 - 1);
        if (n2 > 0 && n1 < 2) { // a1^dag a2
            int t = (n1 + 1) * 3 + (n2 - 1);
            h(t, s) += j * std::sqrt(double(n2) * (n1 + 1));
        }
        if (n1 > 0 && n2 < 2) { // a2^dag a1
            int t = (n1 - 1) * 3 + (n2 + 1);
            h(t, s) += j * std::sqrt(double(n1) * (n2 + 1));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    auto energy_of = [&](int bare) {
        int best = 0;
        double w = -1;
        for (int k = 0; k < 9; ++k) {
            double v = es.eigenvectors()(bare, k) * es.eigenvectors()(bare, k);
            if (v > w) {
                w = v;
                best = k;
            }
        }
        return es.eigenvalues()[best];
    };
    double chi_oracle = energy_of(4) - energy_of(3) - energy_of(1) + energy_of(0);

    CouplingMatrixJ jm = CouplingMatrixJ::zero(2);
    jm.set(0, 1, j);
    auto spec = diagonalize(build_hamiltonian({{w1, d1, "a"}, {w2, d2, "b"}}, jm,
                                              TruncationPolicy{3, 4}));
    CHECK(std::abs(cross_kerr(spec, 0, 1) - chi_oracle) < 100.0); // 0.1 kHz
}

TEST_CASE("cross_kerr: four-transmon forward model against the measured set") {
    auto spec = diagonalize(build_hamiltonian(table_specs(), table_j(),
                                              TruncationPolicy{8, 8}));
    struct Row {
        int i, j;
        double meas_hz; // reported conditional shift = -zeta/2
    };
    // pairs by angle: 30, 60, 90, 120, 150, 180
    std::vector<Row> rows{{2, 3, -102e3}, {0, 1, -140e3}, {0, 3, -28e3},
                          {0, 2, -5e3},   {1, 3, -104e3}, {1, 2, -146e3}};
    for (const auto& r : rows) {
        double zeta = cross_kerr(spec, r.i, r.j);
        double reported = -0.5 * zeta;
        double tol = std::max(20e3, 0.20 * std::abs(r.meas_hz));
        CHECK(std::abs(reported - r.meas_hz) < tol);
    }
    // the 120-degree pair stays below 10 kHz in magnitude
    CHECK(std::abs(cross_kerr(spec, 0, 2)) < 10e3);
}

TEST_CASE("cross_kerr: truncation convergence from (6,6) to (8,8)") {
    auto s66 = diagonalize(build_hamiltonian(table_specs(), table_j(),
                                             TruncationPolicy{6, 6}));
    auto s88 = diagonalize(build_hamiltonian(table_specs(), table_j(),
                                             TruncationPolicy{8, 8}));
    for (auto [i, j] : std::vector<std::pair<int, int>>{{2, 3}, {0, 1}, {1, 2}}) {
        double a = cross_kerr(s66, i, j);
        double b = cross_kerr(s88, i, j);
        CHECK(std::abs(a - b) < 0.01 * std::abs(b));
    }
}

TEST_CASE("cross_kerr: far-detuned weak spectator is invisible") {
    std::vector<TransmonSpec> specs{{4.6566e9, -309e6, "a"}, {4.7488e9, -308e6, "b"}};
    CouplingMatrixJ j2 = CouplingMatrixJ::zero(2);
    j2.set(0, 1, 3.45e6);
    double chi2 = cross_kerr(
        diagonalize(build_hamiltonian(specs, j2, TruncationPolicy{6, 6})), 0, 1);

    specs.push_back({6.0e9, -300e6, "spectator"});
    CouplingMatrixJ j3 = CouplingMatrixJ::zero(3);
    j3.set(0, 1, 3.45e6);
    j3.set(0, 2, 1e3);
    j3.set(1, 2, 1e3);
    double chi3 = cross_kerr(
        diagonalize(build_hamiltonian(specs, j3, TruncationPolicy{6, 6})), 0, 1);
    CHECK(std::abs(chi3 - chi2) < 1.0);
}

TEST_CASE("diagonalize: deterministic labelling across repeated runs") {
    Hamiltonian h = build_hamiltonian(table_specs(), table_j(), TruncationPolicy{6, 6});
    DressedSpectrum a = diagonalize(h);
    DressedSpectrum b = diagonalize(h);
    CHECK(a.bare_of_state == b.bare_of_state);
    CHECK(a.energies_hz == b.energies_hz);
}

TEST_CASE("avoided_crossing_scan: two-level gap is 2J at zero detuning") {
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, 2.5e6);
    std::vector<double> grid;
    for (int k = -20; k <= 20; ++k) grid.push_back(4.70e9 + k * 1e6);
    auto scan = avoided_crossing_scan({{4.6e9, -0.3e9, "a"}, {4.70e9, -0.3e9, "b"}}, j,
                                      0, 1, grid, TruncationPolicy{2, 2});
    CHECK(scan.min_gap_hz == doctest::Approx(2 * 2.5e6).epsilon(1e-9));
    CHECK(scan.freq_at_min_hz == doctest::Approx(4.70e9).epsilon(1e-12));
}

TEST_CASE("avoided_crossing_scan: symmetric for equal anharmonicities") {
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, 3e6);
    std::vector<double> grid;
    for (int k = -10; k <= 10; ++k) grid.push_back(4.70e9 + k * 2e6);
    auto scan = avoided_crossing_scan({{4.65e9, -0.30e9, "a"}, {4.70e9, -0.30e9, "b"}},
                                      j, 0, 1, grid, TruncationPolicy{5, 5});
    std::size_t n = grid.size();
    for (std::size_t k = 0; k < n / 2; ++k) {
        double gap_lo = scan.upper_branch_hz[k] - scan.lower_branch_hz[k];
        double gap_hi = scan.upper_branch_hz[n - 1 - k] - scan.lower_branch_hz[n - 1 - k];
        CHECK(gap_lo == doctest::Approx(gap_hi).epsilon(1e-4));
    }
}

TEST_CASE("avoided_crossing_scan: transmon ladders keep the gap near 2J") {
    // full transmon truncation against the two-level result
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, 3.45e6);
    std::vector<double> grid;
    for (int k = -30; k <= 30; ++k) grid.push_back(4.7488e9 + k * 0.25e6);
    auto scan = avoided_crossing_scan({{4.6566e9, -309e6, "Q9"}, {4.7488e9, -308e6, "Q10"}},
                                      j, 0, 1, grid, TruncationPolicy{8, 8});
    CHECK(scan.min_gap_hz == doctest::Approx(2 * 3.45e6).epsilon(0.05));
}

TEST_CASE("stark_map: constant columns at zero shift and weight swap") {
    CouplingMatrixJ j = CouplingMatrixJ::zero(2);
    j.set(0, 1, 3e6);
    std::vector<TransmonSpec> specs{{4.70e9, -0.3e9, "a"}, {4.74e9, -0.3e9, "b"}};

    StarkMap flat = stark_map(specs, j, 0, 1, {0.0, 0.0, 0.0}, TruncationPolicy{4, 4});
    for (std::size_t c = 1; c < flat.columns.size(); ++c)
        for (std::size_t r = 0; r < flat.columns[c].size(); ++r) {
            CHECK(flat.columns[c][r].energy_hz ==
                  doctest::Approx(flat.columns[0][r].energy_hz));
            CHECK(flat.columns[c][r].weight ==
                  doctest::Approx(flat.columns[0][r].weight));
        }

    // sweep qubit 0 through qubit 1; weights on the probed qubit swap branches
    std::vector<double> shifts;
    for (int k = -20; k <= 20; ++k) shifts.push_back(k * 5e6);
    StarkMap map = stark_map(specs, j, 0, 1, shifts, TruncationPolicy{4, 4});

    auto lower_branch_weight = [&](std::size_t c) {
        const auto& col = map.columns[c];
        std::size_t low = 0;
        for (std::size_t r = 1; r < col.size(); ++r)
            if (col[r].energy_hz < col[low].energy_hz) low = r;
        return col[low].weight;
    };
    // qubit 0 starts far below the probe: the lower branch carries little
    // probe weight, and after the crossing it carries most of it
    CHECK(lower_branch_weight(0) < 0.2);
    CHECK(lower_branch_weight(shifts.size() - 1) > 0.8);

    // the minimum two-branch separation matches the avoided-crossing scan
    double min_sep = 1e99;
    for (std::size_t c = 0; c < map.columns.size(); ++c) {
        std::vector<double> es;
        for (const auto& p : map.columns[c]) es.push_back(p.energy_hz);
        std::sort(es.begin(), es.end());
        min_sep = std::min(min_sep, es[1] - es[0]);
    }
    std::vector<double> grid;
    for (double s : shifts) grid.push_back(specs[0].omega_hz + s);
    auto scan = avoided_crossing_scan(specs, j, 0, 1, grid, TruncationPolicy{4, 4});
    CHECK(min_sep == doctest::Approx(scan.min_gap_hz).epsilon(1e-9));
}
