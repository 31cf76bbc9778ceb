// test_spin_model.cpp — effective couplings, SSH fit, finite spectra and Wilson loops

#include "bilayer/errors.hpp"
#include "bilayer/spin_model.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace bilayer;
using std::numbers::pi;

namespace {

BilayerLattice lattice(double G) {
    BilayerLattice lat;
    lat.eta = -1.0;
    lat.G = G;
    return lat;
}

struct Fitted {
    SpinArray array;
    SpinCouplingMatrix couplings;
    SSHFit fit;
};

Fitted fitted(const SSHGeometry& geo) {
    Fitted f;
    f.array = build_ssh_array(geo);
    f.couplings = effective_couplings(f.array, lattice(4.0), 0.1, 256);
    f.fit = fit_ssh_params(f.couplings, f.array);
    return f;
}

const Fitted& topological() {
    static const Fitted f = fitted(ssh_topological_geometry());
    return f;
}

const Fitted& trivial() {
    static const Fitted f = fitted(ssh_trivial_geometry());
    return f;
}

} // namespace

TEST_SUITE("spin_model") {

TEST_CASE("couplings vanish between spins on the same chiral sublattice") {
    const SpinArray arr{{{1, 0, 0}, {1, 1, 1}, {1, 1, 0}, {2, 0, 0}, {2, 3, 0}, {1, 2, 0}}, "custom"};
    const SpinCouplingMatrix c = effective_couplings(arr, lattice(0.25), 0.1, 128);
    for (std::size_t a = 0; a < arr.sites.size(); ++a) {
        CHECK(c.g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) == 0.0);
        for (std::size_t b = a + 1; b < arr.sites.size(); ++b) {
            const auto& s = arr.sites[a];
            const auto& t = arr.sites[b];
            const double v = c.g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            CHECK(v == c.g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
            if (chiral_sign(s.layer, s.nx, s.ny) == chiral_sign(t.layer, t.nx, t.ny)) {
                CHECK(v == 0.0);
            } else {
                CHECK(std::abs(v) > 1e-8);
            }
        }
    }
    CHECK(c.reference_energy == 0.0);
}

TEST_CASE("cross-layer table: on-site coupling is negative and matches the matrix") {
    const auto table = cross_layer_table(lattice(0.25), 0.1, 128, 3);
    CHECK(table.size() == 49u);
    const SpinArray arr{{{1, 0, 0}, {2, 0, 0}, {2, 2, 1}}, "custom"};
    const SpinCouplingMatrix c = effective_couplings(arr, lattice(0.25), 0.1, 128);
    for (const auto& e : table) {
        if (e.nx == 0 && e.ny == 0) {
            CHECK(e.value < 0.0);
            CHECK(e.value == doctest::Approx(c.g(0, 1)).epsilon(1e-12));
        }
        if (e.nx == 2 && e.ny == 1) CHECK(e.value == doctest::Approx(c.g(0, 2)).epsilon(1e-12));
    }
}

TEST_CASE("bloch f_S worked examples") {
    const KPoint k{0.7, -1.3};
    CHECK(std::abs(bloch_f_S({{0, 0, 2.5}}, k) - cd(2.5)) < 1e-15);
    CHECK(std::abs(bloch_f_S({{1, 0, 1.0}}, k) - std::exp(cd(0.0, -0.7))) < 1e-15);
    CHECK(std::abs(bloch_f_S({{1, 0, 1.0}, {-1, 0, 1.0}}, k) - cd(2.0 * std::cos(0.7))) < 1e-15);
    const Eigen::Matrix2cd h = bipartite_bloch({{0, 1, 0.5}}, k);
    CHECK(h(0, 0) == cd(0.0));
    CHECK(std::abs(h(0, 1) - std::conj(h(1, 0))) < 1e-16);
}

TEST_CASE("SSH Bloch matrix: atomic limit spectrum and symmetries") {
    const Eigen::Matrix4cd h = ssh_bloch({1.0, 0.0, 0.0, 0.0}, {0.3, 1.1});
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    const Eigen::Vector4d expect(-2.0, 0.0, 0.0, 2.0);
    CHECK((es.eigenvalues() - expect).norm() < 1e-14);
    const SSHParams p{0.3, -1.1, 0.2, 0.05};
    Eigen::Matrix4cd S = Eigen::Matrix4cd::Identity();
    S(2, 2) = S(3, 3) = -1.0;
    for (int i = 0; i < 8; ++i) {
        const KPoint k{-pi + 0.7 * i, 0.4 * i - 1.0};
        const Eigen::Matrix4cd m = ssh_bloch(p, k);
        CHECK((m - m.adjoint()).norm() < 1e-15);
        CHECK((S * m + m * S).norm() < 1e-15);
        // swapping kx and ky together with the orbital labels leaves the spectrum unchanged
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> a(m), b(ssh_bloch(p, {k.ky, k.kx}));
        CHECK((a.eigenvalues() - b.eigenvalues()).norm() < 1e-13);
    }
    CHECK(std::abs(ssh_f0(p, 0.0) - cd(p.t1 + p.t2 + p.t3 + p.t4)) < 1e-15);
}

TEST_CASE("SSH fit: bond orderings of the three placements") {
    const SSHFit& topo = topological().fit;
    CHECK(std::abs(topo.params.t2) > 10.0 * std::abs(topo.params.t1));
    CHECK(std::abs(topo.params.t1) > std::abs(topo.params.t4));
    CHECK(topo.params.t2 == doctest::Approx(7.35e-5).epsilon(0.01));
    const SSHFit& triv = trivial().fit;
    CHECK(std::abs(triv.params.t1) > 10.0 * std::abs(triv.params.t2));
    for (const auto& f : {topo, triv}) {
        for (int c : f.bond_counts) CHECK(c > 0);
        CHECK(f.spread[0] < 1e-6);
        CHECK(f.spread[1] < 1e-6);
    }
    const Fitted uni = fitted(ssh_uniform_geometry());
    CHECK(std::abs(uni.fit.params.t1 - uni.fit.params.t2) < 1e-12 * std::abs(uni.fit.params.t1));
    CHECK(std::any_of(uni.fit.warnings.begin(), uni.fit.warnings.end(),
                      [](const std::string& w) { return w.rfind("gapless", 0) == 0; }));
}

TEST_CASE("finite spectrum: corner modes only in the topological placement") {
    const SpectrumResult topo = finite_spectrum(topological().array, topological().couplings);
    const SpectrumResult triv = finite_spectrum(trivial().array, trivial().couplings);
    CHECK(topo.corner_count == 4);
    CHECK(triv.corner_count == 0);
    CHECK(topo.edge_count > 0);
    for (const auto* r : {&topo, &triv}) {
        const Eigen::Index n = r->energies.size();
        CHECK(n == 144);
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(std::abs(r->energies[i] + r->energies[n - 1 - i]) < 1e-12 * r->energies.cwiseAbs().maxCoeff());
        }
        CHECK((r->vectors.transpose() * r->vectors - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
    }
}

TEST_CASE("Wilson-loop polarization") {
    const Polarization topo = wilson_polarization(topological().fit.params, 128);
    CHECK(topo.Px == 0.5);
    CHECK(topo.Py == 0.5);
    CHECK(topo.quantized);
    const Polarization triv = wilson_polarization(trivial().fit.params, 128);
    CHECK(triv.Px == 0.0);
    CHECK(triv.Py == 0.0);
    const Polarization atomic = wilson_polarization({1.0, 0.0, 0.0, 0.0}, 64);
    CHECK(atomic.Px == 0.0);
    CHECK(atomic.Py == 0.0);
    const Polarization inter = wilson_polarization({0.0, 1.0, 0.0, 0.0}, 64);
    CHECK(inter.Px == 0.5);
    CHECK(inter.Py == 0.5);
    const Polarization coarse = wilson_polarization(topological().fit.params, 64);
    CHECK(std::abs(coarse.raw_x - topo.raw_x) < 1e-3);
    CHECK(std::abs(coarse.raw_y - topo.raw_y) < 1e-3);
}

TEST_CASE("Wilson loop over two bands reports a closed gap") {
    try {
        wilson_polarization(topological().fit.params, 64, 2);
        FAIL("expected gapless");
    } catch (const NumericalError& e) {
        CHECK(e.code() == "gapless");
    }
}

TEST_CASE("periodic real-space SSH spectrum equals the Bloch spectrum") {
    const SSHParams p{0.4, -1.0, 0.15, 0.07};
    const int n = 16;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ssh_realspace_hamiltonian(p, n, true),
                                                      Eigen::EigenvaluesOnly);
    std::vector<double> bloch;
    for (int my = 0; my < n; ++my) {
        for (int mx = 0; mx < n; ++mx) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> b(ssh_bloch(p, {2 * pi * mx / n, 2 * pi * my / n}));
            for (int i = 0; i < 4; ++i) bloch.push_back(b.eigenvalues()[i]);
        }
    }
    std::sort(bloch.begin(), bloch.end());
    REQUIRE(bloch.size() == static_cast<std::size_t>(es.eigenvalues().size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < bloch.size(); ++i) {
        worst = std::max(worst, std::abs(bloch[i] - es.eigenvalues()[static_cast<Eigen::Index>(i)]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("input validation") {
    const SpinArray arr{{{1, 0, 0}, {2, 0, 0}}, "custom"};
    try {
        effective_couplings(arr, lattice(0.25), 0.1, 16, {10});
        FAIL("expected insufficient_resolution");
    } catch (const ConfigError& e) {
        CHECK(e.code() == "insufficient_resolution");
    }
    CHECK_THROWS_AS(SpinArray({{{1, 0, 0}, {1, 0, 0}}, "custom"}).validate(), ConfigError);
    CHECK_THROWS_AS(SpinArray({{{3, 0, 0}}, "custom"}).validate(), ConfigError);
    CHECK_THROWS_AS(build_ssh_array({12, 3, 2, 0, 35}), ConfigError);
    CHECK_THROWS_AS(wilson_polarization({1, 0, 0, 0}, 2), ConfigError);
    const SpinCouplingMatrix loud = effective_couplings(arr, lattice(0.25), 0.2, 64);
    CHECK_FALSE(loud.warnings.empty());
}

}
