// test_kernels.cpp — scalar/AVX2 equivalence, dispatch and thread-count independence

#include "bilayer/bound_state.hpp"
#include "bilayer/kernels.hpp"
#include "bilayer/lattice.hpp"
#include "bilayer/parallel.hpp"
#include "bilayer/spin_model.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

using namespace bilayer;

namespace {

std::vector<double> f_row(std::size_t n, double shift) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = 4.0 * std::cos(2.0 * std::numbers::pi * i / n + shift);
    return f;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

struct ThreadsGuard {
    explicit ThreadsGuard(const char* v) { setenv("BILATTICE_THREADS", v, 1); }
    ~ThreadsGuard() { unsetenv("BILATTICE_THREADS"); }
};

struct IsaGuard {
    explicit IsaGuard(kernels::Isa isa) : saved(kernels::active_isa()) { kernels::set_isa(isa); }
    ~IsaGuard() { kernels::set_isa(saved); }
    kernels::Isa saved;
};

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatch reports a consistent ISA") {
    const kernels::Isa isa = kernels::active_isa();
    if (isa == kernels::Isa::avx2) {
        CHECK(kernels::avx2_compiled());
        CHECK(kernels::avx2_supported());
    }
    CHECK(std::string(kernels::isa_name(kernels::Isa::scalar)) == "scalar");
    IsaGuard g(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
}

TEST_CASE("AVX2 kernels are bitwise identical to the scalar reference") {
    if (!kernels::avx2_compiled() || !kernels::avx2_supported()) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 129u, 512u}) {
        const auto f = f_row(n, 0.123);
        for (double eta : {-1.0, -4.0, -0.5}) {
            std::vector<double> u0(n), l0(n), s0(n), c0(n), u1(n), l1(n), s1(n), c1(n);
            kernels::scalar::band_row(f.data(), n, eta, 0.25, u0.data(), l0.data(), s0.data(), c0.data());
            kernels::avx2::band_row(f.data(), n, eta, 0.25, u1.data(), l1.data(), s1.data(), c1.data());
            CHECK(same_bits(u0, u1));
            CHECK(same_bits(l0, l1));
            CHECK(same_bits(s0, s1));
            CHECK(same_bits(c0, c1));
            for (int layer : {1, 2}) {
                for (double z : {0.0, 0.1, -0.17}) {
                    CHECK(same_bits(kernels::scalar::self_energy_pair_row(f.data(), n, z, eta, 0.25, layer),
                                    kernels::avx2::self_energy_pair_row(f.data(), n, z, eta, 0.25, layer)));
                }
            }
            std::vector<double> a0(n), b0(n), d0(n), a1(n), b1(n), d1(n);
            kernels::scalar::resolvent_row(f.data(), n, 0.05, eta, 0.25, a0.data(), b0.data(), d0.data());
            kernels::avx2::resolvent_row(f.data(), n, 0.05, eta, 0.25, a1.data(), b1.data(), d1.data());
            CHECK(same_bits(a0, a1));
            CHECK(same_bits(b0, b1));
            CHECK(same_bits(d0, d1));
        }
    }
}

TEST_CASE("band_row skips angles when given null outputs") {
    const auto f = f_row(9, 0.0);
    std::vector<double> u(9), l(9);
    kernels::band_row(f.data(), 9, -1.0, 0.25, u.data(), l.data(), nullptr, nullptr);
    for (std::size_t i = 0; i < 9; ++i) CHECK(u[i] == doctest::Approx(std::sqrt(f[i] * f[i] + 0.0625)));
}

TEST_CASE("end-to-end results agree between ISAs") {
    BilayerLattice lat;
    lat.eta = -4.0;
    lat.G = 1.0;
    double se[2];
    BoundStateSolution sol[2];
    for (int k = 0; k < 2; ++k) {
        IsaGuard g(k == 0 ? kernels::Isa::scalar : kernels::Isa::avx2);
        se[k] = self_energy(0.1, lat, 1, 0.1, 128);
        sol[k] = bs_realspace_profile(EmitterConfig::small(0.2, 0.1), lat, 64);
    }
    CHECK(same_bits(se[0], se[1]));
    CHECK(sol[0].field_a1 == sol[1].field_a1);
    CHECK(sol[0].field_a2 == sol[1].field_a2);
}

TEST_CASE("results are independent of the thread count") {
    BilayerLattice lat;
    lat.eta = -2.0;
    lat.G = 0.5;
    std::vector<double> se;
    std::vector<BandStructure> bands;
    std::vector<Histogram> dos;
    std::vector<Eigen::MatrixXd> couplings;
    const SpinArray arr = build_ssh_array({8, 4, 2, 0, 35});
    for (const char* t : {"1", "2", "5"}) {
        ThreadsGuard g(t);
        CHECK(max_threads() == static_cast<std::size_t>(std::stoi(t)));
        se.push_back(self_energy(0.05, lat, 2, 0.1, 256));
        bands.push_back(band_structure(lat, 96));
        dos.push_back(density_of_states(lat, 128, 50));
        couplings.push_back(effective_couplings(arr, lat, 0.1, 128).g);
    }
    for (std::size_t i = 1; i < se.size(); ++i) {
        CHECK(same_bits(se[0], se[i]));
        CHECK(same_bits(bands[0].omega_u, bands[i].omega_u));
        CHECK(same_bits(bands[0].sin_theta, bands[i].sin_theta));
        CHECK(same_bits(dos[0].density, dos[i].density));
        CHECK(couplings[0] == couplings[i]);
    }
}

TEST_CASE("parallel_for runs every task once and propagates exceptions") {
    ThreadsGuard g("4");
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) { if (i == 17) throw std::runtime_error("boom"); }),
                    std::runtime_error);
}

}
