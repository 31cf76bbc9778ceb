// test_giant_atom.cpp — interference factors, superposition, branches, phase decomposition

#include "bilayer/errors.hpp"
#include "bilayer/giant_atom.hpp"

#include <doctest.h>

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

EmitterConfig giant(std::vector<CouplingPoint> pts) { return {0.0, std::move(pts)}; }

} // namespace

TEST_SUITE("giant_atom") {

TEST_CASE("interference factor: two diagonal points vanish on k_y = pi - k_x") {
    const auto pts = two_point_diagonal(1.0);
    for (int i = 0; i < 16; ++i) {
        const double kx = -pi + 0.4 * i;
        CHECK(std::abs(interference_factor(pts, {kx, pi - kx})) < 1e-14);
    }
    CHECK(std::abs(interference_factor(pts, {0.0, 0.0}) - cd(2.0)) < 1e-15);
}

TEST_CASE("interference factor: cross equals f(k)/J") {
    const auto pts = cross_points(1.0);
    for (int i = 0; i < 16; ++i) {
        const KPoint k{-pi + 0.4 * i, 0.9 - 0.3 * i};
        CHECK(std::abs(interference_factor(pts, k) - cd(2.0 * (std::cos(k.kx) + std::cos(k.ky)))) < 1e-14);
    }
    CHECK(std::abs(interference_factor(pts, {pi / 2, pi / 2})) < 1e-15);
}

TEST_CASE("interference factor: signed four-point set gives -4 sin kx sin ky") {
    const auto pts = four_point_diagonal(1.0);
    for (int i = 0; i < 16; ++i) {
        const KPoint k{-pi + 0.4 * i, 0.9 - 0.3 * i};
        CHECK(std::abs(interference_factor(pts, k) - cd(-4.0 * std::sin(k.kx) * std::sin(k.ky))) < 1e-14);
    }
    CHECK(std::abs(interference_factor(pts, {0.0, pi})) < 1e-15);
    CHECK(std::abs(interference_factor(pts, {-pi, 0.0})) < 1e-15);
}

TEST_CASE("even-neighbor rule and parity-violation error") {
    CHECK(even_neighbor(two_point_diagonal(0.1)));
    CHECK(even_neighbor(two_layer_pair(0.1)));
    const std::vector<CouplingPoint> bad{{1, 0, 0, 0.1}, {1, 1, 0, 0.1}};
    CHECK_FALSE(even_neighbor(bad));
    try {
        giant_bs_profile(giant(bad), lattice(0.25), 128);
        FAIL("expected parity violation");
    } catch (const ConfigError& e) {
        CHECK(e.code() == "parity_violation");
    }
    GiantOptions o;
    o.allow_parity_violation = true;
    CHECK_NOTHROW(giant_bs_profile(giant(bad), lattice(0.25), 128, o));
}

TEST_CASE("giant profile requires delta = 0 and a power-of-two grid") {
    CHECK_THROWS_AS(giant_bs_profile({0.1, two_point_diagonal(0.1)}, lattice(0.25), 128), ConfigError);
    CHECK_THROWS_AS(giant_bs_profile(giant(two_point_diagonal(0.1)), lattice(0.25), 100), ConfigError);
}

TEST_CASE("superposition equals the weighted sum of shifted small-atom profiles") {
    const BilayerLattice lat = lattice(0.25);
    const BoundStateSolution small = bs_realspace_profile(EmitterConfig::small(0.0, 0.1), lat, 128);
    for (const auto& pts : {two_point_diagonal(0.1), four_point_diagonal(0.1), two_layer_pair(0.1)}) {
        const BoundStateSolution s = giant_bs_profile(giant(pts), lat, 128);
        double worst = 0.0;
        for (int dy = -20; dy <= 20; ++dy) {
            for (int dx = -20; dx <= 20; ++dx) {
                cd f1 = 0.0, f2 = 0.0;
                for (const auto& p : pts) {
                    const double w = p.g / 0.1;
                    const cd a1 = small.a1(dx - p.nx, dy - p.ny) / small.c_e;
                    const cd a2 = small.a2(dx - p.nx, dy - p.ny) / small.c_e;
                    if (p.layer == 1) {
                        f1 += w * a1;
                        f2 += w * a2;
                    } else {
                        f1 += w * a2;
                        f2 -= w * a1;
                    }
                }
                worst = std::max({worst, std::abs(s.a1(dx, dy) - s.c_e * f1), std::abs(s.a2(dx, dy) - s.c_e * f2)});
            }
        }
        CHECK(worst < 1e-10);
        // per-point components add up to the field
        for (std::size_t i = 0; i < s.field_a1.size(); i += 97) {
            cd sum = 0.0;
            for (const auto& c : s.comp_a1) sum += c[i];
            CHECK(std::abs(sum - s.field_a1[i]) < 1e-15);
        }
    }
}

TEST_CASE("even-neighbor superpositions stay on one chiral sublattice") {
    for (const auto& pts : {two_point_diagonal(0.1), four_point_diagonal(0.1), cross_points(0.1), two_layer_pair(0.1)}) {
        const BoundStateSolution s = giant_bs_profile(giant(pts), lattice(0.25), 128);
        const int lam = chiral_sign(pts[0].layer, pts[0].nx, pts[0].ny);
        double same = 0.0, other = 0.0;
        for (int y = 0; y < s.ny; ++y) {
            for (int x = 0; x < s.nx; ++x) {
                const auto [dx, dy] = s.displacement(x, y);
                const std::size_t i = static_cast<std::size_t>(y) * s.nx + x;
                for (int layer : {1, 2}) {
                    const double w = std::norm(layer == 1 ? s.field_a1[i] : s.field_a2[i]);
                    (chiral_sign(layer, dx, dy) == lam ? same : other) += w;
                }
            }
        }
        CHECK(same < 1e-10);
        CHECK(other > 1e-3);
    }
}

TEST_CASE("two diagonal points cancel one branch") {
    const BoundStateSolution s = giant_bs_profile(giant(two_point_diagonal(0.1)), lattice(0.25), 128);
    const double r = branch_ratio(s);
    CHECK(r < 0.05);
    CHECK(r == doctest::Approx(0.011715143471891674).epsilon(1e-6));
    // the cancelled momenta kx + ky = pi make up the branch along (1, 1)
    CHECK(branch_norm(s, 1, 1) < branch_norm(s, 1, -1));
    CHECK(r == doctest::Approx(branch_norm(s, 1, 1) / branch_norm(s, 1, -1)).epsilon(1e-12));
}

TEST_CASE("branch suppression strengthens as G decreases") {
    double prev = 1.0;
    for (double G : {0.5, 0.25, 0.125}) {
        const double r = branch_ratio(giant_bs_profile(giant(two_point_diagonal(0.1)), lattice(G), 256));
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("four-point and cross trapping (regression values)") {
    const BoundStateSolution four = giant_bs_profile(giant(four_point_diagonal(0.1)), lattice(0.25), 128);
    CHECK(outside_window_fraction(four, 4) == doctest::Approx(0.35961456903915723).epsilon(1e-6));
    const BoundStateSolution cross = giant_bs_profile(giant(cross_points(0.1)), lattice(0.25), 128);
    CHECK(outside_window_fraction(cross, 3) == doctest::Approx(0.05578384110008361).epsilon(1e-6));
    // the cross traps far more than a small atom does
    const BoundStateSolution small = bs_realspace_profile(EmitterConfig::small(0.0, 0.1), lattice(0.25), 128);
    CHECK(outside_window_fraction(small, 3) > 5.0 * outside_window_fraction(cross, 3));
}

TEST_CASE("two-layer pair: one phase jump next to the second point, chiral weights") {
    const BoundStateSolution s = giant_bs_profile(giant(two_layer_pair(0.1)), lattice(0.25), 128);
    const auto samples = phase_profile(s, LineSpec{});
    REQUIRE(samples.size() == 31u);
    const auto jumps = phase_jumps(samples);
    REQUIRE(jumps.size() == 1u);
    const PhaseSample& at = samples[jumps[0]];
    CHECK(std::abs(at.nx - 1) + std::abs(at.ny) <= 1);
    for (const auto& p : samples) {
        CHECK((p.delta_theta == 0.0 || p.delta_theta == pi));
        CHECK(std::abs(p.theta1) <= pi);
    }
    const ChiralityReport c = chirality(samples);
    CHECK(c.ratio > 2.0);
    CHECK(c.ratio == doctest::Approx(47.89666512616326).epsilon(1e-6));
}

TEST_CASE("phase profile preconditions") {
    const BoundStateSolution small = bs_realspace_profile(EmitterConfig::small(0.0, 0.1), lattice(0.25), 128);
    CHECK_THROWS_AS(phase_profile(small, LineSpec{}), ConfigError);
    const BoundStateSolution same = giant_bs_profile(giant(two_point_diagonal(0.1)), lattice(0.25), 128);
    CHECK_THROWS_AS(phase_profile(same, LineSpec{}), ConfigError);
    CHECK_THROWS_AS(branch_norm(same, 1, 0), ConfigError);
}

}
