// acceptance.cpp — one PASS/FAIL line per acceptance criterion, with timings

#include "bilayer/bound_state.hpp"
#include "bilayer/dynamics.hpp"
#include "bilayer/giant_atom.hpp"
#include "bilayer/lattice.hpp"
#include "bilayer/spin_model.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace bilayer;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, double budget_s,
               const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = wall < budget_s;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    fmt::print("{} {:<5} {} | {} | {:.2f} s (budget {:.0f} s{})\n", pass ? "PASS" : "FAIL", id, title, o.detail, wall,
               budget_s, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
}

BilayerLattice lattice(double eta, double G, int L = 41) {
    BilayerLattice lat;
    lat.eta = eta;
    lat.G = G;
    lat.Lx = lat.Ly = L;
    return lat;
}

double max_rel_window(const BoundStateSolution& a, const BoundStateSolution& b, int h) {
    double num = 0.0, den = 0.0;
    for (int layer = 1; layer <= 2; ++layer) {
        for (int dy = -h; dy <= h; ++dy) {
            for (int dx = -h; dx <= h; ++dx) {
                num = std::max(num, std::abs(a.field(layer, dx, dy) - b.field(layer, dx, dy)));
                den = std::max(den, std::abs(b.field(layer, dx, dy)));
            }
        }
    }
    return num / den;
}

Outcome gap_law(double G) {
    const BandStructure b = band_structure(lattice(-1.0, G), 512);
    const double lo = *std::max_element(b.omega_l.begin(), b.omega_l.end());
    const double hi = *std::min_element(b.omega_u.begin(), b.omega_u.end());
    const double err = std::abs((hi - lo) - 2.0 * G);
    return {err < 1e-10, fmt::format("G={} gap={:.15g} |gap-2G|={:.2e}", G, hi - lo, err)};
}

Outcome pair_symmetry() {
    const int n = 512;
    double worst = 0.0;
    for (double eta : {-0.5, -2.0, -4.0}) {
        const BilayerLattice lat = lattice(eta, 0.25);
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const KPoint k{-pi + 2.0 * pi * ix / n, -pi + 2.0 * pi * iy / n};
                const KPoint kp{k.kx + pi, k.ky + pi};
                worst = std::max(worst, std::abs(band_energies(k, lat).omega_u + band_energies(kp, lat).omega_l));
            }
        }
    }
    return {worst < 1e-10, fmt::format("max|w_u(k)+w_l(k+Pi)|={:.2e} over eta in {{-0.5,-2,-4}}", worst)};
}

Outcome resonant_bound_state() {
    const BilayerLattice lat = lattice(-1.0, 0.25);
    const EmitterConfig em = EmitterConfig::small(0.0, 0.1);
    const double E = solve_pole(em, lat, 256);
    const BoundStateSolution ed = bs_exact_diagonalization(em, lat);
    const double w = ed.c_e * ed.c_e;
    return {std::abs(E) < 1e-12 && std::abs(ed.energy) < 1e-8 && w > 0.9,
            fmt::format("|E_pole|={:.2e} |E_ED|={:.2e} emitter weight={:.6f}", std::abs(E), std::abs(ed.energy), w)};
}

Outcome odd_neighbor() {
    const BilayerLattice lat = lattice(-1.0, 0.25);
    const EmitterConfig em = EmitterConfig::small(0.0, 0.1);
    const ParityNorms q = parity_norms(bs_realspace_profile(em, lat, 256));
    const ParityNorms e = parity_norms(bs_exact_diagonalization(em, lat));
    const double rq = q.even_norm / q.odd_norm;
    const double re = e.even_norm / e.odd_norm;
    return {rq < 1e-16 && re < 1e-12, fmt::format("opposite/own norm ratio: quadrature={:.2e} exact={:.2e}", rq, re)};
}

Outcome disorder_robustness() {
    const BilayerLattice lat = lattice(-1.0, 0.25);
    const EmitterConfig em = EmitterConfig::small(0.0, 0.1);
    int kept = 0, broken = 0;
    double worst_e = 0.0, worst_norm = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto off = DisorderRealization::generate(lat, seed, lat.J / 4, lat.G / 4, DisorderKind::offdiagonal);
        const ZeroModeReport r = zero_mode_report(em, lat, &off);
        worst_e = std::max(worst_e, r.min_abs_energy);
        worst_norm = std::max(worst_norm, r.emitter_sublattice_norm);
        if (r.min_abs_energy < 1e-10 && r.emitter_sublattice_norm < 1e-8) ++kept;
        const auto on = DisorderRealization::generate(lat, seed, lat.J / 4, lat.G / 4, DisorderKind::onsite);
        if (zero_mode_report(em, lat, &on).min_abs_energy > 1e-4) ++broken;
    }
    return {kept == 50 && broken >= 45,
            fmt::format("off-diagonal kept {}/50 (max min|E|={:.1e}, max forbidden norm={:.1e}); "
                        "diagonal broken {}/50 (need 45)",
                        kept, worst_e, worst_norm, broken)};
}

EmitterConfig giant(std::vector<CouplingPoint> pts) { return {0.0, std::move(pts)}; }

Outcome branch_suppression() {
    const BoundStateSolution s = giant_bs_profile(giant(two_point_diagonal(0.1)), lattice(-1.0, 0.25), 128);
    const double r = branch_ratio(s);
    return {r < 0.05, fmt::format("suppressed/enhanced branch norm (shells 5-15)={:.6f}", r)};
}

Outcome cross_trapping() {
    const BoundStateSolution s = giant_bs_profile(giant(cross_points(0.1)), lattice(-1.0, 0.25), 128);
    const double inside = 1.0 - outside_window_fraction(s, 3);
    return {inside >= 0.95, fmt::format("field norm inside 7x7={:.4f} (need >= 0.95)", inside)};
}

Outcome phase_jump() {
    const BoundStateSolution s = giant_bs_profile(giant(two_layer_pair(0.1)), lattice(-1.0, 0.25), 128);
    const auto samples = phase_profile(s, LineSpec{});
    const auto jumps = phase_jumps(samples);
    std::string where = "none";
    if (!jumps.empty()) where = fmt::format("({},{})", samples[jumps[0]].nx, samples[jumps[0]].ny);
    return {jumps.size() == 1, fmt::format("{} jump(s) along n_x=n_y+1, first at {}", jumps.size(), where)};
}

Outcome parity_selection() {
    const BilayerLattice lat = lattice(-1.0, 0.25);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> coord(-10, 10), layer(1, 2);
    std::vector<std::pair<SpinSite, SpinSite>> pairs;
    while (pairs.size() < 200) {
        SpinSite a{layer(rng), 0, 0};
        SpinSite b{layer(rng), coord(rng), coord(rng)};
        if (a.layer == b.layer && b.nx == 0 && b.ny == 0) continue;
        pairs.emplace_back(a, b);
    }
    double max_all = 0.0, max_forbidden = 0.0;
    int forbidden = 0;
    for (const auto& [a, b] : pairs) {
        const SpinCouplingMatrix c = effective_couplings({{a, b}, "pair"}, lat, 0.1, 64);
        const double v = std::abs(c.g(0, 1));
        max_all = std::max(max_all, v);
        if (chiral_sign(a.layer, a.nx, a.ny) == chiral_sign(b.layer, b.nx, b.ny)) {
            ++forbidden;
            max_forbidden = std::max(max_forbidden, v);
        }
    }
    return {max_forbidden < 1e-10 * max_all,
            fmt::format("{} mandated zeros among 200 pairs, max={:.2e} vs 1e-10*max|g|={:.2e}", forbidden,
                        max_forbidden, 1e-10 * max_all)};
}

Outcome ssh_topology() {
    const BilayerLattice lat = lattice(-1.0, 4.0, 35);
    struct Phase {
        SpinArray array;
        SpinCouplingMatrix c;
        SSHFit fit;
        SpectrumResult spec;
        Polarization pol;
    };
    auto run = [&](const SSHGeometry& geo) {
        Phase p;
        p.array = build_ssh_array(geo);
        p.c = effective_couplings(p.array, lat, 0.1, 256);
        p.fit = fit_ssh_params(p.c, p.array);
        p.spec = finite_spectrum(p.array, p.c);
        p.pol = wilson_polarization(p.fit.params, 128);
        return p;
    };
    const Phase topo = run(ssh_topological_geometry());
    const Phase triv = run(ssh_trivial_geometry());
    const SSHParams& t = topo.fit.params;
    const bool order = std::abs(t.t2) > std::abs(t.t1) && std::abs(t.t1) > std::abs(t.t4) &&
                       std::abs(t.t4) > std::abs(t.t3);
    const bool pol = topo.pol.Px == 0.5 && topo.pol.Py == 0.5 && triv.pol.Px == 0.0 && triv.pol.Py == 0.0;
    const bool corners = topo.spec.corner_count == 4 && triv.spec.corner_count == 0;
    double asym = 0.0;
    for (const Phase* p : {&topo, &triv}) {
        const Eigen::VectorXd& e = p->spec.energies;
        for (Eigen::Index i = 0; i < e.size(); ++i) asym = std::max(asym, std::abs(e[i] + e[e.size() - 1 - i]));
    }
    return {order && pol && corners && asym < 1e-10,
            fmt::format("t=({:.3e},{:.3e},{:.3e},{:.3e}) ordering={}; P_topo=({},{}) P_triv=({},{}); "
                        "corners {}/{}; spectrum asymmetry={:.1e}",
                        t.t1, t.t2, t.t3, t.t4, order ? "ok" : "wrong", topo.pol.Px, topo.pol.Py, triv.pol.Px,
                        triv.pol.Py, topo.spec.corner_count, triv.spec.corner_count, asym)};
}

Outcome entanglement() {
    const BilayerLattice lat = lattice(-1.0, 0.25);
    const double E = solve_pole(EmitterConfig::small(0.0, 0.1), lat, 256);
    const double J = 0.1 * 0.1 * lattice_green_function(lat, E, 256).at(1, 1, 2, 3).real();
    EntangleSetup s;
    s.n_spokes = 8;
    s.J_eff = J;
    const OptimalTime ideal = fidelity_at_optimal_time(s);
    const double rel = std::abs(ideal.t_star - ideal.t_analytic) / ideal.t_analytic;
    std::vector<double> F;
    for (double f : {0.0, 0.005, 0.01, 0.02}) {
        s.Gamma = f * std::abs(J);
        F.push_back(fidelity_at_optimal_time(s).F_max);
    }
    const bool monotone = F[1] < F[0] && F[2] < F[1] && F[3] < F[2];
    return {ideal.F_max >= 0.9999 && rel < 1e-6 && F[2] > 0.9 && F[2] < 1.0 && monotone,
            fmt::format("J_eff={:.6e}; F_max={:.8f} t*={:.4f} analytic={:.4f} (rel {:.1e}); "
                        "F(Gamma=0.01J)={:.6f}; monotone={}; tau=pi/(4J)={:.4f} gives F={:.4f}",
                        J, ideal.F_max, ideal.t_star, ideal.t_analytic, rel, F[2], monotone ? "yes" : "no",
                        ideal.t_quarter, ideal.F_at_quarter)};
}

Outcome oracle_equivalence() {
    const EmitterConfig em = EmitterConfig::small(0.0, 0.1);
    const BilayerLattice quarter = lattice(-1.0, 0.25, 61);
    const double a = max_rel_window(bs_exact_diagonalization(em, quarter), bs_realspace_profile(em, quarter, 512), 5);
    const BilayerLattice unit = lattice(-1.0, 1.0, 41);
    const double b = max_rel_window(bs_exact_diagonalization(em, unit), bs_realspace_profile(em, unit, 256), 5);
    return {a < 1e-3 && b < 1e-3,
            fmt::format("11x11 relative difference: G=J/4 (L=61)={:.2e}, G=J (L=41)={:.2e}", a, b)};
}

} // namespace

int main() {
    for (double G : {0.1, 0.25, 0.5}) criterion("AC1", "middle gap equals 2G", 5, [G] { return gap_law(G); });
    criterion("AC2", "band pairing for general eta", 5, pair_symmetry);
    criterion("AC3", "resonant bound state", 30, resonant_bound_state);
    criterion("AC4", "odd-neighbor bound state", 60, odd_neighbor);
    criterion("AC5", "disorder robustness", 600, disorder_robustness);
    criterion("AC6a", "two-point branch suppression", 30, branch_suppression);
    criterion("AC6b", "cross trapping", 30, cross_trapping);
    criterion("AC7", "single phase jump", 60, phase_jump);
    criterion("AC8", "parity selection of couplings", 60, parity_selection);
    criterion("AC9", "SSH topology", 300, ssh_topology);
    criterion("AC10", "entanglement protocol", 30, entanglement);
    criterion("AC11", "quadrature vs exact diagonalization", 120, oracle_equivalence);
    fmt::print("{} criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
