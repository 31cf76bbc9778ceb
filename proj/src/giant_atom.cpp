// giant_atom.cpp — giant-atom bound states by superposition of resolvent columns

#include "bilayer/giant_atom.hpp"

#include "bilayer/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bilayer {

namespace {

std::pair<double, double> centre(const std::vector<CouplingPoint>& pts) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
        cx += p.nx;
        cy += p.ny;
    }
    return {cx / static_cast<double>(pts.size()), cy / static_cast<double>(pts.size())};
}

double snap_phase(double theta) {
    // θ ∈ (−π, π]; contributions are real so θ is 0 or π.
    return std::abs(theta) > 0.5 * std::numbers::pi ? std::numbers::pi : 0.0;
}

} // namespace

cd interference_factor(const std::vector<CouplingPoint>& points, const KPoint& k) {
    cd sum{};
    for (const auto& p : points) sum += p.g * std::polar(1.0, k.kx * p.nx + k.ky * p.ny);
    return sum;
}

bool even_neighbor(const std::vector<CouplingPoint>& points) {
    if (points.empty()) return true;
    const int ref = chiral_sign(points.front().layer, points.front().nx, points.front().ny);
    return std::all_of(points.begin(), points.end(), [&](const CouplingPoint& p) {
        return chiral_sign(p.layer, p.nx, p.ny) == ref;
    });
}

BoundStateSolution giant_bs_profile(const EmitterConfig& em, const BilayerLattice& lat, int n_k,
                                    const GiantOptions& opts) {
    em.validate();
    if (em.delta != 0.0) {
        throw ConfigError("nonzero_detuning", "giant_bs_profile is defined for delta = 0");
    }
    if (!opts.allow_parity_violation && !even_neighbor(em.points)) {
        throw ConfigError("parity_violation",
                          "coupling points are not mutually even-neighbor; the odd-neighbor "
                          "structure would be lost (set the override to compute anyway)");
    }
    if (n_k < 64 || (n_k & (n_k - 1)) != 0) {
        throw ConfigError("bad_nk", fmt::format("n_k must be a power of two >= 64, got {}", n_k));
    }
    const double E = solve_pole(em, lat, n_k);
    return quadrature_profile_at(em, lat, n_k, E, true);
}

std::vector<CouplingPoint> two_point_diagonal(double g) {
    return {{1, 0, 0, g}, {1, 1, 1, g}};
}

std::vector<CouplingPoint> four_point_diagonal(double g) {
    return {{1, 1, 1, g}, {1, 1, -1, -g}, {1, -1, 1, -g}, {1, -1, -1, g}};
}

std::vector<CouplingPoint> cross_points(double g) {
    return {{1, 1, 0, g}, {1, -1, 0, g}, {1, 0, 1, g}, {1, 0, -1, g}};
}

std::vector<CouplingPoint> two_layer_pair(double g) {
    return {{1, 0, 0, g}, {2, 1, 0, g}};
}

std::vector<PhaseSample> phase_profile(const BoundStateSolution& sol, const LineSpec& line) {
    if (sol.points.size() != 2 || sol.comp_a1.size() != 2) {
        throw ConfigError("decomposition_requires_two_points",
                          "phase_profile needs a two-point giant-atom solution with per-point components");
    }
    if (sol.points[0].layer == sol.points[1].layer) {
        throw ConfigError("decomposition_requires_two_layers",
                          "phase_profile needs one coupling point in each layer");
    }
    if (line.t_min > line.t_max) throw ConfigError("bad_line", "t_min must not exceed t_max");
    const auto& c1 = line.layer == 1 ? sol.comp_a1 : sol.comp_a2;
    std::vector<PhaseSample> out;
    for (int t = line.t_min; t <= line.t_max; ++t) {
        PhaseSample s;
        s.ny = t;
        s.nx = t + line.offset;
        const std::size_t i = sol.cell(s.nx, s.ny);
        if (i == static_cast<std::size_t>(-1)) continue;
        const cd u = c1[0][i];
        const cd v = c1[1][i];
        for (const cd& z : {u, v}) {
            if (std::abs(z.imag()) > 1e-6 * std::abs(z) + 1e-300) {
                throw NumericalError("decomposition_not_real",
                                     fmt::format("contribution at ({}, {}) is not real: {} + {}i",
                                                 s.nx, s.ny, z.real(), z.imag()));
            }
        }
        s.amplitude = (line.layer == 1 ? sol.field_a1[i] : sol.field_a2[i]).real();
        s.A = std::abs(u);
        s.B = std::abs(v);
        s.theta1 = snap_phase(std::arg(u));
        s.theta2 = snap_phase(std::arg(v));
        s.delta_theta = std::abs(s.theta1 - s.theta2) > 0.5 * std::numbers::pi ? std::numbers::pi : 0.0;
        out.push_back(s);
    }
    return out;
}

std::vector<std::size_t> phase_jumps(const std::vector<PhaseSample>& samples) {
    std::vector<std::size_t> j;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].delta_theta != samples[i - 1].delta_theta) j.push_back(i);
    }
    return j;
}

ChiralityReport chirality(const std::vector<PhaseSample>& samples) {
    const auto jumps = phase_jumps(samples);
    if (jumps.size() != 1) {
        throw NumericalError("jump_count", fmt::format("expected exactly one phase jump, found {}", jumps.size()));
    }
    ChiralityReport r;
    r.jump_index = jumps.front();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = samples[i].amplitude * samples[i].amplitude;
        if (i < r.jump_index) r.left_norm += w; else r.right_norm += w;
    }
    const double lo = std::min(r.left_norm, r.right_norm);
    const double hi = std::max(r.left_norm, r.right_norm);
    r.ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return r;
}

double branch_norm(const BoundStateSolution& sol, int dir_x, int dir_y, int t0, int t1) {
    if (std::abs(dir_x) != 1 || std::abs(dir_y) != 1) {
        throw ConfigError("bad_direction", "branch direction must be a diagonal (±1, ±1)");
    }
    const auto [cx, cy] = centre(sol.points);
    double s = 0.0;
    for (int y = 0; y < sol.ny; ++y) {
        for (int x = 0; x < sol.nx; ++x) {
            const auto [dx, dy] = sol.displacement(x, y);
            const double rx = dx - cx, ry = dy - cy;
            const double t = std::abs(rx * dir_x + ry * dir_y) / 2.0;
            const double perp = std::abs(rx * dir_y - ry * dir_x) / std::sqrt(2.0);
            if (t >= t0 && t <= t1 && perp <= 1.0) {
                const std::size_t i = static_cast<std::size_t>(y) * sol.nx + x;
                s += std::norm(sol.field_a1[i]) + std::norm(sol.field_a2[i]);
            }
        }
    }
    return s;
}

double branch_ratio(const BoundStateSolution& sol, int t0, int t1) {
    const double a = branch_norm(sol, 1, 1, t0, t1);
    const double b = branch_norm(sol, 1, -1, t0, t1);
    const double hi = std::max(a, b);
    return hi > 0.0 ? std::min(a, b) / hi : 0.0;
}

double outside_window_fraction(const BoundStateSolution& sol, int h) {
    const auto [cx, cy] = centre(sol.points);
    const int ix = static_cast<int>(std::lround(cx));
    const int iy = static_cast<int>(std::lround(cy));
    double inside = 0.0;
    double total = 0.0;
    for (int y = 0; y < sol.ny; ++y) {
        for (int x = 0; x < sol.nx; ++x) {
            const auto [dx, dy] = sol.displacement(x, y);
            const std::size_t i = static_cast<std::size_t>(y) * sol.nx + x;
            const double w = std::norm(sol.field_a1[i]) + std::norm(sol.field_a2[i]);
            total += w;
            if (std::abs(dx - ix) <= h && std::abs(dy - iy) <= h) inside += w;
        }
    }
    return total > 0.0 ? 1.0 - inside / total : 0.0;
}

} // namespace bilayer
