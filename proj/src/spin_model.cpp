// spin_model.cpp — effective couplings, SSH fit, finite spectra and Wilson loops

#include "bilayer/spin_model.hpp"

#include "bilayer/bound_state.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace bilayer {

namespace {

double reference_energy(const BilayerLattice& lat, double g, int n_k) {
    return solve_pole(EmitterConfig::small(0.0, g, 1), lat, n_k);
}

} // namespace

void SpinArray::validate() const {
    if (sites.empty()) throw ConfigError("empty_array", "spin array has no sites");
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& s : sites) {
        if (s.layer != 1 && s.layer != 2) throw ConfigError("bad_layer", "spin layer must be 1 or 2");
        if (!seen.insert({s.layer, s.nx, s.ny}).second) {
            throw ConfigError("duplicate_site",
                              fmt::format("spin site (layer {}, {}, {}) listed twice", s.layer, s.nx, s.ny));
        }
    }
}

SpinCouplingMatrix effective_couplings(const SpinArray& array, const BilayerLattice& lat, double g,
                                       int n_k, const CouplingOptions& opts) {
    array.validate();
    lat.validate();
    if (opts.truncation < 0) throw ConfigError("bad_truncation", "truncation must be >= 0");
    if (2 * opts.truncation >= n_k) {
        throw ConfigError("insufficient_resolution",
                          fmt::format("n_k = {} cannot resolve separations up to {}", n_k, opts.truncation));
    }
    SpinCouplingMatrix out;
    if (g > 0.2 * lat.G) {
        out.warnings.push_back(fmt::format(
            "markovian: g = {} exceeds 0.2 G = {}; effective couplings may be inaccurate", g, 0.2 * lat.G));
    }
    out.reference_energy = reference_energy(lat, g, n_k);
    const GreenGrid gg = lattice_green_function(lat, out.reference_energy, n_k);
    const Eigen::Index n = static_cast<Eigen::Index>(array.sites.size());
    out.g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const SpinSite& si = array.sites[static_cast<std::size_t>(a)];
            const SpinSite& sj = array.sites[static_cast<std::size_t>(b)];
            const int dx = si.nx - sj.nx;
            const int dy = si.ny - sj.ny;
            if (std::max(std::abs(dx), std::abs(dy)) > opts.truncation) continue;
            const double v = g * g * gg.at(si.layer, sj.layer, dx, dy).real();
            out.g(a, b) = v;
            out.g(b, a) = v;
        }
    }
    return out;
}

std::vector<CouplingEntry> cross_layer_table(const BilayerLattice& lat, double g, int n_k, int radius) {
    lat.validate();
    if (radius < 0 || 2 * radius >= n_k) {
        throw ConfigError("insufficient_resolution", "table radius must satisfy 0 <= 2·radius < n_k");
    }
    const GreenGrid gg = lattice_green_function(lat, reference_energy(lat, g, n_k), n_k);
    std::vector<CouplingEntry> t;
    for (int ny = -radius; ny <= radius; ++ny) {
        for (int nx = -radius; nx <= radius; ++nx) {
            t.push_back({nx, ny, g * g * gg.at(2, 1, nx, ny).real()});
        }
    }
    return t;
}

cd bloch_f_S(const std::vector<CouplingEntry>& table, const KPoint& k) {
    cd s{};
    for (const auto& e : table) s += e.value * std::polar(1.0, -(k.kx * e.nx + k.ky * e.ny));
    return s;
}

Eigen::Matrix2cd bipartite_bloch(const std::vector<CouplingEntry>& table, const KPoint& k) {
    const cd f = bloch_f_S(table, k);
    Eigen::Matrix2cd h;
    h << 0.0, f, std::conj(f), 0.0;
    return h;
}

cd ssh_f0(const SSHParams& p, double k) {
    return p.t1 + p.t2 * std::polar(1.0, k) + p.t3 * std::polar(1.0, -k) + p.t4 * std::polar(1.0, 2.0 * k);
}

Eigen::Matrix4cd ssh_bloch(const SSHParams& p, const KPoint& kbar) {
    const cd fx = ssh_f0(p, kbar.kx);
    const cd fy = ssh_f0(p, kbar.ky);
    Eigen::Matrix2cd F;
    F << fx, fy, std::conj(fy), std::conj(fx);
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h.block<2, 2>(0, 2) = F;
    h.block<2, 2>(2, 0) = F.adjoint();
    return h;
}

SSHGeometry ssh_topological_geometry() { return {12, 4, 2, 0, 35}; }
SSHGeometry ssh_trivial_geometry() { return {12, 2, 4, 1, 35}; }
SSHGeometry ssh_uniform_geometry() { return {12, 2, 2, 0, 35}; }

SpinArray build_ssh_array(const SSHGeometry& geo) {
    if (geo.n < 2 || geo.d1 < 1 || geo.d2 < 1) throw ConfigError("bad_geometry", "need n >= 2 and positive gaps");
    if ((geo.d1 % 2) != 0 || (geo.d2 % 2) != 0) {
        throw ConfigError("bad_geometry", "gaps must be even so the array stays bipartite");
    }
    std::vector<int> pos{geo.origin};
    for (int i = 0; i + 1 < geo.n; ++i) pos.push_back(pos.back() + (i % 2 == 0 ? geo.d1 : geo.d2));
    if (pos.front() < 0 || pos.back() >= geo.lattice_size) {
        throw ConfigError("bad_geometry",
                          fmt::format("positions {}..{} do not fit a {}-site lattice", pos.front(), pos.back(),
                                      geo.lattice_size));
    }
    SpinArray a;
    a.geometry = fmt::format("ssh-dimerized d1={} d2={} origin={}", geo.d1, geo.d2, geo.origin);
    for (int j = 0; j < geo.n; ++j) {
        for (int i = 0; i < geo.n; ++i) {
            a.sites.push_back({(i + j) % 2 == 0 ? 1 : 2, pos[static_cast<std::size_t>(i)],
                               pos[static_cast<std::size_t>(j)]});
        }
    }
    return a;
}

ArrayGrid array_grid(const SpinArray& array) {
    ArrayGrid g;
    std::set<int> xs, ys;
    for (const auto& s : array.sites) {
        xs.insert(s.nx);
        ys.insert(s.ny);
    }
    g.xs.assign(xs.begin(), xs.end());
    g.ys.assign(ys.begin(), ys.end());
    g.n_x = static_cast<int>(g.xs.size());
    g.n_y = static_cast<int>(g.ys.size());
    for (const auto& s : array.sites) {
        g.i.push_back(static_cast<int>(std::lower_bound(g.xs.begin(), g.xs.end(), s.nx) - g.xs.begin()));
        g.j.push_back(static_cast<int>(std::lower_bound(g.ys.begin(), g.ys.end(), s.ny) - g.ys.begin()));
    }
    return g;
}

namespace {

/// Site index at grid cell (i, j); throws unless every cell holds exactly one site.
std::vector<int> full_grid_map(const ArrayGrid& grid, std::size_t n_sites) {
    std::vector<int> map(static_cast<std::size_t>(grid.n_x) * grid.n_y, -1);
    for (std::size_t s = 0; s < n_sites; ++s) {
        int& slot = map[static_cast<std::size_t>(grid.j[s]) * grid.n_x + grid.i[s]];
        if (slot != -1) throw ConfigError("geometry_mismatch", "two spins share a grid cell");
        slot = static_cast<int>(s);
    }
    if (std::find(map.begin(), map.end(), -1) != map.end()) {
        throw ConfigError("geometry_mismatch", "spin array does not fill a rectangular grid");
    }
    return map;
}

} // namespace

SSHFit fit_ssh_params(const SpinCouplingMatrix& couplings, const SpinArray& array) {
    array.validate();
    const ArrayGrid grid = array_grid(array);
    if (couplings.g.rows() != static_cast<Eigen::Index>(array.sites.size())) {
        throw ConfigError("dimension_mismatch", "coupling matrix does not match the array");
    }
    if (grid.n_x < 4 || grid.n_y < 4) throw ConfigError("geometry_mismatch", "SSH fit needs at least 4x4 spins");
    const std::vector<int> map = full_grid_map(grid, array.sites.size());
    std::array<std::vector<double>, 4> cls;
    auto at = [&](int i, int j) { return map[static_cast<std::size_t>(j) * grid.n_x + i]; };
    // Along x (fixed row j) and along y (fixed column i).
    for (int axis = 0; axis < 2; ++axis) {
        const int n_along = axis == 0 ? grid.n_x : grid.n_y;
        const int n_across = axis == 0 ? grid.n_y : grid.n_x;
        for (int r = 0; r < n_across; ++r) {
            for (int i = 0; i < n_along; ++i) {
                auto site = [&](int ii) { return axis == 0 ? at(ii, r) : at(r, ii); };
                if (i + 1 < n_along) cls[i % 2 == 0 ? 0 : 1].push_back(couplings.g(site(i), site(i + 1)));
                if (i + 3 < n_along) cls[i % 2 == 0 ? 2 : 3].push_back(couplings.g(site(i), site(i + 3)));
            }
        }
    }
    SSHFit fit;
    std::array<double, 4> mean{};
    for (int c = 0; c < 4; ++c) {
        const auto& v = cls[static_cast<std::size_t>(c)];
        fit.bond_counts[c] = static_cast<int>(v.size());
        mean[c] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double dev = 0.0;
        for (double x : v) dev = std::max(dev, std::abs(x - mean[c]));
        fit.spread[c] = mean[c] != 0.0 ? dev / std::abs(mean[c]) : (dev == 0.0 ? 0.0 : INFINITY);
        if (fit.spread[c] > 0.1) {
            throw ConfigError("geometry_mismatch",
                              fmt::format("bond class t{} is inconsistent (relative spread {:.3g})", c + 1,
                                          fit.spread[c]));
        }
    }
    fit.params = {mean[0], mean[1], mean[2], mean[3]};
    const double scale = std::max(std::abs(mean[0]), std::abs(mean[1]));
    if (std::abs(std::abs(mean[0]) - std::abs(mean[1])) <= 1e-3 * scale) {
        fit.warnings.push_back("gapless: |t1| = |t2| (undimerized placement)");
    }
    return fit;
}

std::string to_string(ModeLabel l) {
    switch (l) {
        case ModeLabel::corner: return "corner";
        case ModeLabel::edge: return "edge";
        default: return "bulk";
    }
}

SpectrumResult finite_spectrum(const SpinArray& array, const SpinCouplingMatrix& couplings,
                               const ClassificationOptions& opts) {
    array.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(array.sites.size());
    if (couplings.g.rows() != n || couplings.g.cols() != n) {
        throw ConfigError("dimension_mismatch", "coupling matrix does not match the array");
    }
    const ArrayGrid grid = array_grid(array);
    if (grid.n_x < 8 || grid.n_y < 8) {
        throw ConfigError("array_too_small", "edge/corner classification needs at least 8x8 spins");
    }
    full_grid_map(grid, array.sites.size());

    Eigen::VectorXd corner_mask = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd boundary_mask = Eigen::VectorXd::Zero(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const int i = grid.i[static_cast<std::size_t>(s)];
        const int j = grid.j[static_cast<std::size_t>(s)];
        const bool ci = i <= 1 || i >= grid.n_x - 2;
        const bool cj = j <= 1 || j >= grid.n_y - 2;
        if (ci && cj) {
            corner_mask[s] = 1.0;
        } else if (i == 0 || i == grid.n_x - 1 || j == 0 || j == grid.n_y - 1) {
            boundary_mask[s] = 1.0;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(couplings.g);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver_failed", "dense eigensolver failed");
    SpectrumResult r;
    r.energies = es.eigenvalues();
    r.vectors = es.eigenvectors();
    const double scale = r.energies.cwiseAbs().maxCoeff();
    const double tol = opts.degeneracy_rel_tol * scale;

    // Rotate each degenerate cluster to diagonalize the corner projector.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    for (Eigen::Index a = 0; a < n;) {
        Eigen::Index b = a;
        while (b + 1 < n && r.energies[b + 1] - r.energies[b] <= tol) ++b;
        clusters.emplace_back(a, b);
        if (b > a) {
            const Eigen::MatrixXd V = r.vectors.middleCols(a, b - a + 1);
            const Eigen::MatrixXd P = V.transpose() * corner_mask.asDiagonal() * V;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(P);
            const Eigen::MatrixXd U = pe.eigenvectors().rowwise().reverse();
            r.vectors.middleCols(a, b - a + 1) = V * U;
        }
        a = b + 1;
    }

    r.labels.assign(static_cast<std::size_t>(n), ModeLabel::bulk);
    r.ipr.resize(static_cast<std::size_t>(n));
    r.boundary_fraction.resize(static_cast<std::size_t>(n));
    r.corner_fraction.resize(static_cast<std::size_t>(n));
    std::vector<double> cluster_abs(static_cast<std::size_t>(n));
    for (const auto& [a, b] : clusters) {
        double m = 0.0;
        for (Eigen::Index q = a; q <= b; ++q) m += std::abs(r.energies[q]);
        m /= static_cast<double>(b - a + 1);
        if (m <= tol) m = 0.0;
        for (Eigen::Index q = a; q <= b; ++q) cluster_abs[static_cast<std::size_t>(q)] = m;
    }
    for (Eigen::Index q = 0; q < n; ++q) {
        const Eigen::VectorXd p = r.vectors.col(q).array().square();
        r.ipr[static_cast<std::size_t>(q)] = p.array().square().sum();
        r.corner_fraction[static_cast<std::size_t>(q)] = p.dot(corner_mask);
        r.boundary_fraction[static_cast<std::size_t>(q)] = p.dot(boundary_mask);
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ea = cluster_abs[static_cast<std::size_t>(a)];
        const double eb = cluster_abs[static_cast<std::size_t>(b)];
        if (std::abs(ea - eb) > tol) return ea < eb;
        return r.corner_fraction[static_cast<std::size_t>(a)] > r.corner_fraction[static_cast<std::size_t>(b)];
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto q = static_cast<std::size_t>(order[rank]);
        if (static_cast<int>(rank) < opts.corner_rank && r.corner_fraction[q] >= opts.corner_threshold) {
            r.labels[q] = ModeLabel::corner;
            ++r.corner_count;
        } else if (r.boundary_fraction[q] >= opts.edge_threshold) {
            r.labels[q] = ModeLabel::edge;
            ++r.edge_count;
        }
    }
    return r;
}

Polarization wilson_polarization(const SSHParams& p, int n_k, int n_occ) {
    if (n_k < 4) throw ConfigError("bad_nk", "Wilson loop needs n_k >= 4");
    if (n_occ < 1 || n_occ > 3) throw ConfigError("bad_occupation", "n_occ must be 1, 2 or 3");
    const std::size_t n = static_cast<std::size_t>(n_k);
    const double step = 2.0 * std::numbers::pi / n_k;
    std::vector<Eigen::MatrixXcd> U(n * n);
    std::vector<double> gaps(n * n), scales(n * n);
    parallel_for(n, [&](std::size_t jy) {
        for (std::size_t jx = 0; jx < n; ++jx) {
            const KPoint k{step * static_cast<double>(jx), step * static_cast<double>(jy)};
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(ssh_bloch(p, k));
            const auto& e = es.eigenvalues();
            U[jy * n + jx] = es.eigenvectors().leftCols(n_occ);
            gaps[jy * n + jx] = e[n_occ] - e[n_occ - 1];
            scales[jy * n + jx] = std::max(std::abs(e[0]), std::abs(e[3]));
        }
    });
    const double scale = *std::max_element(scales.begin(), scales.end());
    const double min_gap = *std::min_element(gaps.begin(), gaps.end());
    if (!(scale > 0.0) || min_gap <= 1e-6 * scale) {
        throw NumericalError("gapless",
                             fmt::format("band gap above the {} occupied band(s) closes on the grid "
                                         "(min gap {:.3g}, scale {:.3g})", n_occ, min_gap, scale));
    }
    auto loop_phase = [&](int axis, std::size_t fixed) {
        cd prod{1.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t a = axis == 0 ? fixed * n + j : j * n + fixed;
            const std::size_t b = axis == 0 ? fixed * n + (j + 1) % n : ((j + 1) % n) * n + fixed;
            const Eigen::MatrixXcd M = U[a].adjoint() * U[b];
            const cd d = M.determinant();
            prod *= d / std::abs(d);
        }
        return -std::arg(prod) / (2.0 * std::numbers::pi);
    };
    auto component = [&](int axis) {
        std::vector<double> ph(n);
        parallel_for(n, [&](std::size_t m) { ph[m] = loop_phase(axis, m); });
        for (std::size_t m = 1; m < n; ++m) ph[m] -= std::round(ph[m] - ph[m - 1]);
        const double mean = std::accumulate(ph.begin(), ph.end(), 0.0) / static_cast<double>(n);
        return mean - std::floor(mean);
    };
    Polarization pol;
    pol.raw_x = component(0);
    pol.raw_y = component(1);
    auto snap = [&](double x, double& out) {
        for (double target : {0.0, 0.5, 1.0}) {
            if (std::abs(x - target) <= 1e-3) {
                out = target == 1.0 ? 0.0 : target;
                return true;
            }
        }
        out = x;
        return false;
    };
    const bool qx = snap(pol.raw_x, pol.Px);
    const bool qy = snap(pol.raw_y, pol.Py);
    pol.quantized = qx && qy;
    if (!pol.quantized) {
        pol.warnings.push_back(fmt::format("symmetry-breaking: polarization ({:.6f}, {:.6f}) is not quantized",
                                           pol.raw_x, pol.raw_y));
    }
    return pol;
}

Eigen::MatrixXd ssh_realspace_hamiltonian(const SSHParams& p, int n_cells, bool periodic) {
    if (n_cells < 3) throw ConfigError("bad_size", "need at least 3 cells per axis");
    const int n = n_cells;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4 * n * n, 4 * n * n);
    const std::array<std::pair<int, double>, 4> hops{{{0, p.t1}, {1, p.t2}, {-1, p.t3}, {2, p.t4}}};
    auto idx = [&](int mx, int my, int orb) { return 4 * (my * n + mx) + orb; };
    auto link = [&](int mx, int my, int orb_a, int rx, int ry, int orb_b, double t) {
        int bx = mx + rx, by = my + ry;
        if (periodic) {
            bx = ((bx % n) + n) % n;
            by = ((by % n) + n) % n;
        } else if (bx < 0 || by < 0 || bx >= n || by >= n) {
            return;
        }
        H(idx(mx, my, orb_a), idx(bx, by, orb_b)) += t;
        H(idx(bx, by, orb_b), idx(mx, my, orb_a)) += t;
    };
    constexpr int A1 = 0, A2 = 1, B1 = 2, B2 = 3;
    for (int my = 0; my < n; ++my) {
        for (int mx = 0; mx < n; ++mx) {
            for (const auto& [s, t] : hops) {
                if (t == 0.0) continue;
                link(mx, my, A1, s, 0, B1, t);
                link(mx, my, A1, 0, s, B2, t);
                link(mx, my, A2, 0, -s, B1, t);
                link(mx, my, A2, -s, 0, B2, t);
            }
        }
    }
    return H;
}

} // namespace bilayer
