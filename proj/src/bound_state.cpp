// bound_state.cpp — pole equation, quadrature profiles and the exact-diagonalization oracle

#include "bilayer/bound_state.hpp"

#include "bilayer/eigensolver.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/fourier.hpp"
#include "bilayer/kernels.hpp"
#include "bilayer/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace bilayer {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

int wrap(int v, int n) {
    const int r = v % n;
    return r < 0 ? r + n : r;
}

double require_gap(const BilayerLattice& lat) {
    const double w = middle_gap_half_width(lat);
    if (!(lat.G > 0.0) || !(w > 0.0)) {
        throw ConfigError("no_middle_gap", "the bath has no middle gap (need G > 0 and eta < 0)");
    }
    return w;
}

void require_even_grid(int n_k, int minimum) {
    if (n_k < minimum || n_k % 2 != 0) {
        throw ConfigError("bad_nk", fmt::format("n_k must be even and >= {}, got {}", minimum, n_k));
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// f values of row j on the grid k = 2π(i, j)/n.
void fill_f_row(const std::vector<double>& c, double twoJ, std::size_t j, std::vector<double>& f) {
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) f[i] = twoJ * (c[i] + c[j]);
}

/// Σ/g² by pairing every k in the lower half grid with k + Π.
double self_energy_unit(double z, const BilayerLattice& lat, int layer, int n_k) {
    const std::vector<double> c = periodic_cosine_table(n_k);
    const std::size_t n = static_cast<std::size_t>(n_k);
    const std::size_t half = n / 2;
    std::vector<double> rows(half);
    parallel_for(half, [&](std::size_t j) {
        std::vector<double> f(n);
        fill_f_row(c, 2.0 * lat.J, j, f);
        rows[j] = kernels::self_energy_pair_row(f.data(), n, z, lat.eta, lat.G, layer);
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return total / static_cast<double>(n * n);
}

} // namespace

std::string to_string(Method m) { return m == Method::exact_diag ? "exact_diag" : "quadrature"; }

void EmitterConfig::validate() const {
    if (points.empty()) throw ConfigError("no_coupling_points", "emitter has no coupling points");
    if (!std::isfinite(delta)) throw ConfigError("non_finite_parameter", "delta must be finite");
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& p : points) {
        if (p.layer != 1 && p.layer != 2) {
            throw ConfigError("bad_layer", fmt::format("coupling layer must be 1 or 2, got {}", p.layer));
        }
        if (!std::isfinite(p.g)) throw ConfigError("non_finite_parameter", "coupling g must be finite");
        if (!seen.insert({p.layer, p.nx, p.ny}).second) {
            throw ConfigError("duplicate_point",
                              fmt::format("coupling point (layer {}, {}, {}) listed twice", p.layer, p.nx, p.ny));
        }
    }
}

EmitterConfig EmitterConfig::small(double delta, double g, int layer, int nx, int ny) {
    EmitterConfig e;
    e.delta = delta;
    e.points.push_back({layer, nx, ny, g});
    return e;
}

std::size_t BoundStateSolution::cell(int dx, int dy) const {
    int x = ox + dx;
    int y = oy + dy;
    if (periodic) {
        x = wrap(x, nx);
        y = wrap(y, ny);
    } else if (x < 0 || y < 0 || x >= nx || y >= ny) {
        return npos;
    }
    return static_cast<std::size_t>(y) * nx + x;
}

cd BoundStateSolution::a1(int dx, int dy) const {
    const std::size_t i = cell(dx, dy);
    return i == npos ? cd{} : field_a1[i];
}

cd BoundStateSolution::a2(int dx, int dy) const {
    const std::size_t i = cell(dx, dy);
    return i == npos ? cd{} : field_a2[i];
}

std::pair<int, int> BoundStateSolution::displacement(int x, int y) const {
    int dx = x - ox;
    int dy = y - oy;
    if (periodic) {
        dx = wrap(dx, nx);
        dy = wrap(dy, ny);
        if (dx >= nx - nx / 2) dx -= nx;
        if (dy >= ny - ny / 2) dy -= ny;
    }
    return {dx, dy};
}

double BoundStateSolution::photonic_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < field_a1.size(); ++i) s += std::norm(field_a1[i]) + std::norm(field_a2[i]);
    return s;
}

cd GreenGrid::at(int l_out, int l_in, int dx, int dy) const {
    const std::size_t i = static_cast<std::size_t>(wrap(dy, n)) * n + wrap(dx, n);
    if (l_out != l_in) return g21[i];
    return l_out == 1 ? g11[i] : g22[i];
}

GreenGrid lattice_green_function(const BilayerLattice& lat, double E, int n_k) {
    lat.validate();
    const double w = require_gap(lat);
    require_even_grid(n_k, 4);
    if (!(std::abs(E) < w)) {
        throw ConfigError("energy_outside_gap",
                          fmt::format("E = {} is outside the middle gap (-{}, {})", E, w, w));
    }
    const std::vector<double> c = periodic_cosine_table(n_k);
    const std::size_t n = static_cast<std::size_t>(n_k);
    std::vector<double> k11(n * n), k21(n * n), k22(n * n);
    parallel_for(n, [&](std::size_t j) {
        std::vector<double> f(n);
        fill_f_row(c, 2.0 * lat.J, j, f);
        kernels::resolvent_row(f.data(), n, E, lat.eta, lat.G, &k11[j * n], &k21[j * n], &k22[j * n]);
    });
    GreenGrid gg;
    gg.n = n_k;
    gg.E = E;
    gg.g11 = inverse_dft_2d(k11, n_k);
    gg.g21 = inverse_dft_2d(k21, n_k);
    gg.g22 = inverse_dft_2d(k22, n_k);
    return gg;
}

double self_energy(double z, const BilayerLattice& lat, int layer, double g, int n_k) {
    lat.validate();
    const double w = require_gap(lat);
    require_even_grid(n_k, 128);
    if (layer != 1 && layer != 2) throw ConfigError("bad_layer", "layer must be 1 or 2");
    if (!(std::abs(z) < w)) {
        throw ConfigError("principal_value_ambiguity",
                          fmt::format("z = {} lies in a band; the self-energy is only defined inside (-{}, {})",
                                      z, w, w));
    }
    return g * g * self_energy_unit(z, lat, layer, n_k);
}

double emitter_self_energy(double z, const EmitterConfig& em, const BilayerLattice& lat, int n_k) {
    em.validate();
    lat.validate();
    const double w = require_gap(lat);
    require_even_grid(n_k, 4);
    if (!(std::abs(z) < w)) {
        throw ConfigError("principal_value_ambiguity", fmt::format("z = {} lies in a band", z));
    }
    const std::vector<double> c = periodic_cosine_table(n_k);
    const std::size_t n = static_cast<std::size_t>(n_k);
    const std::size_t half = n / 2;
    const std::size_t np = em.points.size();
    // Pair (p, q) needs Σ_k R_{l_p l_q}(k) cos(k·(n_p − n_q)); k and k+Π are
    // summed together so parity-forbidden pairs cancel exactly.
    std::vector<double> row_sums(half * np * np, 0.0);
    parallel_for(half, [&](std::size_t j) {
        std::vector<double> f(n), fm(n), r11(n), r21(n), r22(n), m11(n), m21(n), m22(n);
        fill_f_row(c, 2.0 * lat.J, j, f);
        for (std::size_t i = 0; i < n; ++i) fm[i] = -f[i];
        kernels::resolvent_row(f.data(), n, z, lat.eta, lat.G, r11.data(), r21.data(), r22.data());
        kernels::resolvent_row(fm.data(), n, z, lat.eta, lat.G, m11.data(), m21.data(), m22.data());
        for (std::size_t p = 0; p < np; ++p) {
            for (std::size_t q = 0; q < np; ++q) {
                const auto& P = em.points[p];
                const auto& Q = em.points[q];
                const long dx = P.nx - Q.nx;
                const long dy = P.ny - Q.ny;
                const std::vector<double>& a = (P.layer != Q.layer) ? r21 : (P.layer == 1 ? r11 : r22);
                const std::vector<double>& b = (P.layer != Q.layer) ? m21 : (P.layer == 1 ? m11 : m22);
                const long shift = static_cast<long>(half) * (dx + dy);
                double acc[4] = {0.0, 0.0, 0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) {
                    const long phase = static_cast<long>(i) * dx + static_cast<long>(j) * dy;
                    const double c0 = c[static_cast<std::size_t>(wrap(static_cast<int>(phase % static_cast<long>(n)), n_k))];
                    const double c1 = c[static_cast<std::size_t>(
                        wrap(static_cast<int>((phase + shift) % static_cast<long>(n)), n_k))];
                    acc[i & 3] += a[i] * c0 + b[i] * c1;
                }
                row_sums[(j * np + p) * np + q] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
            }
        }
    });
    double sigma = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t q = 0; q < np; ++q) {
            double s = 0.0;
            for (std::size_t j = 0; j < half; ++j) s += row_sums[(j * np + p) * np + q];
            sigma += em.points[p].g * em.points[q].g * s;
        }
    }
    return sigma / static_cast<double>(n * n);
}

double solve_pole(const EmitterConfig& em, const BilayerLattice& lat, int n_k) {
    em.validate();
    lat.validate();
    const double w = require_gap(lat);
    require_even_grid(n_k, 16);
    if (!(std::abs(em.delta) < w)) {
        throw ConfigError("delta_outside_gap",
                          fmt::format("delta = {} is outside the middle gap (-{}, {})", em.delta, w, w));
    }
    auto F = [&](double z) {
        if (em.is_small()) {
            const auto& p = em.points.front();
            return z - em.delta - p.g * p.g * self_energy_unit(z, lat, p.layer, n_k);
        }
        return z - em.delta - emitter_self_energy(z, em, lat, n_k);
    };
    const double hi0 = w * (1.0 - 1e-9);
    double lo = -hi0;
    double hi = hi0;
    const double flo = F(lo);
    const double fhi = F(hi);
    if (!(flo < 0.0 && fhi > 0.0)) {
        throw NumericalError("no_inner_gap_bound_state",
                             fmt::format("pole function has no sign change on the gap bracket: "
                                         "F({}) = {}, F({}) = {}", lo, flo, hi, fhi));
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = F(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) lo = mid; else hi = mid;
    }
    return std::abs(F(lo)) <= std::abs(F(hi)) ? lo : hi;
}

std::pair<double, double> bs_momentum_amplitudes(const KPoint& k, double E_BS, const BilayerLattice& lat) {
    const double w = require_gap(lat);
    if (!(std::abs(E_BS) < w)) throw ConfigError("energy_outside_gap", "E_BS must lie inside the middle gap");
    const double f = dispersion_f(k, lat.J);
    double r11, r21, r22;
    kernels::scalar::resolvent_row(&f, 1, E_BS, lat.eta, lat.G, &r11, &r21, &r22);
    return {r11, r21};
}

std::pair<double, double> bs_momentum_amplitudes_polariton(const KPoint& k, double E_BS,
                                                           const BilayerLattice& lat) {
    const double w = require_gap(lat);
    if (!(std::abs(E_BS) < w)) throw ConfigError("energy_outside_gap", "E_BS must lie inside the middle gap");
    const BandPair bp = band_energies(k, lat);
    const MixingAngles ang = polariton_angles(k, lat);
    const double s = ang.sin_theta, c = ang.cos_theta;
    const double iu = 1.0 / (E_BS - bp.omega_u);
    const double il = 1.0 / (E_BS - bp.omega_l);
    return {s * s * iu + c * c * il, s * c * (iu - il)};
}

BoundStateSolution quadrature_profile_at(const EmitterConfig& em, const BilayerLattice& lat, int n_k,
                                         double E, bool keep_components) {
    em.validate();
    const GreenGrid gg = lattice_green_function(lat, E, n_k);
    BoundStateSolution sol;
    sol.energy = E;
    sol.method = Method::quadrature;
    sol.nx = sol.ny = n_k;
    sol.ox = sol.oy = 0;
    sol.periodic = true;
    sol.points = em.points;
    const std::size_t total = static_cast<std::size_t>(n_k) * n_k;
    sol.field_a1.assign(total, cd{});
    sol.field_a2.assign(total, cd{});
    if (keep_components) {
        sol.comp_a1.assign(em.points.size(), std::vector<cd>(total));
        sol.comp_a2.assign(em.points.size(), std::vector<cd>(total));
    }
    for (std::size_t p = 0; p < em.points.size(); ++p) {
        const CouplingPoint& P = em.points[p];
        for (int y = 0; y < n_k; ++y) {
            for (int x = 0; x < n_k; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * n_k + x;
                const cd v1 = P.g * gg.at(1, P.layer, x - P.nx, y - P.ny);
                const cd v2 = P.g * gg.at(2, P.layer, x - P.nx, y - P.ny);
                sol.field_a1[i] += v1;
                sol.field_a2[i] += v2;
                if (keep_components) {
                    sol.comp_a1[p][i] = v1;
                    sol.comp_a2[p][i] = v2;
                }
            }
        }
    }
    const double c_e = 1.0 / std::sqrt(1.0 + sol.photonic_norm());
    sol.c_e = c_e;
    for (auto& v : sol.field_a1) v *= c_e;
    for (auto& v : sol.field_a2) v *= c_e;
    for (auto& comp : sol.comp_a1) for (auto& v : comp) v *= c_e;
    for (auto& comp : sol.comp_a2) for (auto& v : comp) v *= c_e;

    // Resolution heuristic: the field must have decayed by 1e-8 at the torus edge.
    double peak = 0.0, rim = 0.0;
    for (int y = 0; y < n_k; ++y) {
        for (int x = 0; x < n_k; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * n_k + x;
            const double a = std::max(std::abs(sol.field_a1[i]), std::abs(sol.field_a2[i]));
            peak = std::max(peak, a);
            if (x == n_k / 2 || y == n_k / 2) rim = std::max(rim, a);
        }
    }
    if (peak > 0.0 && rim > 1e-8 * peak) {
        sol.warnings.push_back(fmt::format(
            "resolution: field at the torus edge is {:.3g} of its peak (n_k = {} too small for the "
            "localization length)", rim / peak, n_k));
    }
    return sol;
}

BoundStateSolution bs_realspace_profile(const EmitterConfig& em, const BilayerLattice& lat, int n_k) {
    em.validate();
    if (!em.is_small()) {
        throw ConfigError("not_small_atom", "bs_realspace_profile needs exactly one coupling point");
    }
    if (n_k < 64 || !is_power_of_two(n_k)) {
        throw ConfigError("bad_nk", fmt::format("n_k must be a power of two >= 64, got {}", n_k));
    }
    const double E = solve_pole(em, lat, n_k);
    BoundStateSolution sol = quadrature_profile_at(em, lat, n_k, E, false);
    // Frame origin at the emitter site.
    if (em.points.front().nx != 0 || em.points.front().ny != 0) {
        sol.ox = wrap(em.points.front().nx, n_k);
        sol.oy = wrap(em.points.front().ny, n_k);
        for (auto& p : sol.points) {
            p.nx -= em.points.front().nx;
            p.ny -= em.points.front().ny;
        }
    }
    return sol;
}

Eigen::SparseMatrix<double> build_emitter_hamiltonian(const EmitterConfig& em, const BilayerLattice& lat,
                                                      const DisorderRealization* dis,
                                                      std::pair<int, int> origin) {
    em.validate();
    const Eigen::SparseMatrix<double> Hb = build_realspace_hamiltonian(lat, dis);
    const int nb = static_cast<int>(lat.dimension());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(Hb.nonZeros()) + 2 * em.points.size() + 1);
    for (int k = 0; k < Hb.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(Hb, k); it; ++it) {
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (const auto& p : em.points) {
        int x = origin.first + p.nx;
        int y = origin.second + p.ny;
        if (lat.boundary == Boundary::periodic) {
            x = wrap(x, lat.Lx);
            y = wrap(y, lat.Ly);
        } else if (x < 0 || y < 0 || x >= lat.Lx || y >= lat.Ly) {
            throw ConfigError("point_outside_lattice",
                              fmt::format("coupling point ({}, {}) falls outside the {}x{} lattice",
                                          x, y, lat.Lx, lat.Ly));
        }
        const int s = static_cast<int>(lat.site_index(p.layer, x, y));
        trip.emplace_back(s, nb, p.g);
        trip.emplace_back(nb, s, p.g);
    }
    if (em.delta != 0.0) trip.emplace_back(nb, nb, em.delta);
    Eigen::SparseMatrix<double> H(nb + 1, nb + 1);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

namespace {

std::pair<int, int> resolve_origin(const BilayerLattice& lat, const ExactDiagOptions& opts) {
    return opts.origin.value_or(std::make_pair(lat.Lx / 2, lat.Ly / 2));
}

BoundStateSolution solution_from_vector(const Eigen::VectorXd& v_in, double E, const EmitterConfig& em,
                                        const BilayerLattice& lat, std::pair<int, int> origin) {
    const Eigen::Index nb = static_cast<Eigen::Index>(lat.dimension());
    Eigen::VectorXd v = v_in;
    if (v[nb] < 0.0) v = -v;
    BoundStateSolution sol;
    sol.energy = E;
    sol.c_e = v[nb];
    sol.method = Method::exact_diag;
    sol.nx = lat.Lx;
    sol.ny = lat.Ly;
    sol.ox = origin.first;
    sol.oy = origin.second;
    sol.periodic = lat.boundary == Boundary::periodic;
    sol.points = em.points;
    const std::size_t ns = lat.sites_per_layer();
    sol.field_a1.resize(ns);
    sol.field_a2.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        sol.field_a1[i] = v[static_cast<Eigen::Index>(i)];
        sol.field_a2[i] = v[static_cast<Eigen::Index>(ns + i)];
    }
    return sol;
}

} // namespace

BoundStateSolution bs_exact_diagonalization(const EmitterConfig& em, const BilayerLattice& lat,
                                            const DisorderRealization* dis, const ExactDiagOptions& opts) {
    em.validate();
    lat.validate();
    const double w = require_gap(lat);
    const auto origin = resolve_origin(lat, opts);
    const Eigen::SparseMatrix<double> H = build_emitter_hamiltonian(em, lat, dis, origin);
    const Eigen::Index dim = H.rows();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[dim - 1] = 1.0;
    LanczosOptions lo;
    lo.nev = opts.nev;
    const double sigma = em.delta + 1e-7 * w;
    const EigenPairs ep = shift_invert_lanczos(H, sigma, e, lo);

    struct Candidate {
        double E, weight;
        int idx;
    };
    std::vector<Candidate> cands;
    for (std::size_t q = 0; q < ep.values.size(); ++q) {
        const double wgt = ep.vectors(dim - 1, static_cast<Eigen::Index>(q)) *
                           ep.vectors(dim - 1, static_cast<Eigen::Index>(q));
        cands.push_back({ep.values[q], wgt, static_cast<int>(q)});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.weight > b.weight;
    });
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
        if (std::abs(c.E) < w) {
            best = &c;
            break;
        }
    }
    if (!best || best->weight <= 0.5) {
        std::string detail = "no in-gap eigenstate with emitter weight > 0.5; best candidates:";
        for (std::size_t i = 0; i < std::min<std::size_t>(2, cands.size()); ++i) {
            detail += fmt::format(" (E = {:.6g}, weight = {:.6g})", cands[i].E, cands[i].weight);
        }
        throw NumericalError("hybridization_failure", detail);
    }
    return solution_from_vector(ep.vectors.col(best->idx), best->E, em, lat, origin);
}

ParityNorms parity_norms(const BoundStateSolution& sol) {
    ParityNorms pn;
    for (int y = 0; y < sol.ny; ++y) {
        for (int x = 0; x < sol.nx; ++x) {
            const auto [dx, dy] = sol.displacement(x, y);
            const std::size_t i = static_cast<std::size_t>(y) * sol.nx + x;
            for (int layer = 1; layer <= 2; ++layer) {
                const double wgt = std::norm(layer == 1 ? sol.field_a1[i] : sol.field_a2[i]);
                if (chiral_sign(layer, dx, dy) > 0) pn.even_norm += wgt; else pn.odd_norm += wgt;
            }
        }
    }
    return pn;
}

ZeroModeReport zero_mode_report(const EmitterConfig& em, const BilayerLattice& lat,
                                const DisorderRealization* dis) {
    em.validate();
    if (!em.is_small()) throw ConfigError("not_small_atom", "zero_mode_report needs a small atom");
    lat.validate();
    const double w = require_gap(lat);
    const auto origin = std::make_pair(lat.Lx / 2, lat.Ly / 2);
    const Eigen::SparseMatrix<double> H = build_emitter_hamiltonian(em, lat, dis, origin);
    const Eigen::Index dim = H.rows();
    const double sigma = 1e-7 * w;

    ZeroModeReport rep;
    LanczosOptions lo;
    lo.nev = 4;
    const EigenPairs any = shift_invert_lanczos(H, sigma, lanczos_random_start(dim), lo);
    rep.min_abs_energy = std::numeric_limits<double>::infinity();
    for (double v : any.values) rep.min_abs_energy = std::min(rep.min_abs_energy, std::abs(v));

    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[dim - 1] = 1.0;
    const EigenPairs proj = shift_invert_lanczos(H, sigma, e, lo);
    std::size_t best = 0;
    for (std::size_t q = 1; q < proj.values.size(); ++q) {
        if (std::abs(proj.values[q]) < std::abs(proj.values[best])) best = q;
    }
    const Eigen::VectorXd v = proj.vectors.col(static_cast<Eigen::Index>(best));
    rep.zero_mode_energy = proj.values[best];
    rep.min_abs_energy = std::min(rep.min_abs_energy, std::abs(rep.zero_mode_energy));
    rep.emitter_weight = v[dim - 1] * v[dim - 1];
    const auto& p = em.points.front();
    const int ref = chiral_sign(p.layer, origin.first + p.nx, origin.second + p.ny);
    for (int layer = 1; layer <= 2; ++layer) {
        for (int y = 0; y < lat.Ly; ++y) {
            for (int x = 0; x < lat.Lx; ++x) {
                const double a = v[static_cast<Eigen::Index>(lat.site_index(layer, x, y))];
                if (chiral_sign(layer, x, y) == ref) rep.emitter_sublattice_norm += a * a;
                else rep.opposite_sublattice_norm += a * a;
            }
        }
    }
    return rep;
}

} // namespace bilayer
