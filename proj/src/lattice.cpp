// lattice.cpp — bilayer bath: dispersion, bands, real-space Hamiltonian, DOS

#include "bilayer/lattice.hpp"

#include "bilayer/errors.hpp"
#include "bilayer/kernels.hpp"
#include "bilayer/parallel.hpp"
#include "bilayer/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bilayer {

namespace {

constexpr std::uint64_t kStreamEps1 = 1;
constexpr std::uint64_t kStreamEps2 = 2;
constexpr std::uint64_t kStreamEps3 = 3;
constexpr std::uint64_t kStreamOnsite1 = 4;
constexpr std::uint64_t kStreamOnsite2 = 5;

bool finite(double x) { return std::isfinite(x); }

} // namespace

std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw ConfigError("bad_boundary", "boundary must be \"open\" or \"periodic\", got \"" + s + "\"");
}

std::string to_string(DisorderKind k) { return k == DisorderKind::onsite ? "onsite" : "offdiagonal"; }

DisorderKind disorder_kind_from_string(const std::string& s) {
    if (s == "offdiagonal") return DisorderKind::offdiagonal;
    if (s == "onsite") return DisorderKind::onsite;
    throw ConfigError("bad_disorder_kind",
                      "disorder kind must be \"offdiagonal\" or \"onsite\", got \"" + s + "\"");
}

void BilayerLattice::validate() const {
    if (Lx < 3 || Ly < 3) {
        throw ConfigError("lattice_too_small", "Lx and Ly must be >= 3");
    }
    if (!finite(J) || !finite(eta) || !finite(G)) {
        throw ConfigError("non_finite_parameter", "J, eta and G must be finite");
    }
    if (J <= 0.0) throw ConfigError("bad_hopping", "J must be positive");
    if (G < 0.0) throw ConfigError("negative_G", "G must be >= 0");
}

std::size_t BilayerLattice::site_index(int layer, int nx, int ny) const {
    return static_cast<std::size_t>(layer - 1) * sites_per_layer() +
           static_cast<std::size_t>(ny) * Lx + static_cast<std::size_t>(nx);
}

DisorderRealization DisorderRealization::generate(const BilayerLattice& lat, std::uint64_t seed,
                                                  double W_intra, double W_inter,
                                                  DisorderKind kind) {
    lat.validate();
    if (!(W_intra >= 0.0) || !(W_inter >= 0.0)) {
        throw ConfigError("bad_disorder_width", "disorder half-widths must be >= 0");
    }
    DisorderRealization d;
    d.seed = seed;
    d.W_intra = W_intra;
    d.W_inter = W_inter;
    d.kind = kind;
    d.Lx = lat.Lx;
    d.Ly = lat.Ly;
    const std::size_t ns = lat.sites_per_layer();
    if (kind == DisorderKind::offdiagonal) {
        d.eps1.resize(2 * ns);
        d.eps2.resize(2 * ns);
        d.eps3.resize(ns);
        for (std::size_t b = 0; b < 2 * ns; ++b) {
            d.eps1[b] = counter_symmetric(seed, kStreamEps1, b, W_intra);
            d.eps2[b] = counter_symmetric(seed, kStreamEps2, b, W_intra);
        }
        for (std::size_t s = 0; s < ns; ++s) d.eps3[s] = counter_symmetric(seed, kStreamEps3, s, W_inter);
    } else {
        d.onsite1.resize(ns);
        d.onsite2.resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            d.onsite1[s] = counter_symmetric(seed, kStreamOnsite1, s, W_intra);
            d.onsite2[s] = counter_symmetric(seed, kStreamOnsite2, s, W_intra);
        }
    }
    return d;
}

double dispersion_f(const KPoint& k, double J) { return 2.0 * J * (std::cos(k.kx) + std::cos(k.ky)); }

BandPair band_energies_f(double f, double eta, double G) {
    double wu, wl;
    kernels::scalar::band_row(&f, 1, eta, G, &wu, &wl, nullptr, nullptr);
    return {wu, wl};
}

BandPair band_energies(const KPoint& k, const BilayerLattice& lat) {
    if (lat.G < 0.0) throw ConfigError("negative_G", "G must be >= 0");
    return band_energies_f(dispersion_f(k, lat.J), lat.eta, lat.G);
}

MixingAngles polariton_angles_f(double f, double eta, double G) {
    if (G == 0.0) {
        throw ConfigError("degenerate_hybridization",
                          "mixing angles are undefined for G = 0 (use G > 0)");
    }
    double wu, wl, s, c;
    kernels::scalar::band_row(&f, 1, eta, G, &wu, &wl, &s, &c);
    return {s, c};
}

MixingAngles polariton_angles(const KPoint& k, const BilayerLattice& lat) {
    return polariton_angles_f(dispersion_f(k, lat.J), lat.eta, lat.G);
}

Eigen::Matrix2cd bloch_kernel(const KPoint& k, const BilayerLattice& lat) {
    const double f = dispersion_f(k, lat.J);
    Eigen::Matrix2cd h;
    h << f, lat.G, lat.G, lat.eta * f;
    return h;
}

std::vector<double> periodic_cosine_table(int n) {
    if (n <= 0) throw ConfigError("bad_grid", "grid size must be positive");
    std::vector<double> c(static_cast<std::size_t>(n));
    const double step = 2.0 * std::numbers::pi / n;
    const int half = n / 2;
    if (n % 2 == 0) {
        for (int j = 0; j <= half; ++j) {
            if (4 * j < n) {
                c[j] = std::cos(step * j);
            } else if (4 * j == n) {
                c[j] = 0.0;
            } else {
                c[j] = -c[half - j];
            }
        }
    } else {
        for (int j = 0; j <= half; ++j) c[j] = std::cos(step * j);
    }
    for (int j = half + 1; j < n; ++j) c[j] = c[n - j];
    return c;
}

BandStructure band_structure(const BilayerLattice& lat, int n_k) {
    lat.validate();
    if (n_k <= 0) throw ConfigError("bad_nk", "n_k must be positive");
    const std::vector<double> c = periodic_cosine_table(n_k);
    const std::size_t n = static_cast<std::size_t>(n_k);
    BandStructure bs;
    bs.n_k = n_k;
    bs.kx.resize(n * n);
    bs.ky.resize(n * n);
    bs.omega_u.resize(n * n);
    bs.omega_l.resize(n * n);
    bs.sin_theta.resize(n * n);
    bs.cos_theta.resize(n * n);
    const double step = 2.0 * std::numbers::pi / n_k;
    const double twoJ = 2.0 * lat.J;
    parallel_for(n, [&](std::size_t j) {
        // k = 2πi/n − π, so cos k = −cos(2πi/n).
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = twoJ * (-c[i] - c[j]);
            bs.kx[j * n + i] = step * static_cast<double>(i) - std::numbers::pi;
            bs.ky[j * n + i] = step * static_cast<double>(j) - std::numbers::pi;
        }
        if (lat.G > 0.0) {
            kernels::band_row(f.data(), n, lat.eta, lat.G, &bs.omega_u[j * n], &bs.omega_l[j * n],
                              &bs.sin_theta[j * n], &bs.cos_theta[j * n]);
        } else {
            // Uncoupled layers: report the layer-1 band as "upper" character.
            for (std::size_t i = 0; i < n; ++i) {
                const double a = f[i], b = lat.eta * f[i];
                bs.omega_u[j * n + i] = std::max(a, b);
                bs.omega_l[j * n + i] = std::min(a, b);
                bs.sin_theta[j * n + i] = a >= b ? 1.0 : 0.0;
                bs.cos_theta[j * n + i] = a >= b ? 0.0 : 1.0;
            }
        }
    });
    return bs;
}

double middle_gap_half_width(const BilayerLattice& lat) {
    const double a = 0.5 * (1.0 + lat.eta);
    const double b = 0.5 * (1.0 - lat.eta);
    const double fmax = 4.0 * std::abs(lat.J);
    double fstar = 0.0;
    if (lat.eta < 0.0) {
        fstar = -a * lat.G / (b * std::sqrt(-lat.eta));
    } else {
        fstar = a >= 0.0 ? -fmax : fmax;
    }
    fstar = std::clamp(fstar, -fmax, fmax);
    const double wu = band_energies_f(fstar, lat.eta, lat.G).omega_u;
    return std::max(0.0, wu);
}

int chiral_sign(int layer, int nx, int ny) {
    const int p = ((nx + ny) % 2 == 0) ? 1 : -1;
    return layer == 1 ? p : -p;
}

Eigen::SparseMatrix<double> build_realspace_hamiltonian(const BilayerLattice& lat,
                                                        const DisorderRealization* dis) {
    lat.validate();
    const std::size_t ns = lat.sites_per_layer();
    if (dis) {
        if (dis->Lx != lat.Lx || dis->Ly != lat.Ly) {
            throw ConfigError("disorder_shape_mismatch",
                              "disorder realization was drawn for a different lattice size");
        }
        const bool bonds_ok = (dis->eps1.empty() || dis->eps1.size() == 2 * ns) &&
                              (dis->eps2.empty() || dis->eps2.size() == 2 * ns) &&
                              (dis->eps3.empty() || dis->eps3.size() == ns) &&
                              (dis->onsite1.empty() || dis->onsite1.size() == ns) &&
                              (dis->onsite2.empty() || dis->onsite2.size() == ns);
        if (!bonds_ok) {
            throw ConfigError("disorder_shape_mismatch",
                              "disorder map sizes do not match the lattice bond/site sets");
        }
    }
    auto pick = [](const std::vector<double>* v, std::size_t i) {
        return (v && !v->empty()) ? (*v)[i] : 0.0;
    };
    const std::vector<double>* e1 = dis ? &dis->eps1 : nullptr;
    const std::vector<double>* e2 = dis ? &dis->eps2 : nullptr;
    const std::vector<double>* e3 = dis ? &dis->eps3 : nullptr;
    const std::vector<double>* o1 = dis ? &dis->onsite1 : nullptr;
    const std::vector<double>* o2 = dis ? &dis->onsite2 : nullptr;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(10 * ns);
    const bool periodic = lat.boundary == Boundary::periodic;
    auto add = [&](std::size_t a, std::size_t b, double v) {
        trip.emplace_back(static_cast<int>(a), static_cast<int>(b), v);
        trip.emplace_back(static_cast<int>(b), static_cast<int>(a), v);
    };
    for (int ny = 0; ny < lat.Ly; ++ny) {
        for (int nx = 0; nx < lat.Lx; ++nx) {
            const std::size_t s = static_cast<std::size_t>(ny) * lat.Lx + nx;
            for (int dir = 0; dir < 2; ++dir) {
                int mx = nx + (dir == 0 ? 1 : 0);
                int my = ny + (dir == 1 ? 1 : 0);
                if (mx >= lat.Lx || my >= lat.Ly) {
                    if (!periodic) continue;
                    mx %= lat.Lx;
                    my %= lat.Ly;
                }
                const std::size_t bond = 2 * s + static_cast<std::size_t>(dir);
                add(lat.site_index(1, nx, ny), lat.site_index(1, mx, my), lat.J + pick(e1, bond));
                add(lat.site_index(2, nx, ny), lat.site_index(2, mx, my),
                    lat.eta * lat.J + pick(e2, bond));
            }
            add(lat.site_index(1, nx, ny), lat.site_index(2, nx, ny), lat.G + pick(e3, s));
            const double d1 = pick(o1, s);
            const double d2 = pick(o2, s);
            if (d1 != 0.0) trip.emplace_back(static_cast<int>(lat.site_index(1, nx, ny)),
                                             static_cast<int>(lat.site_index(1, nx, ny)), d1);
            if (d2 != 0.0) trip.emplace_back(static_cast<int>(lat.site_index(2, nx, ny)),
                                             static_cast<int>(lat.site_index(2, nx, ny)), d2);
        }
    }
    const int dim = static_cast<int>(lat.dimension());
    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(trip.begin(), trip.end());
    H.prune(0.0);
    return H;
}

Histogram density_of_states(const BilayerLattice& lat, int n_k, int n_bins) {
    if (n_k < 32) throw ConfigError("bad_nk", "density_of_states needs n_k >= 32");
    if (n_bins < 16) throw ConfigError("bad_nbins", "density_of_states needs n_bins >= 16");
    const BandStructure bs = band_structure(lat, n_k);
    const double lo = *std::min_element(bs.omega_l.begin(), bs.omega_l.end());
    const double hi = *std::max_element(bs.omega_u.begin(), bs.omega_u.end());
    Histogram h;
    const double width = (hi - lo) / n_bins;
    h.bin_width = width;
    h.centers.resize(static_cast<std::size_t>(n_bins));
    for (int b = 0; b < n_bins; ++b) h.centers[b] = lo + (b + 0.5) * width;
    std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
    auto bin_of = [&](double w) {
        int b = static_cast<int>(std::floor((w - lo) / width));
        return std::clamp(b, 0, n_bins - 1);
    };
    for (double w : bs.omega_u) counts[bin_of(w)] += 1.0;
    for (double w : bs.omega_l) counts[bin_of(w)] += 1.0;
    const double total = 2.0 * static_cast<double>(bs.omega_u.size());
    h.density.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) h.density[b] = counts[b] / (total * width);
    return h;
}

double thermal_occupation(double omega, double E_F, double kT) {
    if (kT < 0.0 || !std::isfinite(kT)) {
        throw ConfigError("bad_temperature", "kT must be finite and >= 0");
    }
    if (kT == 0.0) {
        if (omega < E_F) return 1.0;
        if (omega > E_F) return 0.0;
        return 0.5;
    }
    const double x = (omega - E_F) / kT;
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

} // namespace bilayer
