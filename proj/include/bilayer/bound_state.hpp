// bound_state.hpp — single-excitation emitter–photon bound states in the middle gap
//
// Quadrature path: the lattice Green's function G(E) = (E − H)^{-1} is
// evaluated on an n_k × n_k torus by an inverse FFT of the Bloch resolvent;
// a bound state of an emitter with coupling points {(l_p, n_p, g_p)} at
// energy E has photonic amplitudes C_{n,l} = c_e Σ_p g_p G_{l,l_p}(n − n_p; E).
// Exact path: the (2·Lx·Ly + 1)-dimensional Hamiltonian is solved near Δ by
// shift-invert Lanczos started on the emitter.

#pragma once

#include "bilayer/lattice.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bilayer {

struct CouplingPoint {
    int layer = 1;   // 1 or 2
    int nx = 0;
    int ny = 0;
    double g = 0.1;  // signed strength
};

struct EmitterConfig {
    double delta = 0.0;
    std::vector<CouplingPoint> points;

    /// Throws ConfigError for an empty point list, bad layers or duplicate points.
    void validate() const;
    bool is_small() const { return points.size() == 1; }

    static EmitterConfig small(double delta, double g, int layer = 1, int nx = 0, int ny = 0);
};

enum class Method { quadrature, exact_diag };
std::string to_string(Method m);

/// Fields on a rectangular grid addressed by coordinates relative to the
/// emitter frame: grid cell (ox + dx, oy + dy) holds displacement (dx, dy).
/// Torus grids (quadrature) wrap; finite grids return 0 outside.
struct BoundStateSolution {
    double energy = 0.0;
    double c_e = 0.0;
    Method method = Method::quadrature;
    int nx = 0, ny = 0;
    int ox = 0, oy = 0;
    bool periodic = false;
    std::vector<cd> field_a1, field_a2;  // row-major [y·nx + x]
    std::vector<CouplingPoint> points;   // in frame coordinates

    /// Per-point contributions (same grid, same normalization) for giant atoms.
    std::vector<std::vector<cd>> comp_a1, comp_a2;

    std::vector<std::string> warnings;

    std::size_t cell(int dx, int dy) const;  // npos when outside a finite grid
    cd a1(int dx, int dy) const;
    cd a2(int dx, int dy) const;
    cd field(int layer, int dx, int dy) const { return layer == 1 ? a1(dx, dy) : a2(dx, dy); }

    /// Frame displacement of grid cell (x, y); torus cells map into [−n/2, n/2).
    std::pair<int, int> displacement(int x, int y) const;

    /// Σ |C|² over both layers.
    double photonic_norm() const;
};

/// Lattice Green's function G_{l,l'}(n; E) on an n × n torus.
struct GreenGrid {
    int n = 0;
    double E = 0.0;
    std::vector<cd> g11, g21, g22;  // [ny·n + nx], n taken mod n

    cd at(int l_out, int l_in, int dx, int dy) const;
};

GreenGrid lattice_green_function(const BilayerLattice& lat, double E, int n_k);

/// Σ_e(z) for a small atom on `layer` with strength g; z must lie in the middle gap.
double self_energy(double z, const BilayerLattice& lat, int layer, double g, int n_k);

/// Σ(z) = Σ_{p,q} g_p g_q G_{l_p,l_q}(n_p − n_q; z) for any point set (direct k-sums).
double emitter_self_energy(double z, const EmitterConfig& em, const BilayerLattice& lat, int n_k);

/// Root of z − Δ − Σ(z) in the middle gap by bisection on a symmetric bracket.
double solve_pole(const EmitterConfig& em, const BilayerLattice& lat, int n_k);

/// Resolvent column of a layer-1 emitter: (C_k,a1, C_k,a2) = ((E−ηf)/det, G/det).
std::pair<double, double> bs_momentum_amplitudes(const KPoint& k, double E_BS,
                                                 const BilayerLattice& lat);

/// Same amplitudes written through the polariton weights; equal to the above.
std::pair<double, double> bs_momentum_amplitudes_polariton(const KPoint& k, double E_BS,
                                                           const BilayerLattice& lat);

/// Small-atom profile from the BZ quadrature; n_k a power of two ≥ 64.
BoundStateSolution bs_realspace_profile(const EmitterConfig& em, const BilayerLattice& lat,
                                        int n_k);

/// Quadrature profile for any point set at a given energy (no pole solve).
BoundStateSolution quadrature_profile_at(const EmitterConfig& em, const BilayerLattice& lat,
                                         int n_k, double E, bool keep_components);

struct ExactDiagOptions {
    std::optional<std::pair<int, int>> origin;  // lattice site of frame (0,0); default centre
    int nev = 6;
};

/// Exact single-excitation eigenstate with maximal emitter weight inside the gap.
BoundStateSolution bs_exact_diagonalization(const EmitterConfig& em, const BilayerLattice& lat,
                                            const DisorderRealization* dis = nullptr,
                                            const ExactDiagOptions& opts = {});

/// Sparse single-excitation Hamiltonian; the emitter is the last index.
Eigen::SparseMatrix<double> build_emitter_hamiltonian(const EmitterConfig& em,
                                                      const BilayerLattice& lat,
                                                      const DisorderRealization* dis,
                                                      std::pair<int, int> origin);

struct ParityNorms {
    double odd_norm = 0.0;   // Λ = −1 in frame coordinates (layer 1, n_x+n_y odd)
    double even_norm = 0.0;  // Λ = +1 (layer 1, n_x+n_y even)
};

/// Squared photonic weight on each Λ-sublattice of the frame.
ParityNorms parity_norms(const BoundStateSolution& sol);

struct ZeroModeReport {
    double min_abs_energy = 0.0;     // smallest |E| of the full spectrum
    double zero_mode_energy = 0.0;   // energy of the emitter-projected state nearest 0
    double emitter_weight = 0.0;
    double emitter_sublattice_norm = 0.0;  // photonic weight on the coupled site's Λ-sublattice
    double opposite_sublattice_norm = 0.0;
};

/// Spectral diagnostics of the chiral zero mode for a small atom at the frame origin.
ZeroModeReport zero_mode_report(const EmitterConfig& em, const BilayerLattice& lat,
                                const DisorderRealization* dis);

} // namespace bilayer
