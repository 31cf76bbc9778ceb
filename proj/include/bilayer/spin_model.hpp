// spin_model.hpp — effective spin couplings, bipartite and generalized 2D SSH models
//
// Emitters at Δ = 0 interact through the bound-state field:
//   g_ij = g² · G_{l_i, l_j}(n_j − n_i; E_ref),
// the lattice Green's function at the reference bound-state energy (0 for
// η = −1). Couplings beyond |n_ij|_∞ > truncation are set to zero.

#pragma once

#include "bilayer/lattice.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace bilayer {

struct SpinSite {
    int layer = 1;
    int nx = 0;
    int ny = 0;
};

struct SpinArray {
    std::vector<SpinSite> sites;
    std::string geometry;

    /// Distinct (layer, n) pairs and valid layers; throws ConfigError otherwise.
    void validate() const;
};

struct SpinCouplingMatrix {
    Eigen::MatrixXd g;  // symmetric, zero diagonal
    double reference_energy = 0.0;
    std::vector<std::string> warnings;
};

struct CouplingOptions {
    int truncation = 10;
};

SpinCouplingMatrix effective_couplings(const SpinArray& array, const BilayerLattice& lat, double g,
                                       int n_k, const CouplingOptions& opts = {});

/// Cross-layer coupling table J_12^n = g² G_{21}(n) for |n|_∞ ≤ radius.
struct CouplingEntry {
    int nx = 0;
    int ny = 0;
    double value = 0.0;
};
std::vector<CouplingEntry> cross_layer_table(const BilayerLattice& lat, double g, int n_k, int radius);

/// f_S(k) = Σ_n J^n exp(−i k·n).
cd bloch_f_S(const std::vector<CouplingEntry>& table, const KPoint& k);

/// [[0, f_S], [f_S*, 0]].
Eigen::Matrix2cd bipartite_bloch(const std::vector<CouplingEntry>& table, const KPoint& k);

struct SSHParams {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
};

/// f_0(k) = t1 + t2 e^{ik} + t3 e^{−ik} + t4 e^{2ik}.
cd ssh_f0(const SSHParams& p, double k);

/// [[0, F], [F†, 0]] with F = [[f0(kx), f0(ky)], [f0*(ky), f0*(kx)]]; basis (A1, A2, B1, B2).
Eigen::Matrix4cd ssh_bloch(const SSHParams& p, const KPoint& kbar);

/// Dimerized placement: n positions per axis with alternating gaps d1, d2
/// starting at `origin`; spin (i, j) is in layer 1 when i + j is even.
struct SSHGeometry {
    int n = 12;
    int d1 = 4;
    int d2 = 2;
    int origin = 0;
    int lattice_size = 35;
};

SSHGeometry ssh_topological_geometry();
SSHGeometry ssh_trivial_geometry();
SSHGeometry ssh_uniform_geometry();

SpinArray build_ssh_array(const SSHGeometry& geo);

/// Grid indices (i, j) of every site, from the ranks of its x and y coordinates.
struct ArrayGrid {
    int n_x = 0, n_y = 0;
    std::vector<int> i, j;
    std::vector<int> xs, ys;  // sorted distinct coordinates
};
ArrayGrid array_grid(const SpinArray& array);

struct SSHFit {
    SSHParams params;
    std::array<int, 4> bond_counts{};
    std::array<double, 4> spread{};  // max relative deviation per class
    std::vector<std::string> warnings;
};

/// t1 = (i, i+1) bonds with i even, t2 = i odd, t3 = (i, i+3) with i even,
/// t4 = i odd, along both axes (i is the grid index along the bond axis).
SSHFit fit_ssh_params(const SpinCouplingMatrix& couplings, const SpinArray& array);

enum class ModeLabel { bulk, edge, corner };
std::string to_string(ModeLabel l);

struct SpectrumResult {
    Eigen::VectorXd energies;   // ascending
    Eigen::MatrixXd vectors;    // columns; rotated inside degenerate clusters
    std::vector<ModeLabel> labels;
    std::vector<double> ipr, boundary_fraction, corner_fraction;
    int corner_count = 0;
    int edge_count = 0;
};

struct ClassificationOptions {
    double corner_threshold = 0.6;
    double edge_threshold = 0.6;
    int corner_rank = 4;
    double degeneracy_rel_tol = 1e-9;
};

SpectrumResult finite_spectrum(const SpinArray& array, const SpinCouplingMatrix& couplings,
                               const ClassificationOptions& opts = {});

struct Polarization {
    double Px = 0.0, Py = 0.0;          // reported (snapped when quantized)
    double raw_x = 0.0, raw_y = 0.0;    // mod 1, unsnapped
    bool quantized = true;
    std::vector<std::string> warnings;
};

/// Wilson-loop polarization of the lowest n_occ bands of ssh_bloch.
Polarization wilson_polarization(const SSHParams& p, int n_k, int n_occ = 1);

/// 4·n² real-space model with Bloch matrix ssh_bloch (unit cell (A1, A2, B1, B2)).
Eigen::MatrixXd ssh_realspace_hamiltonian(const SSHParams& p, int n_cells, bool periodic);

} // namespace bilayer
