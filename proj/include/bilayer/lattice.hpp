// lattice.hpp — bilayer square-lattice bath: geometry, Bloch kernel, bands, real space
//
// Two stacked square lattices with hoppings J (layer 1) and ηJ (layer 2) and
// vertical coupling G. Layers are numbered 1 and 2 in every public signature.
// Site index convention (all matrices and file outputs):
//   index = (layer − 1)·Lx·Ly + n_y·Lx + n_x.

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bilayer {

using cd = std::complex<double>;

enum class Boundary { periodic, open };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct BilayerLattice {
    int Lx = 41;
    int Ly = 41;
    double J = 1.0;
    double eta = -1.0;
    double G = 0.25;
    Boundary boundary = Boundary::open;

    /// Throws ConfigError on Lx, Ly < 3, G < 0 or non-finite parameters.
    void validate() const;

    std::size_t sites_per_layer() const { return static_cast<std::size_t>(Lx) * Ly; }
    std::size_t dimension() const { return 2 * sites_per_layer(); }
    std::size_t site_index(int layer, int nx, int ny) const;
};

struct KPoint {
    double kx = 0.0;
    double ky = 0.0;
};

enum class DisorderKind { offdiagonal, onsite };

std::string to_string(DisorderKind k);
DisorderKind disorder_kind_from_string(const std::string& s);

/// One disorder draw. Bond maps are indexed by bond id = 2·(n_y·Lx + n_x) + dir
/// with dir 0 the +x bond and dir 1 the +y bond leaving site n; eps3 and the
/// on-site maps are indexed by n_y·Lx + n_x. Maps that a kind does not use are
/// left empty.
struct DisorderRealization {
    std::uint64_t seed = 0;
    double W_intra = 0.0;
    double W_inter = 0.0;
    DisorderKind kind = DisorderKind::offdiagonal;
    int Lx = 0;
    int Ly = 0;
    std::vector<double> eps1, eps2, eps3;
    std::vector<double> onsite1, onsite2;

    /// Counter-based draw; identical for identical (lat size, seed, widths, kind).
    static DisorderRealization generate(const BilayerLattice& lat, std::uint64_t seed,
                                        double W_intra, double W_inter,
                                        DisorderKind kind = DisorderKind::offdiagonal);
};

struct BandPair {
    double omega_u;
    double omega_l;
};

struct MixingAngles {
    double sin_theta;
    double cos_theta;
};

struct BandStructure {
    int n_k = 0;
    std::vector<double> kx, ky;            // row-major grid, ky slowest
    std::vector<double> omega_u, omega_l;
    std::vector<double> sin_theta, cos_theta;
};

struct Histogram {
    std::vector<double> centers;
    std::vector<double> density;  // normalized to unit area
    double bin_width = 0.0;
};

/// f(k) = 2J(cos k_x + cos k_y).
double dispersion_f(const KPoint& k, double J);

/// Upper/lower band energies for a given f; general-η closed form.
BandPair band_energies_f(double f, double eta, double G);
BandPair band_energies(const KPoint& k, const BilayerLattice& lat);

/// Mixing amplitudes with sin²+cos²=1; throws ConfigError when G == 0.
MixingAngles polariton_angles_f(double f, double eta, double G);
MixingAngles polariton_angles(const KPoint& k, const BilayerLattice& lat);

/// H(k) = [[f, G], [G, ηf]].
Eigen::Matrix2cd bloch_kernel(const KPoint& k, const BilayerLattice& lat);

/// Uniform grid k_j = 2πj/n_k − π on both axes.
BandStructure band_structure(const BilayerLattice& lat, int n_k);

/// Half-width of the middle gap (−w, w); G for η = −1.
double middle_gap_half_width(const BilayerLattice& lat);

/// Chiral sign Λ: +(−1)^{n_x+n_y} on layer 1, −(−1)^{n_x+n_y} on layer 2.
int chiral_sign(int layer, int nx, int ny);

/// Sparse real-symmetric bath Hamiltonian of dimension 2·Lx·Ly.
Eigen::SparseMatrix<double> build_realspace_hamiltonian(
    const BilayerLattice& lat, const DisorderRealization* dis = nullptr);

/// Histogram of both bands over an n_k × n_k grid, bins spanning the band extent.
Histogram density_of_states(const BilayerLattice& lat, int n_k, int n_bins);

/// Fermi–Dirac occupation; kT = 0 gives the step (0.5 at ω = E_F).
double thermal_occupation(double omega, double E_F, double kT);

/// cos(2πj/n) for j < n with c[n−j] = c[j] and c[j+n/2] = −c[j] holding exactly
/// (the latter for even n). Grid points are k_j = 2πj/n.
std::vector<double> periodic_cosine_table(int n);

} // namespace bilayer
