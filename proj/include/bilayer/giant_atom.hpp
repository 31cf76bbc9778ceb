// giant_atom.hpp — multi-point emitters: interference factors, superposed profiles, chirality

#pragma once

#include "bilayer/bound_state.hpp"

#include <vector>

namespace bilayer {

/// I(k) = Σ_p g_p exp(i k·n_p) over the given points (layers ignored).
cd interference_factor(const std::vector<CouplingPoint>& points, const KPoint& k);

/// True when every point sits on the same Λ-sublattice, so the odd-neighbor
/// structure of each small-atom profile survives the superposition.
bool even_neighbor(const std::vector<CouplingPoint>& points);

struct GiantOptions {
    bool allow_parity_violation = false;
};

/// Superposed bound state of a giant atom at Δ = 0 (quadrature, per-point
/// components retained).
BoundStateSolution giant_bs_profile(const EmitterConfig& em, const BilayerLattice& lat, int n_k,
                                    const GiantOptions& opts = {});

/// Coupling-point sets used by the figures.
std::vector<CouplingPoint> two_point_diagonal(double g);
std::vector<CouplingPoint> four_point_diagonal(double g);  // signs (+,−,−,+) on (±1,±1)
std::vector<CouplingPoint> cross_points(double g);          // (±1,0), (0,±1)
std::vector<CouplingPoint> two_layer_pair(double g);        // (0,0) layer 1, (1,0) layer 2

/// Sites on the line n_x = n_y + offset with n_y in [t_min, t_max].
struct LineSpec {
    int offset = 1;
    int t_min = -15;
    int t_max = 15;
    int layer = 1;
};

struct PhaseSample {
    int nx = 0, ny = 0;
    double amplitude = 0.0;  // real field value
    double A = 0.0, B = 0.0; // magnitudes of the two contributions
    double theta1 = 0.0, theta2 = 0.0;
    double delta_theta = 0.0;  // θ1 − θ2 snapped to {0, π}
};

/// Decomposes the field on a line into the two per-point contributions.
std::vector<PhaseSample> phase_profile(const BoundStateSolution& sol, const LineSpec& line);

/// Indices i where delta_theta changes between samples i−1 and i.
std::vector<std::size_t> phase_jumps(const std::vector<PhaseSample>& samples);

struct ChiralityReport {
    std::size_t jump_index = 0;  // first sample on the right side
    double left_norm = 0.0;      // Σ amplitude² before the jump
    double right_norm = 0.0;     // Σ amplitude² from the jump on
    double ratio = 0.0;          // max(left, right) / min(left, right)
};

/// Requires exactly one jump.
ChiralityReport chirality(const std::vector<PhaseSample>& samples);

/// Squared field weight of sites within perpendicular distance 1 of the
/// diagonal through the point-set centre, with diagonal step t in [t0, t1]
/// along ±dir (dir = (1,1) or (1,−1)); both rays are included.
double branch_norm(const BoundStateSolution& sol, int dir_x, int dir_y, int t0 = 5, int t1 = 15);

/// Suppressed / enhanced ratio of the two diagonal branches.
double branch_ratio(const BoundStateSolution& sol, int t0 = 5, int t1 = 15);

/// Fraction of the photonic weight outside the (2h+1)×(2h+1) window centred at
/// the rounded point-set centre.
double outside_window_fraction(const BoundStateSolution& sol, int h);

} // namespace bilayer
