// dynamics.hpp — star-coupled entanglement protocol under emitter decay
//
// H = J_eff (σ_a† Σ_i σ_i + h.c.) with Lindblad decay Γ on every emitter.
// Reduced mode works in the (vacuum ⊕ single-excitation) sector, basis
// {|vac⟩, |a⟩, |1⟩ … |n⟩}; full mode uses all 2^(n+1) states with qubit 0 the
// auxiliary atom (bit q of the basis index set = qubit q excited).

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bilayer {

struct EntangleSetup {
    int n_spokes = 8;
    double J_eff = 1.0;
    double Gamma = 0.0;
    std::vector<double> t_grid;

    void validate() const;
};

enum class StateSpace { reduced, full };

/// Full-space Hamiltonian on n_spokes + 1 two-level systems (dimension 2^(n+1)).
Eigen::MatrixXcd build_star_hamiltonian(const EntangleSetup& s);

/// Same operator restricted to the vacuum ⊕ single-excitation sector.
Eigen::MatrixXcd build_star_hamiltonian_sector(const EntangleSetup& s);

/// Total excitation number operator in the full space (diagonal).
Eigen::MatrixXcd excitation_operator(int n_spokes);

struct LindbladResult {
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<double> excitation;
    std::vector<double> trace_dev;
    std::vector<double> purity;
    std::vector<double> hermiticity_dev;
    std::vector<double> min_eigenvalue;
    std::vector<double> outside_sector;  // population with ≥ 2 excitations (full mode)
    int steps_accepted = 0;
    int steps_rejected = 0;
};

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_trace_drift = 1e-6;
    StateSpace space = StateSpace::reduced;
    std::vector<int> spoke_permutation;  // optional relabelling of spokes in the initial state
};

/// Initial state |e⟩_a |g⟩^⊗n in the chosen space.
Eigen::VectorXcd protocol_initial_state(int n_spokes, StateSpace space);

/// Goal state |g⟩_a ⊗ W_n in the chosen space.
Eigen::VectorXcd goal_state(int n_spokes, StateSpace space);

LindbladResult lindblad_evolve(const EntangleSetup& s, const Eigen::VectorXcd& initial,
                               const IntegratorOptions& opts = {});

struct OptimalTime {
    double t_star = 0.0;       // first local maximum of F(t)
    double F_max = 0.0;
    double t_analytic = 0.0;   // π / (2 √n J_eff)
    double t_quarter = 0.0;    // π / (4 J_eff)
    double F_at_quarter = 0.0;
};

OptimalTime fidelity_at_optimal_time(const EntangleSetup& s, const IntegratorOptions& opts = {});

/// Evolves to a single time and returns F(t) and dF/dt there.
std::pair<double, double> fidelity_and_slope(const EntangleSetup& s, double t,
                                             const IntegratorOptions& opts = {});

} // namespace bilayer
