// eigensolver.hpp — interior eigenpairs of sparse symmetric matrices
//
// Shift-invert Lanczos: factor (H − σI) once with a sparse LU, run Lanczos on
// (H − σI)^{-1} with full reorthogonalization, and report the Ritz pairs
// closest to σ. Energies are Rayleigh quotients of H itself.
//
// A single-vector Krylov space sees one direction per eigenspace: the
// component of the start vector. Starting from a unit vector e therefore
// returns, inside every degenerate eigenspace, the normalized projection of e,
// which is the vector of maximal overlap with e in that subspace.

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace bilayer {

struct LanczosOptions {
    int nev = 6;            // Ritz pairs wanted
    int max_iter = 400;     // Krylov dimension cap
    double tol = 1e-13;     // relative Ritz residual in the inverted operator
};

struct EigenPairs {
    std::vector<double> values;     // sorted by |value − σ|
    Eigen::MatrixXd vectors;        // columns, unit norm
    std::vector<double> residuals;  // ‖H v − λ v‖
    int iterations = 0;
    bool converged = false;
};

EigenPairs shift_invert_lanczos(const Eigen::SparseMatrix<double>& H, double sigma,
                                const Eigen::VectorXd& start,
                                const LanczosOptions& opts = {});

/// Deterministic pseudo-random start vector (counter-based, fixed key).
Eigen::VectorXd lanczos_random_start(Eigen::Index n, std::uint64_t key = 0x5eed);

} // namespace bilayer
