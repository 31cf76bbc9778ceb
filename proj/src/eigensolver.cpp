// eigensolver.cpp — shift-invert Lanczos with full reorthogonalization

#include "bilayer/eigensolver.hpp"

#include "bilayer/errors.hpp"
#include "bilayer/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bilayer {

Eigen::VectorXd lanczos_random_start(Eigen::Index n, std::uint64_t key) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = counter_symmetric(key, 0, static_cast<std::uint64_t>(i), 1.0);
    return v / v.norm();
}

EigenPairs shift_invert_lanczos(const Eigen::SparseMatrix<double>& H, double sigma,
                                const Eigen::VectorXd& start, const LanczosOptions& opts) {
    const Eigen::Index n = H.rows();
    if (H.cols() != n || start.size() != n) {
        throw ConfigError("dimension_mismatch", "Lanczos operator and start vector sizes differ");
    }
    if (opts.nev < 1) throw ConfigError("bad_nev", "nev must be >= 1");
    const double start_norm = start.norm();
    if (!(start_norm > 0.0)) throw ConfigError("zero_start", "Lanczos start vector is zero");

    Eigen::SparseMatrix<double> A = H;
    for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma;
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
        throw NumericalError("factorization_failed",
                             "sparse LU of (H - sigma I) failed; sigma may coincide with an eigenvalue");
    }

    const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.max_iter, n));
    Eigen::MatrixXd V(n, m_max + 1);
    std::vector<double> alpha, beta;
    V.col(0) = start / start_norm;

    Eigen::VectorXd theta;
    Eigen::MatrixXd Y;
    std::vector<int> order;
    int m = 0;
    bool converged = false;

    auto ritz = [&](int k) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues();
        Y = es.eigenvectors();
        order.resize(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });
    };

    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXd w = lu.solve(V.col(j));
        const double a = V.col(j).dot(w);
        alpha.push_back(a);
        // Two passes of classical Gram–Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
            w.noalias() -= V.leftCols(j + 1) * h;
        }
        const double b = w.norm();
        m = j + 1;
        const bool check = (m >= opts.nev && (m % 4 == 0)) || m == m_max;
        bool breakdown = false;
        if (b <= 1e-14 * std::max(1.0, std::abs(a))) breakdown = true;
        if (check || breakdown) {
            ritz(m);
            const int want = std::min(opts.nev, m);
            int good = 0;
            for (int q = 0; q < want; ++q) {
                const int idx = order[static_cast<std::size_t>(q)];
                const double res = b * std::abs(Y(m - 1, idx));
                if (res <= opts.tol * std::abs(theta[idx])) ++good;
            }
            if (breakdown || good == want) {
                converged = true;
                break;
            }
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;
    }
    if (theta.size() != m) ritz(m);

    const int want = std::min(opts.nev, m);
    EigenPairs out;
    out.iterations = m;
    out.converged = converged;
    out.vectors.resize(n, want);
    out.values.resize(static_cast<std::size_t>(want));
    out.residuals.resize(static_cast<std::size_t>(want));
    for (int q = 0; q < want; ++q) {
        const int idx = order[static_cast<std::size_t>(q)];
        Eigen::VectorXd v = V.leftCols(m) * Y.col(idx);
        v /= v.norm();
        const Eigen::VectorXd Hv = H * v;
        const double lambda = v.dot(Hv);
        out.vectors.col(q) = v;
        out.values[static_cast<std::size_t>(q)] = lambda;
        out.residuals[static_cast<std::size_t>(q)] = (Hv - lambda * v).norm();
    }
    // Re-sort by distance of the Rayleigh quotient from sigma.
    std::vector<int> perm(static_cast<std::size_t>(want));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return std::abs(out.values[a] - sigma) < std::abs(out.values[b] - sigma);
    });
    EigenPairs sorted = out;
    for (int q = 0; q < want; ++q) {
        sorted.values[q] = out.values[perm[q]];
        sorted.residuals[q] = out.residuals[perm[q]];
        sorted.vectors.col(q) = out.vectors.col(perm[q]);
    }
    return sorted;
}

} // namespace bilayer
