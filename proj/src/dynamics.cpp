// dynamics.cpp — Lindblad evolution of the star protocol (Dormand–Prince RK45)

#include "bilayer/dynamics.hpp"

#include "bilayer/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bilayer {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
constexpr std::complex<double> I{0.0, 1.0};

int dimension(int n_spokes, StateSpace space) {
    return space == StateSpace::reduced ? n_spokes + 2 : (1 << (n_spokes + 1));
}

void check_space(int n_spokes, StateSpace space) {
    if (space == StateSpace::full && n_spokes > 4) {
        throw ConfigError("full_space_too_large", "full state space is only supported for n_spokes <= 4");
    }
}

std::vector<int> spoke_map(int n, const std::vector<int>& perm) {
    if (perm.empty()) {
        std::vector<int> id(static_cast<std::size_t>(n));
        std::iota(id.begin(), id.end(), 0);
        return id;
    }
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(sorted.size()) != n || sorted[static_cast<std::size_t>(i)] != i) {
            throw ConfigError("bad_permutation", "spoke permutation must be a permutation of 0..n-1");
        }
    }
    return perm;
}

/// Basis index of "spoke i excited" (i = 0..n−1) and "auxiliary excited".
int sector_spoke(int i) { return 2 + i; }
int full_spoke(int i) { return 1 << (i + 1); }

struct Model {
    Mat H;
    std::vector<Mat> jumps;
    Mat K;  // Σ L†L
    double Gamma = 0.0;
    Vec goal;
    Eigen::VectorXd number;  // diagonal of N_exc
    StateSpace space = StateSpace::reduced;
};

Mat star_hamiltonian(int n, double J, StateSpace space, const std::vector<int>& map) {
    const int d = dimension(n, space);
    Mat H = Mat::Zero(d, d);
    if (space == StateSpace::reduced) {
        for (int i = 0; i < n; ++i) {
            const int s = sector_spoke(map[static_cast<std::size_t>(i)]);
            H(1, s) += J;
            H(s, 1) += J;
        }
        return H;
    }
    // σ_a† σ_i maps basis b with bit i set and bit a clear to b ^ bit_i ^ bit_a.
    for (int b = 0; b < d; ++b) {
        for (int i = 0; i < n; ++i) {
            const int bit_i = full_spoke(map[static_cast<std::size_t>(i)]);
            if ((b & bit_i) && !(b & 1)) {
                const int c = (b ^ bit_i) | 1;
                H(c, b) += J;
                H(b, c) += J;
            }
        }
    }
    return H;
}

Model make_model(const EntangleSetup& s, StateSpace space, const std::vector<int>& perm) {
    check_space(s.n_spokes, space);
    const int n = s.n_spokes;
    const int d = dimension(n, space);
    const std::vector<int> map = spoke_map(n, perm);
    Model m;
    m.space = space;
    m.Gamma = s.Gamma;
    m.H = star_hamiltonian(n, s.J_eff, space, map);
    m.K = Mat::Zero(d, d);
    m.number = Eigen::VectorXd::Zero(d);
    if (space == StateSpace::reduced) {
        for (int q = 1; q < d; ++q) {
            Mat L = Mat::Zero(d, d);
            L(0, q) = 1.0;
            m.jumps.push_back(L);
            m.number[q] = 1.0;
        }
    } else {
        for (int q = 0; q <= n; ++q) {
            Mat L = Mat::Zero(d, d);
            for (int b = 0; b < d; ++b) {
                if (b & (1 << q)) L(b ^ (1 << q), b) = 1.0;
            }
            m.jumps.push_back(L);
        }
        for (int b = 0; b < d; ++b) m.number[b] = std::popcount(static_cast<unsigned>(b));
    }
    for (const auto& L : m.jumps) m.K += L.adjoint() * L;
    m.goal = goal_state(n, space);
    return m;
}

Mat lindbladian(const Model& m, const Mat& rho) {
    Mat out = -I * (m.H * rho - rho * m.H);
    if (m.Gamma > 0.0) {
        out -= 0.5 * m.Gamma * (m.K * rho + rho * m.K);
        for (const auto& L : m.jumps) out += m.Gamma * (L * rho * L.adjoint());
    }
    return out;
}

double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

/// Dormand–Prince 5(4) with FSAL; advances rho from t0 to t1 exactly.
class Integrator {
public:
    Integrator(const Model& m, const IntegratorOptions& o) : m_(m), o_(o) {}

    void advance(Mat& rho, double t0, double t1, double& h, int& accepted, int& rejected) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        (void)c2; (void)c3; (void)c4; (void)c5;  // autonomous system
        double t = t0;
        Mat k1 = lindbladian(m_, rho);
        int guard = 0;
        while (t < t1) {
            if (++guard > 10'000'000) throw NumericalError("integration_error", "step limit exceeded");
            bool last = false;
            if (t + h >= t1) {
                h = t1 - t;
                last = true;
            }
            const Mat k2 = lindbladian(m_, rho + h * (a21 * k1));
            const Mat k3 = lindbladian(m_, rho + h * (a31 * k1 + a32 * k2));
            const Mat k4 = lindbladian(m_, rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Mat k5 = lindbladian(m_, rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Mat k6 = lindbladian(m_, rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Mat y5 = rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Mat k7 = lindbladian(m_, y5);
            const Mat err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = 0.0;
            for (Eigen::Index i = 0; i < err.size(); ++i) {
                const double sc = o_.atol + o_.rtol * std::max(std::abs(rho(i)), std::abs(y5(i)));
                en = std::max(en, std::abs(err(i)) / sc);
            }
            if (!std::isfinite(en)) throw NumericalError("integration_error", "non-finite error estimate");
            if (en <= 1.0) {
                t = last ? t1 : t + h;
                rho = y5;
                k1 = k7;
                ++accepted;
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                if (!last) h *= fac;
                else h = std::max(h, h * fac);
            } else {
                ++rejected;
                h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
                if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                    throw NumericalError("integration_error",
                                         fmt::format("step size underflow at t = {} (error norm {})", t, en));
                }
            }
        }
    }

private:
    const Model& m_;
    const IntegratorOptions& o_;
};

Mat density(const Vec& psi) { return psi * psi.adjoint(); }

void check_initial(const Vec& psi, int d) {
    if (psi.size() != d) {
        throw ConfigError("dimension_mismatch",
                          fmt::format("initial state has dimension {}, expected {}", psi.size(), d));
    }
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("not_normalized", "initial state must be normalized");
}

double initial_step(const EntangleSetup& s) {
    const double rate = std::max(std::abs(s.J_eff) * std::sqrt(static_cast<double>(s.n_spokes)), s.Gamma);
    return rate > 0.0 ? 0.01 / rate : 0.1;
}

Mat evolve_to(const EntangleSetup& s, double t, const IntegratorOptions& opts, const Model& m) {
    Mat rho = density(protocol_initial_state(s.n_spokes, opts.space));
    double h = initial_step(s);
    int acc = 0, rej = 0;
    Integrator integ(m, opts);
    if (t > 0.0) integ.advance(rho, 0.0, t, h, acc, rej);
    return rho;
}

double fidelity_of(const Model& m, const Mat& rho) { return (m.goal.adjoint() * rho * m.goal)(0, 0).real(); }

double slope_of(const Model& m, const Mat& rho) {
    return (m.goal.adjoint() * lindbladian(m, rho) * m.goal)(0, 0).real();
}

} // namespace

void EntangleSetup::validate() const {
    if (n_spokes < 1) throw ConfigError("bad_n_spokes", "n_spokes must be >= 1");
    if (!(Gamma >= 0.0) || !std::isfinite(Gamma)) throw ConfigError("bad_gamma", "Gamma must be finite and >= 0");
    if (!std::isfinite(J_eff)) throw ConfigError("non_finite_parameter", "J_eff must be finite");
    if (!t_grid.empty()) {
        if (t_grid.front() != 0.0) throw ConfigError("bad_time_grid", "t_grid must start at 0");
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            if (!(t_grid[i] > t_grid[i - 1])) throw ConfigError("bad_time_grid", "t_grid must be strictly increasing");
        }
    }
}

Eigen::MatrixXcd build_star_hamiltonian(const EntangleSetup& s) {
    s.validate();
    if (s.n_spokes > 12) throw ConfigError("full_space_too_large", "full Hamiltonian limited to n_spokes <= 12");
    return star_hamiltonian(s.n_spokes, s.J_eff, StateSpace::full, spoke_map(s.n_spokes, {}));
}

Eigen::MatrixXcd build_star_hamiltonian_sector(const EntangleSetup& s) {
    s.validate();
    return star_hamiltonian(s.n_spokes, s.J_eff, StateSpace::reduced, spoke_map(s.n_spokes, {}));
}

Eigen::MatrixXcd excitation_operator(int n_spokes) {
    const int d = 1 << (n_spokes + 1);
    Mat N = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) N(b, b) = std::popcount(static_cast<unsigned>(b));
    return N;
}

Eigen::VectorXcd protocol_initial_state(int n_spokes, StateSpace space) {
    check_space(n_spokes, space);
    Vec psi = Vec::Zero(dimension(n_spokes, space));
    psi[1] = 1.0;  // reduced: |a⟩ is index 1; full: bit 0 set is index 1
    return psi;
}

Eigen::VectorXcd goal_state(int n_spokes, StateSpace space) {
    check_space(n_spokes, space);
    Vec psi = Vec::Zero(dimension(n_spokes, space));
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_spokes));
    for (int i = 0; i < n_spokes; ++i) {
        psi[space == StateSpace::reduced ? sector_spoke(i) : full_spoke(i)] = amp;
    }
    return psi;
}

LindbladResult lindblad_evolve(const EntangleSetup& s, const Eigen::VectorXcd& initial,
                               const IntegratorOptions& opts) {
    s.validate();
    if (s.t_grid.empty()) throw ConfigError("bad_time_grid", "t_grid must not be empty");
    const Model m = make_model(s, opts.space, opts.spoke_permutation);
    check_initial(initial, static_cast<int>(m.H.rows()));
    Mat rho = density(initial);
    LindbladResult r;
    double h = initial_step(s);
    Integrator integ(m, opts);
    double t = 0.0;
    for (double target : s.t_grid) {
        if (target > t) integ.advance(rho, t, target, h, r.steps_accepted, r.steps_rejected);
        t = target;
        const double tr = rho.trace().real();
        const double dev = std::abs(tr - 1.0);
        if (dev > opts.max_trace_drift) {
            throw NumericalError("integration_error",
                                 fmt::format("trace drifted to {} at t = {}", tr, t));
        }
        r.times.push_back(t);
        r.fidelity.push_back(fidelity_of(m, rho));
        r.excitation.push_back((m.number.cast<std::complex<double>>().asDiagonal() * rho).trace().real());
        r.trace_dev.push_back(dev);
        r.purity.push_back((rho * rho).trace().real());
        r.hermiticity_dev.push_back(max_abs(rho - rho.adjoint()));
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        r.min_eigenvalue.push_back(es.eigenvalues()[0]);
        double outside = 0.0;
        if (opts.space == StateSpace::full) {
            for (Eigen::Index b = 0; b < rho.rows(); ++b) {
                if (m.number[b] >= 2.0) outside += rho(b, b).real();
            }
        }
        r.outside_sector.push_back(outside);
    }
    return r;
}

std::pair<double, double> fidelity_and_slope(const EntangleSetup& s, double t, const IntegratorOptions& opts) {
    s.validate();
    if (t < 0.0) throw ConfigError("bad_time", "t must be >= 0");
    const Model m = make_model(s, opts.space, opts.spoke_permutation);
    const Mat rho = evolve_to(s, t, opts, m);
    return {fidelity_of(m, rho), slope_of(m, rho)};
}

OptimalTime fidelity_at_optimal_time(const EntangleSetup& s_in, const IntegratorOptions& opts) {
    EntangleSetup s = s_in;
    s.t_grid.clear();
    s.validate();
    if (!(std::abs(s.J_eff) > 0.0)) throw NumericalError("protocol_failure", "J_eff = 0: no exchange dynamics");
    const double J = std::abs(s.J_eff);
    OptimalTime out;
    out.t_analytic = std::numbers::pi / (2.0 * std::sqrt(static_cast<double>(s.n_spokes)) * J);
    out.t_quarter = std::numbers::pi / (4.0 * J);
    const Model m = make_model(s, opts.space, opts.spoke_permutation);

    // Coarse scan for the first local maximum.
    const double horizon = 10.0 / J;
    const double step = out.t_analytic / 20.0;
    EntangleSetup scan = s;
    for (double t = 0.0; t <= horizon; t += step) scan.t_grid.push_back(t);
    const LindbladResult coarse = lindblad_evolve(scan, protocol_initial_state(s.n_spokes, opts.space), opts);
    std::size_t peak = 0;
    for (std::size_t i = 1; i + 1 < coarse.fidelity.size(); ++i) {
        if (coarse.fidelity[i] >= coarse.fidelity[i - 1] && coarse.fidelity[i] > coarse.fidelity[i + 1]) {
            peak = i;
            break;
        }
    }
    if (peak == 0) throw NumericalError("protocol_failure", "no fidelity maximum before 10 / J_eff");

    auto F = [&](double t) { return fidelity_of(m, evolve_to(s, t, opts, m)); };
    auto dF = [&](double t) { return slope_of(m, evolve_to(s, t, opts, m)); };

    // Golden-section refinement on F.
    double a = coarse.times[peak - 1];
    double b = coarse.times[peak + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = F(x1), f2 = F(x2);
    for (int it = 0; it < 40 && (b - a) > 1e-9 * b; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = F(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = F(x1);
        }
    }
    // Polish on dF/dt = 0 (Illinois false position inside a sign-changing bracket).
    double lo = a, hi = b;
    double slo = dF(lo), shi = dF(hi);
    double widen = (b - a);
    for (int k = 0; k < 20 && !(slo > 0.0 && shi < 0.0); ++k) {
        widen *= 2.0;
        lo = std::max(0.0, a - widen);
        hi = b + widen;
        slo = dF(lo);
        shi = dF(hi);
    }
    double t_star = 0.5 * (a + b);
    if (slo > 0.0 && shi < 0.0) {
        int side = 0;
        for (int it = 0; it < 100; ++it) {
            const double t = (lo * shi - hi * slo) / (shi - slo);
            const double st = dF(t);
            t_star = t;
            if (st == 0.0 || (hi - lo) < 1e-13 * hi) break;
            if (st > 0.0) {
                lo = t;
                slo = st;
                if (side == 1) shi *= 0.5;
                side = 1;
            } else {
                hi = t;
                shi = st;
                if (side == -1) slo *= 0.5;
                side = -1;
            }
            if (std::abs(st) < 1e-14 * J) break;
        }
    }
    out.t_star = t_star;
    out.F_max = F(t_star);
    out.F_at_quarter = F(out.t_quarter);
    return out;
}

} // namespace bilayer
