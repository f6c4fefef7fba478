#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "npplab/errors.hpp"

namespace npplab {

// ---------------------------------------------------------------------------
// Entropy utilities (bits).
// ---------------------------------------------------------------------------

// h(p) = -p log2 p - (1-p) log2(1-p), with h(0) = h(1) = 0 by continuity.
inline double binary_entropy(double p) {
    require(p >= 0.0 && p <= 1.0, "binary_entropy: p must lie in [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Inverse of h restricted to [0, 1/2]; bisection to 1e-12 absolute.
inline double entropy_inverse(double y) {
    require(y >= 0.0 && y <= 1.0, "entropy_inverse: y must lie in [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 0.5;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Left side of the m-tuple first-moment condition,
// 1 + (m-1) h((1-beta+eta)/2) - eps m, in bits per n. Negative certifies
// that the expected number of band-constrained m-tuples decays.
inline double first_moment_exponent(double eps, double m, double beta, double eta) {
    require(eta > 0.0 && eta < beta && beta < 1.0,
            "first_moment_exponent: need 0 < eta < beta < 1");
    require(m >= 2.0, "first_moment_exponent: need m >= 2");
    require(eps > 0.0 && eps <= 1.0, "first_moment_exponent: eps must lie in (0,1]");
    return 1.0 + (m - 1.0) * binary_entropy((1.0 - beta + eta) / 2.0) - eps * m;
}

// Smallest rho in (0,1) with 1 + h((1-rho)/2) - 2 eps <= 0, i.e. the left
// edge of the forbidden pair-overlap band: rho = 1 - 2 h^{-1}(2 eps - 1).
// Only defined for eps > 1/2.
inline double two_ogp_rho(double eps) {
    require(eps > 0.5 && eps <= 1.0, "two_ogp_rho: eps must lie in (1/2, 1]");
    return 1.0 - 2.0 * entropy_inverse(2.0 * eps - 1.0);
}

// ---------------------------------------------------------------------------
// Overlap-gap parameter schedules.
// ---------------------------------------------------------------------------

// Parameters of the super-constant m-tuple schedule:
//   m = 2n/E_n,  beta = 1 - 2 g(n)/E_n,  eta = g(n)/(2n).
struct OgpParameters {
    double n = 0.0;
    double E_n = 0.0;
    double m = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double g_n = 0.0;
    double nu_n = 0.0;  // g_n / E_n
    std::vector<std::string> growth_warnings;
};

// The growth conditions on g (super-constant, o(E_n^2 / (n log2 n))) are
// asymptotic; at a single n they become warning flags, never errors.
inline OgpParameters superconstant_schedule(double n, double E_n, double g_n) {
    require(n >= 2.0, "superconstant_schedule: n must be >= 2");
    require(E_n > 0.0 && E_n < n, "superconstant_schedule: need E_n in (0, n)");
    require(g_n > 0.0 && g_n < E_n / 2.0, "superconstant_schedule: need g_n in (0, E_n/2)");
    OgpParameters p;
    p.n = n;
    p.E_n = E_n;
    p.g_n = g_n;
    p.m = 2.0 * n / E_n;
    p.beta = 1.0 - 2.0 * g_n / E_n;
    p.eta = g_n / (2.0 * n);
    p.nu_n = g_n / E_n;
    if (g_n < 1.0)
        p.growth_warnings.push_back("g(n) < 1: not plausibly super-constant at this n");
    const double upper = E_n * E_n / (n * std::log2(n));
    if (g_n >= upper)
        p.growth_warnings.push_back("g(n) >= E_n^2/(n log2 n): violates the o(.) bound at this n");
    if (n * p.eta < 1.0)
        p.growth_warnings.push_back("n*eta < 1: overlap band contains no integer inner product");
    return p;
}

// g(n) = n (E_n/n)^{2 + eps/8}, the special-case slack driving the planner.
inline double planner_g(double n, double E_n, double eps) {
    return n * std::pow(E_n / n, 2.0 + eps / 8.0);
}

// ---------------------------------------------------------------------------
// Covariance construction and small dense symmetric eigenvalues.
// ---------------------------------------------------------------------------

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity_matrix(std::size_t m) {
    Matrix I(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) I[i][i] = 1.0;
    return I;
}

// Sigma with unit diagonal and off-diagonals rho_ij gamma_i gamma_j. Built
// twice, directly and as A Sigma_bar A + (I - A^2) with A = diag(gamma);
// the routes must agree entrywise to 1e-14.
inline Matrix build_covariance(const Matrix& overlaps, const std::vector<double>& gammas) {
    const std::size_t m = overlaps.size();
    require(m >= 1 && m <= 64, "build_covariance: need 1 <= m <= 64");
    require(gammas.size() == m, "build_covariance: gamma count must match m");
    for (std::size_t i = 0; i < m; ++i) {
        require(overlaps[i].size() == m, "build_covariance: overlaps must be m x m");
        require(overlaps[i][i] == 1.0, "build_covariance: overlaps need a unit diagonal");
        for (std::size_t j = 0; j < m; ++j)
            require(overlaps[i][j] == overlaps[j][i], "build_covariance: overlaps must be symmetric");
        require(gammas[i] >= 0.0 && gammas[i] <= 1.0, "build_covariance: gammas must lie in [0,1]");
    }
    Matrix direct(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            direct[i][j] = (i == j) ? 1.0 : overlaps[i][j] * gammas[i] * gammas[j];

    Matrix route2(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            route2[i][j] = gammas[i] * overlaps[i][j] * gammas[j] +
                           ((i == j) ? 1.0 - gammas[i] * gammas[i] : 0.0);

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            require(std::abs(direct[i][j] - route2[i][j]) <= 1e-14,
                    "build_covariance: construction routes disagree");
    return direct;
}

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
// until the off-diagonal Frobenius norm falls below 1e-12. Ascending order.
inline std::vector<double> symmetric_eigenvalues(Matrix a) {
    const std::size_t m = a.size();
    require(m >= 1 && m <= 64, "symmetric_eigenvalues: need 1 <= m <= 64");
    for (std::size_t i = 0; i < m; ++i) {
        require(a[i].size() == m, "symmetric_eigenvalues: matrix must be square");
        for (std::size_t j = i + 1; j < m; ++j)
            require(std::abs(a[i][j] - a[j][i]) <= 1e-12,
                    "symmetric_eigenvalues: matrix must be symmetric");
    }
    const auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) s += 2.0 * a[i][j] * a[i][j];
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off_norm() > 1e-12; ++sweep) {
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                if (std::abs(a[p][q]) <= 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double apq = a[p][q], app = a[p][p], aqq = a[q][q];
                a[p][q] = a[q][p] = 0.0;
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                for (std::size_t r = 0; r < m; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
                    a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
                }
            }
        }
    }
    std::vector<double> eig(m);
    for (std::size_t i = 0; i < m; ++i) eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

inline double min_eigenvalue(const Matrix& a) { return symmetric_eigenvalues(a).front(); }

// ---------------------------------------------------------------------------
// Binomial and Ramsey bounds, log2 domain.
// ---------------------------------------------------------------------------

// log2 C(n, k) via log-gamma differences.
inline double log2_binomial(double n, double k) {
    require(k >= 0.0 && n >= 0.0, "log2_binomial: arguments must be nonnegative");
    require(k <= n, "log2_binomial: need k <= n");
    constexpr double inv_ln2 = 1.4426950408889634074;
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) * inv_ln2;
}

enum class RamseyKind { TwoColor, Multicolor };

// log2 of the classical upper bounds: R(k,l) <= C(k+l-2, k-1) and
// R_q(m) <= q^{qm}.
inline double ramsey_upper(RamseyKind kind, double first, double second) {
    require(first >= 2.0 && second >= 2.0, "ramsey_upper: arguments must be >= 2");
    if (kind == RamseyKind::TwoColor) return log2_binomial(first + second - 2.0, first - 1.0);
    return second * first * std::log2(first);  // q^(q m), (first, second) = (q, m)
}

// ---------------------------------------------------------------------------
// Stable-algorithm failure planner.
// ---------------------------------------------------------------------------

// Every quantity the failure theorem pins down for a concrete (n, E_n, eps, L).
// T is doubly exponential; it and the probability bounds are only ever
// represented in log2 / log2 log2 form, so log2_T, log2_pf, log2_pst may be
// +-infinity while log2_log2_T stays finite.
struct PlanReport {
    double n = 0.0, E_n = 0.0, eps = 0.0, L = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double g_n = 0.0, m = 0.0, beta = 0.0, eta = 0.0;
    double C1 = 0.0;             // stability offset per spin: f = C1 n
    double f = 0.0;              // C1 * n
    double Q = 0.0;              // interpolation grid size (integer valued)
    double rho_prime = 0.0;      // 1 - 1/Q
    double log2_log2_T = 0.0;    // 4 m Q log2 Q
    double log2_T = 0.0;         // 2^(log2_log2_T), often +inf
    double log2_pf = 0.0;        // -log2(4 T (Q+1)), often -inf
    double log2_pst = 0.0;       // -log2(9 T Q^2), often -inf
    double step_stability_bound = 0.0;  // 4 sqrt(C1) + 48 sqrt(2L)/sqrt(Q)
};

inline PlanReport plan_theorem_main(double n, double E_n, double eps, double L) {
    require(eps > 0.0 && eps < 0.2, "plan_theorem_main: eps must lie in (0, 1/5)");
    require(E_n > 0.0 && E_n < n, "plan_theorem_main: need E_n in (0, n)");
    require(L > 0.0, "plan_theorem_main: need L > 0");
    PlanReport r;
    r.n = n;
    r.E_n = E_n;
    r.eps = eps;
    r.L = L;
    r.c1 = 1.0 / 6400.0;
    r.c2 = 8.0 * 480.0 * 480.0;
    r.g_n = planner_g(n, E_n, eps);
    const OgpParameters sched = superconstant_schedule(n, E_n, r.g_n);
    r.m = sched.m;
    r.beta = sched.beta;
    r.eta = sched.eta;
    r.C1 = r.c1 * std::pow(E_n / n, 4.0 + eps / 4.0);
    r.f = r.C1 * n;
    // The [0,1] interpolation grid needs an integer cell count; rounding up
    // only refines it, and makes 1 - 1/Q the exact minimum of the step
    // correlations over the grid.
    r.Q = std::ceil(2.0 * 480.0 * 480.0 * L / (r.eta * r.eta));
    r.rho_prime = 1.0 - 1.0 / r.Q;
    r.log2_log2_T = 4.0 * r.m * r.Q * std::log2(r.Q);
    r.log2_T = std::exp2(r.log2_log2_T);
    r.log2_pf = -(2.0 + std::log2(r.Q + 1.0) + r.log2_T);
    r.log2_pst = -(std::log2(9.0) + 2.0 * std::log2(r.Q) + r.log2_T);
    r.step_stability_bound = 4.0 * std::sqrt(r.C1) + 48.0 * std::sqrt(2.0 * L) / std::sqrt(r.Q);
    return r;
}

}  // namespace npplab
