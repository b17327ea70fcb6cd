#pragma once

// Exact and semi-exact evaluators: gamma-product formulas for the Selberg and
// Morris integrals, the 3F2 series at unit argument, closed-form low moments
// of the limit log-Poisson measure, and joint-moment identities.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "logid/errors.hpp"
#include "logid/levy.hpp"

namespace logid {

/// A positive product of gamma factors, tracked in log space so that values
/// beyond double range still report a finite, correct log_value.
struct GammaProductResult {
    double log_value = 0.0;
    double value = 1.0; // exp(log_value); +inf once past double range
};

/// ln Gamma(x) for x > 0. Absolute error <= 1e-13 on [0.5, 50].
inline double log_gamma(double x) {
    if (x > 0.0) return std::lgamma(x);
    if (x == std::nearbyint(x))
        throw std::domain_error("log_gamma: pole at nonpositive integer " + std::to_string(x));
    throw std::domain_error("log_gamma: argument must be > 0, got " + std::to_string(x));
}

namespace detail {
inline double gamma_arg_checked(double x, const char* factor) {
    if (!(x > 0.0))
        throw std::domain_error(std::string("gamma factor ") + factor + " has nonpositive argument " +
                                std::to_string(x) + " (parameters outside the convergence region)");
    return std::lgamma(x);
}
} // namespace detail

/// Classical Selberg product over the unit cube [0,1]^N:
///   prod_{k=0}^{N-1} G(1+(k+1)L) G(1+L1+kL) G(1+L2+kL) / (G(1+L) G(2+L1+L2+(N+k-1)L)).
inline GammaProductResult selberg_product(int N, double lambda, double lambda1, double lambda2) {
    if (N < 1) throw std::invalid_argument("selberg_product: N must be >= 1");
    double lv = 0.0;
    for (int k = 0; k < N; ++k) {
        lv += detail::gamma_arg_checked(1.0 + (k + 1) * lambda, "Gamma(1+(k+1)lambda)");
        lv += detail::gamma_arg_checked(1.0 + lambda1 + k * lambda, "Gamma(1+lambda1+k*lambda)");
        lv += detail::gamma_arg_checked(1.0 + lambda2 + k * lambda, "Gamma(1+lambda2+k*lambda)");
        lv -= detail::gamma_arg_checked(1.0 + lambda, "Gamma(1+lambda)");
        lv -= detail::gamma_arg_checked(2.0 + lambda1 + lambda2 + (N + k - 1) * lambda,
                                        "Gamma(2+lambda1+lambda2+(N+k-1)lambda)");
    }
    return GammaProductResult{lv, std::exp(lv)};
}

/// n-th moment of the total mass of the limit lognormal measure (sigma = 1),
/// i.e. the cube-normalized Selberg value at lambda = -mu/2, lambda1 = lambda2 = 0.
inline double lognormal_moment(double mu, int n) {
    if (n < 1) throw std::invalid_argument("lognormal_moment: n must be >= 1");
    if (mu < 0.0) throw std::invalid_argument("lognormal_moment: mu must be >= 0");
    if (n == 1 || mu == 0.0) return 1.0;
    const auto fin = moment_finiteness(LevySpectrum::gaussian(1.0), mu, static_cast<double>(n));
    if (fin.verdict != FinitenessVerdict::Finite)
        throw std::domain_error("lognormal_moment: moment of order " + std::to_string(n) +
                                " is not finite at mu = " + std::to_string(mu));
    return selberg_product(n, -0.5 * mu, 0.0, 0.0).value;
}

/// Morris constant M_N(a,b,lambda).
inline GammaProductResult morris_product(int N, int a, int b, double lambda) {
    if (N < 1 || a < 0 || b < 0 || lambda < 0.0)
        throw std::invalid_argument("morris_product: need N >= 1, a,b >= 0, lambda >= 0");
    double lv = 0.0;
    for (int j = 0; j < N; ++j) {
        lv += detail::gamma_arg_checked(1.0 + a + b + lambda * j, "Gamma(1+a+b+lambda*j)");
        lv += detail::gamma_arg_checked(1.0 + lambda * (j + 1), "Gamma(1+lambda*(j+1))");
        lv -= detail::gamma_arg_checked(1.0 + a + lambda * j, "Gamma(1+a+lambda*j)");
        lv -= detail::gamma_arg_checked(1.0 + b + lambda * j, "Gamma(1+b+lambda*j)");
        lv -= detail::gamma_arg_checked(1.0 + lambda, "Gamma(1+lambda)");
    }
    return GammaProductResult{lv, std::exp(lv)};
}

namespace detail {
// sum_{j >= x} j^{-p} by Euler-Maclaurin, for p > 1 and large x.
inline double zeta_tail(double p, double x) {
    return std::pow(x, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(x, -p) +
           (p / 12.0) * std::pow(x, -p - 1.0);
}
} // namespace detail

/// 3F2(a1,a2,a3; b1,b2; 1). Terminating series (a nonpositive integer top
/// parameter) are summed exactly. Otherwise requires s = b1+b2-a1-a2-a3 > 0;
/// the terms decay like k^{-1-s}, too slowly to sum to full precision
/// directly, so after enough terms the remaining tail is added from its
/// k^{-1-s} integral estimate (two-term asymptotics of t_k k^{1+s}), driving
/// the total error below 1e-13 relative.
inline double hyp3f2_unit(double a1, double a2, double a3, double b1, double b2) {
    auto nonpos_int = [](double x) { return x <= 0.0 && x == std::nearbyint(x); };
    if (nonpos_int(b1) || nonpos_int(b2))
        throw std::domain_error("hyp3f2_unit: bottom parameter is a nonpositive integer");

    long terminate_at = -1; // index of the last nonzero term, if terminating
    for (double a : {a1, a2, a3}) {
        if (nonpos_int(a)) {
            const long k = -static_cast<long>(std::llround(a));
            terminate_at = (terminate_at < 0) ? k : std::min(terminate_at, k);
        }
    }
    if (terminate_at >= 0) {
        double term = 1.0, sum = 1.0;
        for (long k = 0; k < terminate_at; ++k) {
            const double kk = static_cast<double>(k);
            term *= (a1 + kk) * (a2 + kk) * (a3 + kk) / ((b1 + kk) * (b2 + kk) * (kk + 1.0));
            sum += term;
        }
        return sum;
    }

    const double s = b1 + b2 - a1 - a2 - a3;
    if (!(s > 0.0))
        throw std::domain_error("hyp3f2_unit: divergent series (b1+b2-a1-a2-a3 = " +
                                std::to_string(s) + " <= 0)");

    double term = 1.0, sum = 1.0;
    double snap_term = 0.0;
    long snap_k = 0, next_snap = 1000;
    const long cap = 1000000L;
    for (long k = 0; k < cap; ++k) {
        const double kk = static_cast<double>(k);
        const double ratio = (a1 + kk) * (a2 + kk) * (a3 + kk) /
                             ((b1 + kk) * (b2 + kk) * (kk + 1.0));
        term *= ratio;
        sum += term;
        const long j = k + 1; // term index just added
        if (std::abs(term) <= 1e-15 * std::abs(sum) && std::abs(ratio) < 1.0)
            return sum; // fast geometric-looking decay, tail already negligible

        if (j == next_snap) {
            if (snap_k > 0) {
                // t_j j^{1+s} = A + B/j to second order; fit from the snapshot
                // and the current term, then integrate the fitted tail.
                const double f1 = snap_term * std::pow(static_cast<double>(snap_k), 1.0 + s);
                const double f2 = term * std::pow(static_cast<double>(j), 1.0 + s);
                const double inv1 = 1.0 / static_cast<double>(snap_k);
                const double inv2 = 1.0 / static_cast<double>(j);
                const double B = (f1 - f2) / (inv1 - inv2);
                const double A = f2 - B * inv2;
                const double x = static_cast<double>(j) + 1.0;
                const double tail = A * detail::zeta_tail(1.0 + s, x) +
                                    B * detail::zeta_tail(2.0 + s, x);
                const bool fit_ok = std::abs(B) * inv2 <= 0.25 * std::abs(A);
                const double resid = std::abs(tail) * 100.0 * inv2 * inv2 +
                                     std::abs(term) * 1e-12;
                if (fit_ok && resid <= 1e-13 * std::abs(sum + tail))
                    return sum + tail;
            }
            snap_k = j;
            snap_term = term;
            next_snap *= 2;
        }
    }
    throw accuracy_error("hyp3f2_unit: tail bound not reached within 1e6 terms", sum,
                         std::abs(term) * (1.0 + static_cast<double>(cap) / s));
}

namespace detail {
inline void require_positive(double x, const char* what) {
    if (!(x > 0.0))
        throw std::domain_error(std::string(what) + " = " + std::to_string(x) +
                                " <= 0: parameters outside the validity region");
}
inline double gamma_ratio2(double num, double den) {
    // Gamma(num)^2 / Gamma(den)
    return std::exp(2.0 * gamma_arg_checked(num, "Gamma(num)") -
                    gamma_arg_checked(den, "Gamma(den)"));
}
} // namespace detail

/// I_n(lambda): ordered-simplex integral with pair exponents lambda*2^{j-i}
/// (the c = 2 log-Poisson family), n in {2,3,4}.
inline double poisson_I(int n, double lambda) {
    switch (n) {
    case 2:
        detail::require_positive(1.0 + 2.0 * lambda, "1+2lambda");
        return 1.0 / ((1.0 + 2.0 * lambda) * (2.0 + 2.0 * lambda));
    case 3:
        detail::require_positive(1.0 + 2.0 * lambda, "1+2lambda");
        detail::require_positive(2.0 + 8.0 * lambda, "2+8lambda");
        return detail::gamma_ratio2(1.0 + 2.0 * lambda, 2.0 + 4.0 * lambda) /
               ((2.0 + 8.0 * lambda) * (3.0 + 8.0 * lambda));
    case 4: {
        detail::require_positive(1.0 + 2.0 * lambda, "1+2lambda");
        detail::require_positive(2.0 + 8.0 * lambda, "2+8lambda");
        detail::require_positive(3.0 + 22.0 * lambda, "3+22lambda");
        const double beta1 = detail::gamma_ratio2(1.0 + 2.0 * lambda, 2.0 + 4.0 * lambda);
        const double beta2 = std::exp(detail::gamma_arg_checked(1.0 + 2.0 * lambda, "Gamma(1+2lambda)") +
                                      detail::gamma_arg_checked(2.0 + 8.0 * lambda, "Gamma(2+8lambda)") -
                                      detail::gamma_arg_checked(3.0 + 10.0 * lambda, "Gamma(3+10lambda)"));
        const double f = hyp3f2_unit(-4.0 * lambda, 1.0 + 2.0 * lambda, 2.0 + 8.0 * lambda,
                                     2.0 + 4.0 * lambda, 3.0 + 10.0 * lambda);
        return beta1 * beta2 * f / ((3.0 + 22.0 * lambda) * (4.0 + 22.0 * lambda));
    }
    default:
        throw std::invalid_argument("poisson_I: n must be in {2,3,4}");
    }
}

/// J_n(lambda): ordered-simplex integral with pair exponents lambda*2^{n-(j-i)}
/// (the c = 1/2 log-Poisson family), n in {2,3,4}.
inline double poisson_J(int n, double lambda) {
    switch (n) {
    case 2:
        return poisson_I(2, lambda);
    case 3:
        detail::require_positive(1.0 + 4.0 * lambda, "1+4lambda");
        detail::require_positive(2.0 + 10.0 * lambda, "2+10lambda");
        return detail::gamma_ratio2(1.0 + 4.0 * lambda, 2.0 + 8.0 * lambda) /
               ((2.0 + 10.0 * lambda) * (3.0 + 10.0 * lambda));
    case 4: {
        detail::require_positive(1.0 + 8.0 * lambda, "1+8lambda");
        detail::require_positive(2.0 + 20.0 * lambda, "2+20lambda");
        detail::require_positive(3.0 + 34.0 * lambda, "3+34lambda");
        const double beta1 = detail::gamma_ratio2(1.0 + 8.0 * lambda, 2.0 + 16.0 * lambda);
        const double beta2 = std::exp(detail::gamma_arg_checked(1.0 + 8.0 * lambda, "Gamma(1+8lambda)") +
                                      detail::gamma_arg_checked(2.0 + 20.0 * lambda, "Gamma(2+20lambda)") -
                                      detail::gamma_arg_checked(3.0 + 28.0 * lambda, "Gamma(3+28lambda)"));
        const double f = hyp3f2_unit(-4.0 * lambda, 1.0 + 8.0 * lambda, 2.0 + 20.0 * lambda,
                                     2.0 + 16.0 * lambda, 3.0 + 28.0 * lambda);
        return beta1 * beta2 * f / ((3.0 + 34.0 * lambda) * (4.0 + 34.0 * lambda));
    }
    default:
        throw std::invalid_argument("poisson_J: n must be in {2,3,4}");
    }
}

enum class JointPair { OneOne, OneTwo };

/// E[M(0,1)^n] of the limit log-Poisson measure for the two closed-form
/// parameter choices c = 2 and c = 1/2.
inline double poisson_single_moment(double c, double mu, int n) {
    if (mu < 0.0) throw std::invalid_argument("poisson_single_moment: mu must be >= 0");
    if (n == 1) return 1.0;
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    if (c == 2.0) return fact * poisson_I(n, -0.5 * mu);
    if (c == 0.5) return fact * poisson_J(n, -mu / std::exp2(n + 1));
    throw unsupported_error("poisson_single_moment: closed form available only for c = 2 and c = 1/2"
                            "; use the quadrature route for other c");
}

/// Joint moments E[M(0,1/2) M(1/2,1)] and E[M(0,1/2) M(1/2,1)^2] of the limit
/// log-Poisson measure, expressed through the single moments.
inline double poisson_joint(double c, double mu, JointPair pair) {
    if (!(c > 0.0) || c == 1.0) throw std::invalid_argument("poisson_joint: need c > 0, c != 1");
    switch (pair) {
    case JointPair::OneOne: {
        const double e2 = poisson_single_moment(c, mu, 2);
        return 0.5 * (1.0 - std::exp2(mu * (c - 1.0) * (c - 1.0) - 1.0)) * e2;
    }
    case JointPair::OneTwo: {
        const double e3 = poisson_single_moment(c, mu, 3);
        return (1.0 / 6.0) * (1.0 - std::exp2(mu * (c * c * c - 3.0 * c + 2.0) - 2.0)) * e3;
    }
    }
    throw std::invalid_argument("poisson_joint: unknown pair");
}

namespace detail {
inline double binom_d(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}
} // namespace detail

/// Solve 2^{lambda N(N-1)+N} S_N = sum_{k=0}^{N} C(N,k) S_{k,N-k} for the one
/// missing joint value S_{n,N-n}. Known cross values are supplied keyed by
/// their first block size (either of k, N-k works); S_{0,N} = S_{N,0} = S_N.
inline double lognormal_joint_from_sum(int N, int n, double lambda,
                                       const std::map<int, double>& s_values) {
    if (N < 2 || n < 1 || n > N - 1)
        throw std::invalid_argument("lognormal_joint_from_sum: need N >= 2 and 1 <= n <= N-1");
    auto lookup = [&](int k) -> const double* {
        if (auto it = s_values.find(k); it != s_values.end()) return &it->second;
        if (auto it = s_values.find(N - k); it != s_values.end()) return &it->second;
        return nullptr;
    };
    for (const auto& [k, v] : s_values) {
        (void)v;
        if (k < 1 || k > N - 1)
            throw std::invalid_argument("lognormal_joint_from_sum: key " + std::to_string(k) +
                                        " outside 1..N-1");
        if (k == n || k == N - n)
            throw std::invalid_argument("lognormal_joint_from_sum: value for the unknown split supplied");
    }

    const double sN = selberg_product(N, lambda, 0.0, 0.0).value;
    const double lhs = std::exp2(lambda * N * (N - 1) + N) * sN;
    double known = 2.0 * sN; // k = 0 and k = N terms
    double coef = 0.0;
    for (int k = 1; k <= N - 1; ++k) {
        if (k == n || k == N - n) {
            coef += detail::binom_d(N, k);
            continue;
        }
        const double* v = lookup(k);
        if (!v)
            throw std::invalid_argument("lognormal_joint_from_sum: missing S_{" + std::to_string(k) +
                                        "," + std::to_string(N - k) + "}");
        known += detail::binom_d(N, k) * *v;
    }
    return (lhs - known) / coef;
}

} // namespace logid
