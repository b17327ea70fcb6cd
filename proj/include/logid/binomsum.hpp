#pragma once

// Exact big-rational evaluation of the multiple binomial sums for the Selberg
// integral (lambda1 = lambda2 = 0), the two-block joint integrals S_{n,m}, and
// the Morris integral, all at nonnegative integer lambda. Each sum runs over
// one index I_{kl} in [-lambda, lambda] per pair k < l, with I_{kl} = -I_{lk}
// for k > l.

#include <cstdint>
#include <vector>

#include "logid/bigrational.hpp"
#include "logid/errors.hpp"

namespace logid {

/// Which pairs of the (n,m) block split keep the |y_k - y_l| sign (1) versus
/// the cross-block |y_k + y_l| sign (0).
struct SignPattern {
    int n = 0;
    int m = 0;
    /// 1-based indices k < l over N = n + m.
    int s(int k, int l) const {
        const bool same = (k <= n && l <= n) || (k > n && l > n);
        return same ? 1 : 0;
    }
};

namespace detail {

inline std::int64_t small_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t v = 1;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

inline int parity_sign(long long e) { return (e % 2 == 0) ? 1 : -1; }

struct PairTable {
    int N = 0;
    std::vector<std::pair<int, int>> kl; // lexicographic (1-based) pair list
    explicit PairTable(int N_) : N(N_) {
        for (int k = 1; k <= N; ++k)
            for (int l = k + 1; l <= N; ++l) kl.emplace_back(k, l);
    }
    std::size_t count() const { return kl.size(); }
};

inline void check_enumeration_budget(int N, int lambda) {
    const int K = N * (N - 1) / 2;
    double terms = 1.0;
    for (int i = 0; i < K; ++i) terms *= 2 * lambda + 1;
    if (terms > 1e8)
        throw budget_error("binomial sum enumeration would need " + std::to_string(terms) +
                           " terms (budget 1e8)");
}

/// Accumulates num/den terms over an incrementally grown common denominator;
/// normalization happens once at the end.
class RationalAccumulator {
public:
    void add(const BigInt& num, const BigInt& den) {
        if (den_ == 0) {
            num_ = num;
            den_ = den;
            return;
        }
        const BigInt g = boost::multiprecision::gcd(den_, den);
        const BigInt scale_old = den / g;
        num_ = num_ * scale_old + num * (den_ / g);
        den_ *= scale_old;
    }
    BigRational result() const {
        if (den_ == 0) return BigRational(0);
        return BigRational(num_, den_);
    }

private:
    BigInt num_ = 0;
    BigInt den_ = 0;
};

/// Shared enumeration core. SignExp maps the index vector to the (-1)-power;
/// PerIndexFactor maps the row sum R_k to the per-index factor of the term.
template <class SignExp, class TermBuilder>
BigRational enumerate_pair_sums(int N, int lambda, SignExp&& sign_exp, TermBuilder&& build) {
    check_enumeration_budget(N, lambda);
    const PairTable pairs(N);
    const std::size_t K = pairs.count();
    std::vector<int> idx(K, -lambda);
    std::vector<long long> row(static_cast<std::size_t>(N) + 1);
    std::vector<std::int64_t> binom_cache(static_cast<std::size_t>(2 * lambda) + 1);
    for (int i = 0; i <= 2 * lambda; ++i) binom_cache[static_cast<std::size_t>(i)] = small_binomial(2 * lambda, i);

    RationalAccumulator acc;
    for (;;) {
        // Row sums R_k = sum_{l != k} I_{kl} with I_{lk} = -I_{kl}.
        std::fill(row.begin(), row.end(), 0);
        std::int64_t binom_prod = 1;
        for (std::size_t p = 0; p < K; ++p) {
            const auto [k, l] = pairs.kl[p];
            row[static_cast<std::size_t>(k)] += idx[p];
            row[static_cast<std::size_t>(l)] -= idx[p];
            binom_prod *= binom_cache[static_cast<std::size_t>(lambda + idx[p])];
        }
        if (binom_prod != 0)
            build(idx, row, parity_sign(sign_exp(idx, pairs)), binom_prod, acc);

        // Advance the odometer (lexicographic over I_12, I_13, ..., I_{N-1,N}).
        std::size_t pos = K;
        while (pos > 0) {
            --pos;
            if (idx[pos] < lambda) {
                ++idx[pos];
                break;
            }
            idx[pos] = -lambda;
            if (pos == 0) return acc.result();
        }
        if (K == 0) return acc.result();
    }
}

} // namespace detail

/// S_N(lambda) = integral over [0,1]^N of prod |y_k - y_l|^{2 lambda}, as an
/// exact rational.
inline BigRational selberg_sum(int N, int lambda) {
    if (N < 1 || lambda < 0) throw std::invalid_argument("selberg_sum: need N >= 1, lambda >= 0");
    if (N == 1) return BigRational(1);
    auto sign_exp = [](const std::vector<int>& idx, const detail::PairTable&) {
        long long e = 0;
        for (int v : idx) e += v;
        return e;
    };
    auto build = [&](const std::vector<int>&, const std::vector<long long>& row, int sign,
                     std::int64_t binom_prod, detail::RationalAccumulator& acc) {
        BigInt den = 1;
        for (int k = 1; k <= N; ++k) {
            const long long d = 1 + static_cast<long long>(N - 1) * lambda + row[static_cast<std::size_t>(k)];
            den *= d; // always >= 1 since |row_k| <= (N-1) lambda
        }
        acc.add(BigInt(sign * binom_prod), den);
    };
    const BigRational sum = detail::enumerate_pair_sums(N, lambda, sign_exp, build);
    const long long pre = static_cast<long long>(lambda) * N * (N - 1) / 2;
    return detail::parity_sign(pre) * sum;
}

/// S_{n,m}(lambda): same sum with the sign restricted to same-block pairs.
inline BigRational joint_sum(int n, int m, int lambda) {
    if (n < 0 || m < 0 || n + m < 1 || lambda < 0)
        throw std::invalid_argument("joint_sum: need n,m >= 0, n+m >= 1, lambda >= 0");
    if (n == 0 || m == 0) return selberg_sum(n + m, lambda);
    const int N = n + m;
    const SignPattern pattern{n, m};
    auto sign_exp = [&](const std::vector<int>& idx, const detail::PairTable& pairs) {
        long long e = 0;
        for (std::size_t p = 0; p < pairs.count(); ++p) {
            const auto [k, l] = pairs.kl[p];
            e += static_cast<long long>(pattern.s(k, l)) * idx[p];
        }
        return e;
    };
    auto build = [&](const std::vector<int>&, const std::vector<long long>& row, int sign,
                     std::int64_t binom_prod, detail::RationalAccumulator& acc) {
        BigInt den = 1;
        for (int k = 1; k <= N; ++k)
            den *= 1 + static_cast<long long>(N - 1) * lambda + row[static_cast<std::size_t>(k)];
        acc.add(BigInt(sign * binom_prod), den);
    };
    const BigRational sum = detail::enumerate_pair_sums(N, lambda, sign_exp, build);
    const long long pre =
        static_cast<long long>(lambda) * (static_cast<long long>(n) * (n - 1) + static_cast<long long>(m) * (m - 1)) / 2;
    return detail::parity_sign(pre) * sum;
}

/// Morris constant M_N(a,b,lambda) as a binomial sum. Binomials whose lower
/// index falls outside [0, a+b] vanish and kill the term.
inline BigRational morris_sum(int N, int a, int b, int lambda) {
    if (N < 1 || a < 0 || b < 0 || lambda < 0)
        throw std::invalid_argument("morris_sum: need N >= 1, a,b >= 0, lambda >= 0");
    if (N == 1) return BigRational(detail::small_binomial(a + b, a));
    auto sign_exp = [](const std::vector<int>& idx, const detail::PairTable&) {
        long long e = 0;
        for (int v : idx) e += v;
        return e;
    };
    auto build = [&](const std::vector<int>&, const std::vector<long long>& row, int sign,
                     std::int64_t binom_prod, detail::RationalAccumulator& acc) {
        BigInt num = sign * binom_prod;
        for (int k = 1; k <= N; ++k) {
            const std::int64_t c =
                detail::small_binomial(a + b, a + static_cast<int>(row[static_cast<std::size_t>(k)]));
            if (c == 0) return;
            num *= c;
        }
        acc.add(num, BigInt(1));
    };
    return detail::enumerate_pair_sums(N, lambda, sign_exp, build);
}

/// LHS - RHS of 2^{lambda N(N-1)+N} S_N = sum_{n+m=N} C(N,n) S_{n,m}, exact.
inline BigRational sum_relation_residual(int N, int lambda) {
    if (N < 1 || lambda < 0)
        throw std::invalid_argument("sum_relation_residual: need N >= 1, lambda >= 0");
    BigInt two_pow = 1;
    two_pow <<= static_cast<unsigned>(lambda * N * (N - 1) + N);
    BigRational lhs = BigRational(two_pow) * selberg_sum(N, lambda);
    BigRational rhs(0);
    for (int n = 0; n <= N; ++n)
        rhs += BigRational(big_binomial(N, n)) * joint_sum(n, N - n, lambda);
    return lhs - rhs;
}

/// Eq.-(48)-style gamma product at integer lambda, lambda1 = lambda2 = 0,
/// evaluated exactly through factorials. The independent algebraic route the
/// binomial sum is checked against.
inline BigRational selberg_product_rational(int N, int lambda) {
    if (N < 1 || lambda < 0)
        throw std::invalid_argument("selberg_product_rational: need N >= 1, lambda >= 0");
    BigRational v(1);
    for (int k = 0; k < N; ++k) {
        BigRational num = BigRational(big_factorial((k + 1) * lambda));
        const BigInt f = big_factorial(k * lambda);
        num *= BigRational(f * f);
        BigRational den = BigRational(big_factorial(lambda));
        den *= BigRational(big_factorial(1 + (N + k - 1) * lambda));
        v *= num / den;
    }
    return v;
}

/// Factorial form of the Morris product at integer parameters.
inline BigRational morris_product_rational(int N, int a, int b, int lambda) {
    if (N < 1 || a < 0 || b < 0 || lambda < 0)
        throw std::invalid_argument("morris_product_rational: need N >= 1, a,b >= 0, lambda >= 0");
    BigRational v(1);
    for (int j = 0; j < N; ++j) {
        BigRational num = BigRational(big_factorial(a + b + lambda * j));
        num *= BigRational(big_factorial(lambda * (j + 1)));
        BigRational den = BigRational(big_factorial(a + lambda * j));
        den *= BigRational(big_factorial(b + lambda * j));
        den *= BigRational(big_factorial(lambda));
        v *= num / den;
    }
    return v;
}

} // namespace logid
