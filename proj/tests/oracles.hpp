#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// explicit triple-sum forms of the N = 3 binomial identities, a direct
// Pochhammer-product 3F2 summation, and a graded-mesh 2-D integrator for
// singular integrands.

#include <cmath>
#include <functional>

#include "logid/bigrational.hpp"

namespace oracle {

using logid::BigInt;
using logid::BigRational;

inline BigInt binom(long n, long k) {
    if (k < 0 || k > n) return 0;
    BigInt v = 1;
    for (long i = 1; i <= k; ++i) {
        v *= (n - k + i);
        v /= i;
    }
    return v;
}

/// S_3(lambda) written out as the explicit triple sum.
inline BigRational selberg3_triple_sum(long lam) {
    BigRational sum(0);
    for (long i12 = -lam; i12 <= lam; ++i12)
        for (long i13 = -lam; i13 <= lam; ++i13)
            for (long i23 = -lam; i23 <= lam; ++i23) {
                const long sign_exp = i12 + i13 + i23;
                const BigInt num = ((sign_exp % 2 + 2) % 2 == 0 ? 1 : -1) *
                                   binom(2 * lam, lam + i12) * binom(2 * lam, lam + i13) *
                                   binom(2 * lam, lam + i23);
                BigInt den = BigInt(1 + 2 * lam + i12 + i13);
                den *= 1 + 2 * lam - i12 + i23;
                den *= 1 + 2 * lam - i13 - i23;
                sum += BigRational(num, den);
            }
    return ((lam % 2 + 2) % 2 == 0 ? 1 : -1) * sum;
}

/// S_{1,2}(lambda): same sum with the sign carried by I_23 alone.
inline BigRational joint12_triple_sum(long lam) {
    BigRational sum(0);
    for (long i12 = -lam; i12 <= lam; ++i12)
        for (long i13 = -lam; i13 <= lam; ++i13)
            for (long i23 = -lam; i23 <= lam; ++i23) {
                const BigInt num = ((i23 % 2 + 2) % 2 == 0 ? 1 : -1) *
                                   binom(2 * lam, lam + i12) * binom(2 * lam, lam + i13) *
                                   binom(2 * lam, lam + i23);
                BigInt den = BigInt(1 + 2 * lam + i12 + i13);
                den *= 1 + 2 * lam - i12 + i23;
                den *= 1 + 2 * lam - i13 - i23;
                sum += BigRational(num, den);
            }
    return ((lam % 2 + 2) % 2 == 0 ? 1 : -1) * sum;
}

/// M_3(a,b,lambda) as the explicit triple sum.
inline BigRational morris3_triple_sum(long a, long b, long lam) {
    BigRational sum(0);
    for (long i12 = -lam; i12 <= lam; ++i12)
        for (long i13 = -lam; i13 <= lam; ++i13)
            for (long i23 = -lam; i23 <= lam; ++i23) {
                const long sign_exp = i12 + i13 + i23;
                BigInt num = ((sign_exp % 2 + 2) % 2 == 0 ? 1 : -1) *
                             binom(2 * lam, lam + i12) * binom(2 * lam, lam + i13) *
                             binom(2 * lam, lam + i23);
                num *= binom(a + b, a + i12 + i13);
                num *= binom(a + b, a - i12 + i23);
                num *= binom(a + b, a - i13 - i23);
                sum += BigRational(num, 1);
            }
    return sum;
}

/// Terminating 3F2 summed from scratch with explicit Pochhammer products.
inline double hyp3f2_terminating_direct(double a1, double a2, double a3, double b1, double b2) {
    const long K = -static_cast<long>(std::llround(a1));
    double sum = 0.0;
    for (long k = 0; k <= K; ++k) {
        double poch = 1.0;
        for (long i = 0; i < k; ++i)
            poch *= (a1 + i) * (a2 + i) * (a3 + i) / ((b1 + i) * (b2 + i));
        double fact = 1.0;
        for (long i = 2; i <= k; ++i) fact *= static_cast<double>(i);
        sum += poch / fact;
    }
    return sum;
}

/// Midpoint rule on a mesh graded toward all four edges and the diagonal,
/// for integrands with power singularities there. Crude but independent.
inline double graded_2d(const std::function<double(double, double)>& f, int cells_per_band = 24,
                        int bands = 28) {
    // Build a 1-D graded mesh on [0,1]: geometric refinement toward 0 and 1.
    std::vector<double> edges;
    edges.push_back(0.0);
    double w = 0.5;
    std::vector<double> left;
    for (int b = 0; b < bands; ++b) {
        w *= 0.5;
        left.push_back(w);
    }
    for (int b = bands - 1; b >= 0; --b) edges.push_back(left[static_cast<std::size_t>(b)]);
    edges.push_back(0.5);
    for (int b = 0; b < bands; ++b)
        edges.push_back(1.0 - left[static_cast<std::size_t>(b)]);
    edges.push_back(1.0);

    // Distinct in-cell offsets for the two axes keep tensor nodes off the
    // diagonal, where the integrand may blow up.
    auto build = [&](double offset, std::vector<double>& nodes, std::vector<double>& weights) {
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double a = edges[i], b = edges[i + 1];
            for (int c = 0; c < cells_per_band; ++c) {
                nodes.push_back(a + (b - a) * (c + offset) / cells_per_band);
                weights.push_back((b - a) / cells_per_band);
            }
        }
    };
    std::vector<double> xn, xw, yn, yw;
    build(0.5, xn, xw);
    build(0.37, yn, yw);
    double total = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i)
        for (std::size_t j = 0; j < yn.size(); ++j)
            total += xw[i] * yw[j] * f(xn[i], yn[j]);
    return total;
}

} // namespace oracle
