#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace logid {

using BigInt = boost::multiprecision::cpp_int;

/// Exactness carrier for the binomial sums. boost::multiprecision keeps the
/// fraction reduced with a positive denominator, which is the invariant the
/// serialization below relies on.
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(int n) {
    BigInt v = 1;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

inline BigInt big_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt v = 1;
    for (int i = 1; i <= k; ++i) {
        v *= (n - k + i);
        v /= i;
    }
    return v;
}

/// "p/q" (or just "p" for integers), the wire format for exact values.
inline std::string to_string(const BigRational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline BigRational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return BigRational(BigInt(s));
        const BigInt num(s.substr(0, slash));
        const BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return BigRational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("rational_from_string: cannot parse \"" + s + "\"");
    }
}

} // namespace logid
