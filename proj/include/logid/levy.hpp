#pragma once

// Levy-Khinchine data of the infinitely divisible integrator and the scalar
// functionals of it (characteristic exponent on the imaginary axis, pairwise
// interaction coefficients d(m), multiscaling spectrum, moment finiteness).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace logid {

/// One atom of the spectral measure: mass `weight` at position `u`.
struct SpectralAtom {
    double u = 0.0;
    double weight = 0.0;
};

/// Gaussian variance plus a finite atomic spectral measure.
///
/// The drift is never stored: it is pinned by the normalization
/// phi_im(spec, 1) == 0, which every formula below builds in.
struct LevySpectrum {
    double sigma2 = 0.0;
    std::vector<SpectralAtom> atoms;

    static LevySpectrum gaussian(double sigma2) {
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("LevySpectrum::gaussian: sigma2 must be > 0");
        return LevySpectrum{sigma2, {}};
    }

    /// Point mass at log(c) with unit weight.
    static LevySpectrum log_poisson(double c) {
        if (!(c > 0.0) || c == 1.0)
            throw std::invalid_argument("LevySpectrum::log_poisson: need c > 0, c != 1");
        return LevySpectrum{0.0, {{std::log(c), 1.0}}};
    }

    bool trivial() const { return sigma2 == 0.0 && atoms.empty(); }

    /// Full validity check, used at API boundaries (CLI, JSON input).
    void validate() const {
        if (!(sigma2 >= 0.0))
            throw std::invalid_argument("LevySpectrum: sigma2 must be >= 0");
        for (const auto& a : atoms) {
            if (a.u == 0.0 || !std::isfinite(a.u))
                throw std::invalid_argument("LevySpectrum: atom position must be finite and nonzero");
            if (!(a.weight > 0.0) || !std::isfinite(a.weight))
                throw std::invalid_argument("LevySpectrum: atom weight must be finite and > 0");
        }
        if (trivial())
            throw std::invalid_argument(
                "LevySpectrum: empty spectrum (sigma2 == 0, no atoms) describes deterministic Lebesgue measure");
    }
};

enum class FinitenessVerdict { Finite, Boundary, Infinite };

struct MomentFiniteness {
    FinitenessVerdict verdict = FinitenessVerdict::Finite;
    double exponent = 0.0; // q - mu*phi(-iq)
};

namespace detail {
inline double guarded_exp(double x, const char* where) {
    if (x > 709.0)
        throw std::range_error(std::string(where) + ": exponent overflow (argument " +
                               std::to_string(x) + ")");
    return std::exp(x);
}
} // namespace detail

/// phi(-is) for real s: sigma^2/2 (s^2 - s) + sum w_j (e^{s u_j} - 1 - s(e^{u_j} - 1)).
/// Vanishes identically at s = 0 and s = 1.
inline double phi_im(const LevySpectrum& spec, double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("phi_im: s must be finite");
    double v = 0.5 * spec.sigma2 * (s * s - s);
    for (const auto& a : spec.atoms) {
        const double es = detail::guarded_exp(s * a.u, "phi_im");
        const double e1 = detail::guarded_exp(a.u, "phi_im");
        v += a.weight * (es - 1.0 - s * (e1 - 1.0));
    }
    return v;
}

/// d(m) = sigma^2 + sum w_j e^{(m-1) u_j} (e^{u_j} - 1)^2, m >= 1. Always >= 0.
inline double d_coeff(const LevySpectrum& spec, int m) {
    if (m < 1) throw std::invalid_argument("d_coeff: m must be >= 1");
    double v = spec.sigma2;
    for (const auto& a : spec.atoms) {
        const double e1 = detail::guarded_exp(a.u, "d_coeff");
        const double em = detail::guarded_exp((m - 1) * a.u, "d_coeff");
        v += a.weight * em * (e1 - 1.0) * (e1 - 1.0);
    }
    return v;
}

/// First n values d(1)..d(n).
inline std::vector<double> d_seq(const LevySpectrum& spec, int n) {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) d[static_cast<std::size_t>(m - 1)] = d_coeff(spec, m);
    return d;
}

/// sum_{1 <= l < j <= n} d(j-l); equals phi_im(spec, n) for integer n.
inline double d_pair_sum(const LevySpectrum& spec, int n) {
    if (n < 1) throw std::invalid_argument("d_pair_sum: n must be >= 1");
    double v = 0.0;
    for (int m = 1; m < n; ++m) v += (n - m) * d_coeff(spec, m);
    return v;
}

/// Coefficients alpha_{p,k} of the joint characteristic function at purely
/// imaginary arguments q_j = -i s_j. Returns the lower triangle as rows:
/// result[p-1] holds alpha_{p,1..p}.
inline std::vector<std::vector<double>> alpha_coeffs(const LevySpectrum& spec,
                                                     const std::vector<double>& s) {
    if (s.empty()) throw std::invalid_argument("alpha_coeffs: s must be nonempty");
    const int n = static_cast<int>(s.size());
    // r[k][p] = s_k + ... + s_p for 1 <= k <= p <= n, else 0 (1-based).
    auto r = [&](int k, int p) -> double {
        if (k > p) return 0.0;
        double acc = 0.0;
        for (int m = k; m <= p; ++m) acc += s[static_cast<std::size_t>(m - 1)];
        return acc;
    };
    std::vector<std::vector<double>> alpha(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) {
        auto& row = alpha[static_cast<std::size_t>(p - 1)];
        row.resize(static_cast<std::size_t>(p));
        for (int k = 1; k <= p; ++k) {
            row[static_cast<std::size_t>(k - 1)] =
                phi_im(spec, r(k, p)) + phi_im(spec, r(k + 1, p - 1)) -
                phi_im(spec, r(k, p - 1)) - phi_im(spec, r(k + 1, p));
        }
    }
    return alpha;
}

/// Multiscaling spectrum q - mu * phi(-iq).
inline double multiscaling(const LevySpectrum& spec, double mu, double q) {
    if (!(mu > 0.0)) throw std::invalid_argument("multiscaling: mu must be > 0");
    return q - mu * phi_im(spec, q);
}

/// Nondegeneracy: 1 - mu (sigma^2/2 + sum w_j (u_j e^{u_j} - e^{u_j} + 1)) > 0.
inline bool is_nondegenerate(const LevySpectrum& spec, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("is_nondegenerate: mu must be > 0");
    double deriv = 0.5 * spec.sigma2;
    for (const auto& a : spec.atoms) {
        const double e1 = detail::guarded_exp(a.u, "is_nondegenerate");
        deriv += a.weight * (a.u * e1 - e1 + 1.0);
    }
    return 1.0 - mu * deriv > 0.0;
}

/// Moment q > 1 is finite iff q - mu phi(-iq) > 1. The boundary case uses an
/// exact floating comparison; any tolerance policy is the caller's.
inline MomentFiniteness moment_finiteness(const LevySpectrum& spec, double mu, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("moment_finiteness: q must be > 1");
    const double e = multiscaling(spec, mu, q);
    MomentFiniteness r;
    r.exponent = e;
    r.verdict = e > 1.0   ? FinitenessVerdict::Finite
                : e == 1.0 ? FinitenessVerdict::Boundary
                           : FinitenessVerdict::Infinite;
    return r;
}

/// Coefficient sigma^2 + sum w_j u_j^2 of -mu log t in the log-mass covariance.
inline double log_cov_coefficient(const LevySpectrum& spec) {
    double v = spec.sigma2;
    for (const auto& a : spec.atoms) v += a.weight * a.u * a.u;
    return v;
}

} // namespace logid
