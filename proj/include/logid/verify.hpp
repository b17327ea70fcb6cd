#pragma once

// Cross-verification suites: every identity the library computes by two or
// more routes, each reported as one PASS/FAIL row. The CLI `verify` command
// and the acceptance runner are both thin wrappers over these.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "logid/binomsum.hpp"
#include "logid/closedform.hpp"
#include "logid/levy.hpp"
#include "logid/quadrature.hpp"
#include "logid/simulator.hpp"

namespace logid {

struct VerifyRow {
    std::string name;
    std::string params;
    std::string residual; // numeric string; exact rationals print as "p/q"
    double tolerance = 0.0;
    bool pass = false;
};

namespace vdetail {

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", x);
    return buf;
}

inline VerifyRow rel_row(std::string name, std::string params, double got, double ref, double tol) {
    const double resid = std::abs(got - ref) / std::max(std::abs(ref), 1e-300);
    return {std::move(name), std::move(params), fmt(resid), tol, resid <= tol};
}

inline VerifyRow abs_row(std::string name, std::string params, double resid, double tol) {
    return {std::move(name), std::move(params), fmt(resid), tol, resid <= tol};
}

inline VerifyRow exact_row(std::string name, std::string params, const BigRational& resid) {
    return {std::move(name), std::move(params), to_string(resid), 0.0, resid == 0};
}

/// Exact rational sum of a terminating 3F2 at integer parameters; the
/// independent oracle for the double-precision series.
inline BigRational hyp3f2_terminating_exact(long a1, long a2, long a3, long b1, long b2) {
    BigRational sum(1), term(1);
    for (long k = 0; a1 + k != 0; ++k) {
        term *= BigRational(BigInt(a1 + k) * BigInt(a2 + k) * BigInt(a3 + k),
                            BigInt(b1 + k) * BigInt(b2 + k) * BigInt(k + 1));
        sum += term;
        if (term == 0) break;
    }
    return sum;
}

} // namespace vdetail

/// Levy-layer invariants on pseudo-random atomic spectra.
inline std::vector<VerifyRow> verify_levy(int spectra = 100, std::uint64_t seed = 99) {
    double max_phi1 = 0.0, min_d = 1e300, max_pair = 0.0, max_alpha = 0.0, min_secdiff = 1e300;
    RngStream rng(seed, 0, 7);
    for (int s = 0; s < spectra; ++s) {
        LevySpectrum spec;
        spec.sigma2 = (rng.uniform() < 0.3) ? 0.0 : 2.0 * rng.uniform();
        const int na = static_cast<int>(rng.uniform() * 5.0);
        for (int a = 0; a < na; ++a) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            spec.atoms.push_back({sign * (0.1 + 1.9 * rng.uniform()), 0.05 + 1.95 * rng.uniform()});
        }
        if (spec.trivial()) spec.sigma2 = 1.0;

        max_phi1 = std::max(max_phi1, std::abs(phi_im(spec, 1.0)));
        for (int m = 1; m <= 12; ++m) min_d = std::min(min_d, d_coeff(spec, m));
        for (int n = 2; n <= 12; ++n) {
            const double lhs = d_pair_sum(spec, n), rhs = phi_im(spec, static_cast<double>(n));
            max_pair = std::max(max_pair, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-30));
        }
        const auto alpha = alpha_coeffs(spec, std::vector<double>(6, 1.0));
        for (int p = 1; p <= 6; ++p)
            for (int k = 1; k <= p; ++k) {
                const double got = alpha[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(k - 1)];
                const double want = (k == p) ? 0.0 : d_coeff(spec, p - k);
                max_alpha = std::max(max_alpha,
                                     std::abs(got - want) / std::max(std::abs(want), 1.0));
            }
        double prev2 = phi_im(spec, -3.0), prev1 = phi_im(spec, -2.75);
        for (double q = -2.5; q <= 5.0; q += 0.25) {
            const double cur = phi_im(spec, q);
            min_secdiff = std::min(min_secdiff, cur - 2.0 * prev1 + prev2);
            prev2 = prev1;
            prev1 = cur;
        }
    }
    std::vector<VerifyRow> rows;
    rows.push_back(vdetail::abs_row("levy phi(-i) normalization", std::to_string(spectra) + " spectra",
                                    max_phi1, 1e-12));
    rows.push_back(vdetail::abs_row("levy d(m) >= 0", "m <= 12", std::max(0.0, -min_d), 0.0));
    rows.push_back(vdetail::abs_row("levy pair-sum identity", "n <= 12", max_pair, 1e-12));
    rows.push_back(vdetail::abs_row("levy alpha reduction to d", "all-ones length 6", max_alpha, 1e-12));
    rows.push_back(vdetail::abs_row("levy phi convexity", "q in [-3,5]", std::max(0.0, -min_secdiff), 1e-10));
    return rows;
}

/// Binomial sum vs factorial gamma product for S_N(lambda), exact.
inline std::vector<VerifyRow> verify_binom_selberg() {
    std::vector<VerifyRow> rows;
    for (int N = 1; N <= 4; ++N)
        for (int lam = 0; lam <= 3; ++lam) {
            const BigRational resid = selberg_sum(N, lam) - selberg_product_rational(N, lam);
            rows.push_back(vdetail::exact_row("selberg sum vs product",
                                              "N=" + std::to_string(N) + " lambda=" + std::to_string(lam),
                                              resid));
        }
    rows.push_back(vdetail::exact_row("selberg S3(1) = 1/360", "N=3 lambda=1",
                                      selberg_sum(3, 1) - BigRational(1, 360)));
    return rows;
}

/// Binomial sum vs factorial product for the Morris constant, exact.
inline std::vector<VerifyRow> verify_binom_morris() {
    std::vector<VerifyRow> rows;
    for (int N = 1; N <= 3; ++N)
        for (int lam = 0; lam <= 2; ++lam) {
            BigRational worst(0);
            for (int a = 0; a <= 3; ++a)
                for (int b = 0; b <= 3; ++b) {
                    const BigRational r = morris_sum(N, a, b, lam) - morris_product_rational(N, a, b, lam);
                    if (boost::multiprecision::abs(r) > boost::multiprecision::abs(worst)) worst = r;
                }
            rows.push_back(vdetail::exact_row("morris sum vs product",
                                              "N=" + std::to_string(N) + " lambda=" + std::to_string(lam) +
                                                  " a,b<=3",
                                              worst));
        }
    return rows;
}

/// The two-block decomposition identity, exact.
inline std::vector<VerifyRow> verify_sum_relation() {
    std::vector<VerifyRow> rows;
    for (int N = 2; N <= 4; ++N)
        for (int lam = 0; lam <= 2; ++lam)
            rows.push_back(vdetail::exact_row(
                "sum relation 2^{lN(N-1)+N} S_N = sum C(N,n) S_{n,m}",
                "N=" + std::to_string(N) + " lambda=" + std::to_string(lam),
                sum_relation_residual(N, lam)));
    return rows;
}

/// n! x ordered quadrature against the gamma product, gaussian d == 1.
inline std::vector<VerifyRow> verify_quad_vs_closed() {
    std::vector<VerifyRow> rows;
    double fact = 1.0;
    for (int n = 1; n <= 4; ++n) {
        fact *= n;
        for (double lam : {-0.15, -0.05, 1.0}) {
            const double ref = selberg_product(n, lam, 0.0, 0.0).value;
            SelbergParams p{n, lam, 0.0, 0.0, std::vector<double>(static_cast<std::size_t>(n), 1.0)};
            const QuadResult q = selberg_general(p, nullptr, 1e-6 * std::abs(ref) / fact);
            rows.push_back(vdetail::rel_row("quadrature vs gamma product",
                                            "n=" + std::to_string(n) + " lambda=" + vdetail::fmt(lam),
                                            fact * q.value, ref, 5e-6));
        }
    }
    return rows;
}

/// Recurrence residuals, single (Thm-3.5 form) and joint (Thm-3.6 form).
inline std::vector<VerifyRow> verify_recurrence() {
    std::vector<VerifyRow> rows;
    const auto gauss = LevySpectrum::gaussian(1.0);
    const auto logp = LevySpectrum::log_poisson(2.0);
    for (int n = 2; n <= 4; ++n) {
        rows.push_back(vdetail::abs_row(
            "single-moment recurrence (gaussian)", "n=" + std::to_string(n) + " lambda=-0.1",
            recurrence_residual_single(selberg_params_from_spectrum(gauss, n, -0.1), gauss, 1e-6),
            1e-5));
        rows.push_back(vdetail::abs_row(
            "single-moment recurrence (log-poisson c=2)", "n=" + std::to_string(n) + " lambda=-0.05",
            recurrence_residual_single(selberg_params_from_spectrum(logp, n, -0.05), logp, 1e-6),
            1e-5));
    }
    const IntervalPair iv{0.0, 0.5, 0.5, 1.0};
    for (const auto& [n, m] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}}) {
        rows.push_back(vdetail::abs_row("joint recurrence (gaussian)",
                                        "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) +
                                            ") mu=0.2",
                                        recurrence_residual_joint(gauss, 0.2, iv, n, m, 1e-6), 1e-4));
        rows.push_back(vdetail::abs_row("joint recurrence (log-poisson c=2)",
                                        "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) +
                                            ") mu=0.2",
                                        recurrence_residual_joint(logp, 0.2, iv, n, m, 1e-6), 1e-4));
    }
    return rows;
}

/// Low log-Poisson moments: quadrature of the defining integrals against the
/// closed forms, the 3F2 terminating oracle, and the designed rejection of
/// the one out-of-existence combination.
inline std::vector<VerifyRow> verify_poisson_lowmoments() {
    std::vector<VerifyRow> rows;
    const std::vector<double> dI = {1, 2, 4, 8};
    const std::vector<double> dJ = {0.25, 0.125, 0.0625, 0.03125};
    for (double lam : {-0.1, -0.05}) {
        for (int n = 2; n <= 4; ++n) {
            const double ref = poisson_I(n, lam);
            SelbergParams p{n, lam, 0.0, 0.0, dI};
            const QuadResult q = selberg_general(p, nullptr, 3e-6 * std::abs(ref));
            rows.push_back(vdetail::rel_row("I_n quadrature vs closed form",
                                            "n=" + std::to_string(n) + " lambda=" + vdetail::fmt(lam),
                                            q.value, ref, 1e-5));
        }
        for (int n = 2; n <= 4; ++n) {
            if (n == 4 && lam == -0.1) continue; // outside moment existence, checked below
            const double ref = poisson_J(n, lam);
            SelbergParams p{n, lam * std::exp2(n), 0.0, 0.0, dJ};
            const QuadResult q = selberg_general(p, nullptr, 3e-6 * std::abs(ref));
            rows.push_back(vdetail::rel_row("J_n quadrature vs closed form",
                                            "n=" + std::to_string(n) + " lambda=" + vdetail::fmt(lam),
                                            q.value, ref, 1e-5));
        }
    }
    {
        bool rejected = false;
        try {
            poisson_J(4, -0.1);
        } catch (const std::domain_error&) {
            rejected = true;
        }
        VerifyRow row{"J_4 outside existence rejected", "lambda=-0.1", rejected ? "rejected" : "accepted",
                      0.0, rejected};
        rows.push_back(row);
    }
    for (long lam : {1L, 2L}) {
        const double got = hyp3f2_unit(static_cast<double>(-4 * lam), static_cast<double>(1 + 2 * lam),
                                       static_cast<double>(2 + 8 * lam), static_cast<double>(2 + 4 * lam),
                                       static_cast<double>(3 + 10 * lam));
        const double ref = static_cast<double>(
            vdetail::hyp3f2_terminating_exact(-4 * lam, 1 + 2 * lam, 2 + 8 * lam, 2 + 4 * lam, 3 + 10 * lam));
        rows.push_back(vdetail::rel_row("3F2 terminating vs exact-rational oracle",
                                        "I_4 pattern lambda=" + std::to_string(lam), got, ref, 1e-14));
        const double gotJ = hyp3f2_unit(static_cast<double>(-4 * lam), static_cast<double>(1 + 8 * lam),
                                        static_cast<double>(2 + 20 * lam), static_cast<double>(2 + 16 * lam),
                                        static_cast<double>(3 + 28 * lam));
        const double refJ = static_cast<double>(vdetail::hyp3f2_terminating_exact(
            -4 * lam, 1 + 8 * lam, 2 + 20 * lam, 2 + 16 * lam, 3 + 28 * lam));
        rows.push_back(vdetail::rel_row("3F2 terminating vs exact-rational oracle",
                                        "J_4 pattern lambda=" + std::to_string(lam), gotJ, refJ, 1e-14));
    }
    return rows;
}

/// 2-D reductions of S_{1,3}, S_{2,2} against direct 4-D quadrature, their
/// lambda = 0 values, and the lambda = 1 combination identity.
inline std::vector<VerifyRow> verify_prop51() {
    std::vector<VerifyRow> rows;
    for (double lam : {0.0, -0.1, 1.0}) {
        const QuadResult a2 = s13_2d(lam, 1e-7);
        const QuadResult b2 = s22_2d(lam, 1e-7);
        if (lam == 0.0) {
            rows.push_back(vdetail::rel_row("S13 2-D reduction at lambda=0", "expect 1", a2.value, 1.0, 1e-7));
            rows.push_back(vdetail::rel_row("S22 2-D reduction at lambda=0", "expect 1", b2.value, 1.0, 1e-7));
            continue;
        }
        const QuadResult a4 = s13_direct4d(lam, 1e-6);
        const QuadResult b4 = s22_direct4d(lam, 1e-6);
        const double bar_a = a2.abs_error_estimate + a4.abs_error_estimate;
        const double bar_b = b2.abs_error_estimate + b4.abs_error_estimate;
        rows.push_back(vdetail::abs_row("S13: 2-D reduction vs direct 4-D",
                                        "lambda=" + vdetail::fmt(lam) + " bar=" + vdetail::fmt(bar_a),
                                        std::abs(a2.value - a4.value), bar_a));
        rows.push_back(vdetail::abs_row("S22: 2-D reduction vs direct 4-D",
                                        "lambda=" + vdetail::fmt(lam) + " bar=" + vdetail::fmt(bar_b),
                                        std::abs(b2.value - b4.value), bar_b));
        if (lam == 1.0) {
            const double lhs = 4.0 * a2.value + 3.0 * b2.value;
            const double rhs = (std::exp2(15.0) - 1.0) * selberg_product(4, 1.0, 0.0, 0.0).value;
            rows.push_back(vdetail::rel_row("4 S13 + 3 S22 = (2^15-1) S4", "lambda=1", lhs, rhs, 1e-6));
        }
    }
    return rows;
}

/// Joint moments of the log-Poisson(2) measure: quadrature vs closed form.
inline std::vector<VerifyRow> verify_joint_poisson() {
    std::vector<VerifyRow> rows;
    const auto logp = LevySpectrum::log_poisson(2.0);
    const IntervalPair iv{0.0, 0.5, 0.5, 1.0};
    const struct {
        int n, m;
        JointPair pair;
        const char* tag;
    } cases[] = {{1, 1, JointPair::OneOne, "(1,1)"}, {1, 2, JointPair::OneTwo, "(1,2)"}};
    for (const auto& c : cases) {
        const double ref = poisson_joint(2.0, 0.2, c.pair);
        const QuadResult q = joint_moment_quad(logp, 0.2, iv, c.n, c.m, 1e-6 * std::abs(ref));
        rows.push_back(vdetail::rel_row("joint moment quad vs closed form",
                                        std::string(c.tag) + " c=2 mu=0.2", q.value, ref, 1e-4));
    }
    return rows;
}

/// Statistical acceptance of the simulator at full desk scale.
inline std::vector<VerifyRow> verify_simulation(const SimConfig* cfg_override = nullptr) {
    SimConfig cfg{1e-3, 4096, 20000, 0xC9, 0.2};
    if (cfg_override) cfg = *cfg_override;
    cfg.validate();
    std::vector<VerifyRow> rows;

    // One gaussian streaming pass: total mass plus the multiscaling t-grid.
    const std::vector<double> ts = {1.0, 0.5, 0.25, 0.125};
    std::vector<Interval> ivs;
    for (double t : ts) ivs.push_back({0.0, t});
    const auto P = static_cast<std::size_t>(cfg.paths);
    std::vector<std::vector<double>> mass(ts.size(), std::vector<double>(P));
    simdetail::run_masses(cfg, ModelSpec::gaussian(), ivs, [&](long p, const std::vector<double>& m) {
        for (std::size_t j = 0; j < ts.size(); ++j) mass[j][static_cast<std::size_t>(p)] = m[j];
    });

    const MomentEstimate m1 = simdetail::mean_with_jackknife(mass[0]);
    rows.push_back(vdetail::abs_row("sim gaussian E[mass(0,1)] = 1",
                                    "3 sigma, se=" + vdetail::fmt(m1.std_error),
                                    std::abs(m1.mean - 1.0), 3.0 * m1.std_error));

    std::vector<std::vector<double>> m2(ts.size(), std::vector<double>(P));
    for (std::size_t j = 0; j < ts.size(); ++j)
        for (std::size_t i = 0; i < P; ++i) m2[j][i] = mass[j][i] * mass[j][i];
    const MomentEstimate sec = simdetail::mean_with_jackknife(m2[0]);
    const double sec_ref = lognormal_moment(cfg.mu, 2);
    rows.push_back(vdetail::abs_row("sim gaussian E[mass(0,1)^2] = closed form",
                                    "ref=" + vdetail::fmt(sec_ref) + " se=" + vdetail::fmt(sec.std_error),
                                    std::abs(sec.mean - sec_ref), 3.0 * sec.std_error));

    // Multiscaling exponent for q = 2: slope of log E[mass(0,t)^2] in log t.
    {
        const std::size_t T = ts.size();
        std::vector<double> sums(T);
        for (std::size_t j = 0; j < T; ++j) sums[j] = pairwise_sum(m2[j]);
        std::vector<double> xs(T);
        double xbar = 0.0;
        for (std::size_t j = 0; j < T; ++j) {
            xs[j] = std::log(ts[j]);
            xbar += xs[j];
        }
        xbar /= static_cast<double>(T);
        double sxx = 0.0;
        for (double x : xs) sxx += (x - xbar) * (x - xbar);
        auto slope_of = [&](const std::vector<double>& tot, double np) {
            double s = 0.0, ybar = 0.0;
            for (std::size_t j = 0; j < T; ++j) ybar += std::log(tot[j] / np);
            ybar /= static_cast<double>(T);
            for (std::size_t j = 0; j < T; ++j) s += (xs[j] - xbar) * (std::log(tot[j] / np) - ybar);
            return s / sxx;
        };
        const double np = static_cast<double>(P);
        const double slope = slope_of(sums, np);
        const double target = 2.0 - cfg.mu * phi_im(LevySpectrum::gaussian(1.0), 2.0);
        rows.push_back(vdetail::abs_row("sim multiscaling exponent q=2",
                                        "target=" + vdetail::fmt(target), std::abs(slope - target),
                                        0.02));
    }

    // Log-covariance regression slopes, both integrators.
    const std::vector<double> tgrid = {0.2, 0.4, 0.6, 0.8};
    {
        const MomentEstimate sl = estimate_log_cov_slope(cfg, ModelSpec::gaussian(), tgrid, 0.05);
        const double target = cfg.mu * log_cov_coefficient(LevySpectrum::gaussian(1.0));
        rows.push_back(vdetail::abs_row("sim log-cov slope (gaussian)",
                                        "target=" + vdetail::fmt(target) + " se=" + vdetail::fmt(sl.std_error),
                                        std::abs(sl.mean - target), 3.0 * sl.std_error));
    }
    {
        const MomentEstimate sl = estimate_log_cov_slope(cfg, ModelSpec::log_poisson(2.0), tgrid, 0.05);
        const double target = cfg.mu * log_cov_coefficient(LevySpectrum::log_poisson(2.0));
        rows.push_back(vdetail::abs_row("sim log-cov slope (log-poisson c=2)",
                                        "target=" + vdetail::fmt(target) + " se=" + vdetail::fmt(sl.std_error),
                                        std::abs(sl.mean - target), 3.0 * sl.std_error));
    }
    return rows;
}

} // namespace logid
