#pragma once

// Numerical evaluation of the generalized Selberg integrals: single and joint
// moments in small dimension, the recurrence-relation residuals, and the
// two-dimensional reductions of the simplest joint lognormal moments.
//
// Strategy: integrals over ordered blocks are computed as nested 1-D
// tanh-sinh quadratures, innermost coordinate last. Every 1-D slice of these
// integrands is singular only at its interval endpoints (adjacent-pair and
// endpoint power factors), which tanh-sinh absorbs regardless of the exact
// cluster exponent. Factors against already-fixed coordinates are evaluated
// from exact endpoint distances where cancellation would otherwise bite.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "logid/errors.hpp"
#include "logid/levy.hpp"
#include "logid/rng.hpp"
#include "logid/tanh_sinh.hpp"

namespace logid {

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    long long evaluations = 0;
};

/// Per-coordinate weight w(t) as a piecewise polynomial. coeffs[i][k] is the
/// coefficient of (t - breaks[i])^k on piece [breaks[i], breaks[i+1]].
struct PiecewisePoly {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;

    double operator()(double t) const {
        std::size_t i = 0;
        while (i + 2 < breaks.size() && t >= breaks[i + 1]) ++i;
        const double u = t - breaks[i];
        const auto& c = coeffs[i];
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * u + c[k];
        return v;
    }

    /// Single polynomial piece on [0,1], coefficients in ascending powers of t.
    static PiecewisePoly on_unit(std::vector<double> c) {
        return PiecewisePoly{{0.0, 1.0}, {std::move(c)}};
    }
};

struct SelbergParams {
    int n = 1;
    double lambda = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::vector<double> d_seq; // d(1), d(2), ...
};

inline SelbergParams selberg_params_from_spectrum(const LevySpectrum& spec, int n, double lambda,
                                                  double lambda1 = 0.0, double lambda2 = 0.0) {
    return SelbergParams{n, lambda, lambda1, lambda2, d_seq(spec, n)};
}

struct IntervalPair {
    double a1 = 0.0, b1 = 0.5, a2 = 0.5, b2 = 1.0;

    void validate() const {
        if (!(0.0 <= a1 && a1 < b1 && b1 <= a2 && a2 < b2 && b2 <= 1.0))
            throw std::invalid_argument("IntervalPair: need 0 <= a1 < b1 <= a2 < b2 <= 1");
    }
};

namespace qdetail {

constexpr int kMaxDim = 6;

struct PairFactor {
    int j = 0;           // the higher, already-fixed coordinate
    double expo = 0.0;
    bool sum = false;    // (x_j + x_i) instead of (x_j - x_i)
    bool adjacent = false;       // x_j is this coordinate's dynamic upper bound
    bool cross_adjacent = false; // next coordinate but in the following block
    double cross_gap = 0.0;      // lo_j - hi_i for the cross-adjacent case
};

struct PointFactor {
    double c = 0.0;
    double expo = 0.0;
    int anchor = 0; // 1: c is the static lower bound, 2: the static upper bound
};

struct Integrand {
    int k = 0;
    std::array<double, kMaxDim> lo{}, hi{};
    std::array<int, kMaxDim> block{};
    std::array<std::vector<PairFactor>, kMaxDim> pairs;   // indexed by the lower coord
    std::array<std::vector<PointFactor>, kMaxDim> points;
    std::array<const PiecewisePoly*, kMaxDim> weight{};
    double prefactor = 1.0;
};

struct RunCtx {
    long long evals = 0;
    long long budget = 60'000'000;
    double rel_tol_level = 1e-7;
    int max_level = 6;
};

class NestedIntegrator {
public:
    NestedIntegrator(const Integrand& ig, RunCtx& ctx) : ig_(ig), ctx_(ctx) {}

    detail::ValErr run() {
        if (ig_.k == 0) return {1.0, 0.0};
        return level(ig_.k - 1);
    }

private:
    detail::ValErr level(int i) {
        const double lo = ig_.lo[static_cast<std::size_t>(i)];
        const double ub = (i + 1 < ig_.k && ig_.block[static_cast<std::size_t>(i + 1)] ==
                                                ig_.block[static_cast<std::size_t>(i)])
                              ? x_[static_cast<std::size_t>(i + 1)]
                              : ig_.hi[static_cast<std::size_t>(i)];
        if (!(ub > lo)) return {0.0, 0.0};

        auto f = [&](double xx, double da, double db) -> detail::ValErr {
            x_[static_cast<std::size_t>(i)] = xx;
            dlo_[static_cast<std::size_t>(i)] = da;
            const double fac = factors(i, xx, da, db);
            if (i == 0) {
                ++ctx_.evals;
                return {fac, 0.0};
            }
            const detail::ValErr inner = level(i - 1);
            return {fac * inner.v, std::abs(fac) * inner.e};
        };

        detail::TSOptions opt;
        opt.rel_tol = ctx_.rel_tol_level;
        opt.max_level = ctx_.max_level;
        opt.evals = &ctx_.evals;
        opt.budget = ctx_.budget;

        const PiecewisePoly* w = ig_.weight[static_cast<std::size_t>(i)];
        if (!w || w->breaks.size() <= 2) return detail::tanh_sinh(f, lo, ub, opt);

        // Split at interior weight breakpoints so each panel stays smooth.
        detail::ValErr total;
        double left = lo;
        for (std::size_t bi = 1; bi + 1 < w->breaks.size(); ++bi) {
            const double brk = w->breaks[bi];
            if (brk <= left || brk >= ub) continue;
            accumulate(total, sub_integral(f, lo, ub, left, brk, opt));
            left = brk;
        }
        accumulate(total, sub_integral(f, lo, ub, left, ub, opt));
        return total;
    }

    template <class F>
    detail::ValErr sub_integral(F& f, double lo, double ub, double a, double b,
                                const detail::TSOptions& opt) {
        auto g = [&](double xx, double da, double db) -> detail::ValErr {
            const double to_lo = (a == lo) ? da : xx - lo;
            const double to_ub = (b == ub) ? db : ub - xx;
            return f(xx, to_lo, to_ub);
        };
        return detail::tanh_sinh(g, a, b, opt);
    }

    static void accumulate(detail::ValErr& acc, const detail::ValErr& t) {
        acc.v += t.v;
        acc.e += t.e;
    }

    double factors(int i, double xx, double da, double db) const {
        double fac = 1.0;
        for (const auto& pt : ig_.points[static_cast<std::size_t>(i)]) {
            const double v = pt.anchor == 1 ? da : pt.anchor == 2 ? db : std::abs(xx - pt.c);
            fac *= std::pow(v, pt.expo);
        }
        for (const auto& pr : ig_.pairs[static_cast<std::size_t>(i)]) {
            double v;
            if (pr.sum)
                v = x_[static_cast<std::size_t>(pr.j)] + xx;
            else if (pr.adjacent)
                v = db;
            else if (pr.cross_adjacent)
                v = db + pr.cross_gap + dlo_[static_cast<std::size_t>(pr.j)];
            else
                v = x_[static_cast<std::size_t>(pr.j)] - xx;
            fac *= std::pow(v, pr.expo);
        }
        if (const PiecewisePoly* w = ig_.weight[static_cast<std::size_t>(i)]) fac *= (*w)(xx);
        return fac;
    }

    const Integrand& ig_;
    RunCtx& ctx_;
    std::array<double, kMaxDim> x_{};
    std::array<double, kMaxDim> dlo_{};
};

inline QuadResult run_nested(const Integrand& ig, double rel_target, int max_level, long long budget) {
    RunCtx ctx;
    ctx.budget = budget;
    ctx.max_level = max_level;
    ctx.rel_tol_level = std::clamp(0.5 * rel_target, 1e-12, 3e-5);
    NestedIntegrator ni(ig, ctx);
    const detail::ValErr r = ni.run();
    return {ig.prefactor * r.v, std::abs(ig.prefactor) * r.e, ctx.evals};
}

/// Cheap first pass, tighter second pass; accuracy_error if both miss.
inline QuadResult run_to_abs_tol(const Integrand& ig, double tol, const char* what) {
    QuadResult r = run_nested(ig, 1e-5, 6, 80'000'000);
    if (r.abs_error_estimate <= tol) return r;
    const double scale = std::max(std::abs(r.value), 1e-30);
    QuadResult r2 = run_nested(ig, std::clamp(0.05 * tol / scale, 1e-9, 1e-5), 7, 400'000'000);
    r2.evaluations += r.evaluations;
    if (r2.abs_error_estimate <= tol) return r2;
    throw accuracy_error(std::string(what) + ": requested tolerance not reached", r2.value,
                         r2.abs_error_estimate);
}

/// Same escalation against a relative tolerance.
inline QuadResult run_to_rel_tol(const Integrand& ig, double rel, const char* what) {
    QuadResult r = run_nested(ig, std::max(rel, 1e-5), 6, 80'000'000);
    if (r.abs_error_estimate <= rel * std::abs(r.value)) return r;
    QuadResult r2 = run_nested(ig, std::clamp(0.1 * rel, 1e-9, 1e-5), 7, 400'000'000);
    r2.evaluations += r.evaluations;
    if (r2.abs_error_estimate <= rel * std::abs(r2.value)) return r2;
    throw accuracy_error(std::string(what) + ": requested tolerance not reached", r2.value,
                         r2.abs_error_estimate);
}

inline double pairsum_d(const std::vector<double>& d, int c) {
    double s = 0.0;
    for (int m = 1; m <= c - 1; ++m) s += (c - m) * d[static_cast<std::size_t>(m - 1)];
    return s;
}

} // namespace qdetail

/// Integrability check from the cluster estimate: a window of c coordinates
/// collapsing together contributes at order eps^{(c-1) + 2 lambda sum d}, and
/// endpoint clusters carry the extra endpoint exponents.
inline void check_selberg_integrability(const SelbergParams& p) {
    const auto& d = p.d_seq;
    for (int c = 2; c <= p.n; ++c) {
        const double expo = (c - 1) + 2.0 * p.lambda * qdetail::pairsum_d(d, c);
        if (!(expo > 0.0))
            throw std::domain_error("selberg integrand not integrable: cluster of size " +
                                    std::to_string(c) + " has exponent " + std::to_string(expo));
    }
    double dsum = 0.0;
    for (int c = 1; c <= p.n; ++c) {
        dsum += d[static_cast<std::size_t>(c - 1)];
        const double pair_part = 2.0 * p.lambda * qdetail::pairsum_d(d, c);
        if (!(c + p.lambda1 * dsum + pair_part > 0.0))
            throw std::domain_error("selberg integrand not integrable at t = 0 (cluster size " +
                                    std::to_string(c) + ")");
        if (!(c + p.lambda2 * dsum + pair_part > 0.0))
            throw std::domain_error("selberg integrand not integrable at t = 1 (cluster size " +
                                    std::to_string(c) + ")");
    }
}

namespace qdetail {

inline void validate_params(const SelbergParams& p, const char* what) {
    if (p.n < 1 || p.n > kMaxDim)
        throw std::invalid_argument(std::string(what) + ": n must be in 1..6");
    const bool endpoints = p.lambda1 != 0.0 || p.lambda2 != 0.0;
    const std::size_t need = endpoints ? static_cast<std::size_t>(p.n)
                                       : static_cast<std::size_t>(p.n > 0 ? p.n - 1 : 0);
    if (p.d_seq.size() < need)
        throw std::invalid_argument(std::string(what) + ": d_seq too short");
    for (double v : p.d_seq)
        if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": d_seq entries must be >= 0");
}

inline Integrand build_selberg(const SelbergParams& p, const PiecewisePoly* f) {
    Integrand ig;
    ig.k = p.n;
    const auto& d = p.d_seq;
    for (int i = 0; i < p.n; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        ig.lo[ii] = 0.0;
        ig.hi[ii] = 1.0;
        ig.block[ii] = 0;
        ig.weight[ii] = f;
        if (p.lambda1 != 0.0)
            ig.points[ii].push_back({0.0, p.lambda1 * d[ii], 1});
        if (p.lambda2 != 0.0)
            ig.points[ii].push_back({1.0, p.lambda2 * d[static_cast<std::size_t>(p.n - 1 - i)],
                                     i == p.n - 1 ? 2 : 0});
        if (p.lambda != 0.0)
            for (int j = i + 1; j < p.n; ++j)
                ig.pairs[ii].push_back({j, 2.0 * p.lambda * d[static_cast<std::size_t>(j - i - 1)],
                                        false, j == i + 1, false, 0.0});
    }
    return ig;
}

/// Two ordered blocks with optional pinned coordinates. Global indices run
/// 1..n over (a1,b1) then n+1..n+m over (a2,b2); pair (k < p) carries exponent
/// twolambda * d(p-k). Pins sit at block endpoints, by construction of the
/// recurrence terms.
inline Integrand build_two_block(const IntervalPair& iv, int n, int m, double twolambda,
                                 const std::vector<double>& d,
                                 const std::map<int, double>& pins = {}) {
    const int N = n + m;
    auto blk = [&](int g) { return g <= n ? 0 : 1; };
    auto blo = [&](int g) { return g <= n ? iv.a1 : iv.a2; };
    auto bhi = [&](int g) { return g <= n ? iv.b1 : iv.b2; };
    auto expo = [&](int gi, int gj) { return twolambda * d[static_cast<std::size_t>(gj - gi - 1)]; };

    std::vector<int> free_idx;
    for (int g = 1; g <= N; ++g)
        if (!pins.count(g)) free_idx.push_back(g);

    Integrand ig;
    ig.k = static_cast<int>(free_idx.size());

    for (auto p1 = pins.begin(); p1 != pins.end(); ++p1)
        for (auto p2 = std::next(p1); p2 != pins.end(); ++p2) {
            const double e = expo(std::min(p1->first, p2->first), std::max(p1->first, p2->first));
            if (e != 0.0) ig.prefactor *= std::pow(std::abs(p2->second - p1->second), e);
        }

    for (int i = 0; i < ig.k; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const int g = free_idx[ii];
        ig.lo[ii] = blo(g);
        ig.hi[ii] = bhi(g);
        ig.block[ii] = blk(g);
        const bool top_of_block = (i + 1 == ig.k) || blk(free_idx[ii + 1]) != blk(g);
        for (const auto& [gp, v] : pins) {
            const double e = expo(std::min(g, gp), std::max(g, gp));
            if (e == 0.0) continue;
            int anchor = 0;
            if (v == ig.lo[ii]) anchor = 1;
            else if (v == ig.hi[ii] && top_of_block) anchor = 2;
            ig.points[ii].push_back({v, e, anchor});
        }
        for (int j = i + 1; j < ig.k; ++j) {
            const int gj = free_idx[static_cast<std::size_t>(j)];
            const double e = expo(g, gj);
            if (e == 0.0) continue;
            PairFactor pf;
            pf.j = j;
            pf.expo = e;
            if (j == i + 1 && blk(gj) == blk(g)) {
                pf.adjacent = true;
            } else if (j == i + 1 && blk(gj) != blk(g)) {
                pf.cross_adjacent = true;
                pf.cross_gap = blo(gj) - bhi(g);
            }
            ig.pairs[ii].push_back(pf);
        }
    }
    return ig;
}

} // namespace qdetail

inline QuadResult selberg_mc(const SelbergParams& p, const PiecewisePoly* f, double tol,
                             std::uint64_t seed = 0x5e1b, long long max_samples = 30'000'000);

/// Ordered-simplex value of the generalized Selberg integral (no n! factor),
/// with an optional per-coordinate weight. `tol` is absolute.
inline QuadResult selberg_general(const SelbergParams& p, const PiecewisePoly* f, double tol) {
    qdetail::validate_params(p, "selberg_general");
    if (!(tol > 0.0)) throw std::invalid_argument("selberg_general: tol must be > 0");
    check_selberg_integrability(p);
    if (p.n <= 4) {
        const auto ig = qdetail::build_selberg(p, f);
        return qdetail::run_to_abs_tol(ig, tol, "selberg_general");
    }
    // n = 5, 6: importance-sampled Monte Carlo in gap coordinates.
    QuadResult mc = selberg_mc(p, f, tol);
    if (mc.abs_error_estimate <= tol) return mc;
    throw accuracy_error("selberg_general: Monte Carlo fallback missed tolerance", mc.value,
                         mc.abs_error_estimate);
}

/// Monte Carlo route for the ordered Selberg integral: gaps are drawn from the
/// Dirichlet law matching the endpoint and adjacent-pair exponents, so only
/// the smooth remainder is averaged.
inline QuadResult selberg_mc(const SelbergParams& p, const PiecewisePoly* f, double tol,
                             std::uint64_t seed, long long max_samples) {
    qdetail::validate_params(p, "selberg_mc");
    check_selberg_integrability(p);
    const int n = p.n;
    const auto& d = p.d_seq;
    const double d1 = d.empty() ? 0.0 : d[0];

    std::vector<double> alpha(static_cast<std::size_t>(n) + 1, 1.0 + 2.0 * p.lambda * d1);
    alpha.front() = 1.0 + p.lambda1 * d1;
    alpha.back() = 1.0 + p.lambda2 * d1;
    double log_beta = 0.0, alpha_sum = 0.0;
    for (double a : alpha) {
        log_beta += std::lgamma(a);
        alpha_sum += a;
    }
    log_beta -= std::lgamma(alpha_sum);

    RngStream rng(seed, 0, 0);
    std::vector<double> g(static_cast<std::size_t>(n) + 1), t(static_cast<std::size_t>(n));
    double sum = 0.0, sumsq = 0.0;
    long long taken = 0;
    const long long batch = 1 << 16;
    while (taken < max_samples) {
        for (long long s = 0; s < batch; ++s) {
            double tot = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = rng.gamma(alpha[i]);
                tot += g[i];
            }
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += g[static_cast<std::size_t>(i)] / tot;
                t[static_cast<std::size_t>(i)] = acc;
            }
            // Everything the Dirichlet proposal did not absorb.
            double val = std::exp(log_beta);
            for (int i = 0; i < n; ++i) {
                const double ti = t[static_cast<std::size_t>(i)];
                if (p.lambda1 != 0.0 && i > 0)
                    val *= std::pow(ti, p.lambda1 * d[static_cast<std::size_t>(i)]);
                if (p.lambda2 != 0.0 && i < n - 1)
                    val *= std::pow(1.0 - ti, p.lambda2 * d[static_cast<std::size_t>(n - 1 - i)]);
                if (f) val *= (*f)(ti);
                for (int j = i + 2; j < n; ++j)
                    val *= std::pow(t[static_cast<std::size_t>(j)] - ti,
                                    2.0 * p.lambda * d[static_cast<std::size_t>(j - i - 1)]);
            }
            sum += val;
            sumsq += val * val;
        }
        taken += batch;
        const double mean = sum / static_cast<double>(taken);
        const double var = std::max(0.0, sumsq / static_cast<double>(taken) - mean * mean);
        const double se = std::sqrt(var / static_cast<double>(taken));
        if (taken >= 4 * batch && se <= tol)
            return {mean, se, taken};
    }
    const double mean = sum / static_cast<double>(taken);
    const double var = std::max(0.0, sumsq / static_cast<double>(taken) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(taken)), taken};
}

/// Joint (n,m) moment over an interval pair: the ordered block integral times
/// n! m!, with pair exponents -mu d(p-k) from the spectrum.
inline QuadResult joint_moment_quad(const LevySpectrum& spec, double mu, const IntervalPair& iv,
                                    int n, int m, double tol) {
    iv.validate();
    if (n < 1 || m < 1 || n + m > 5)
        throw std::invalid_argument("joint_moment_quad: need n,m >= 1 and n+m <= 5");
    if (mu < 0.0) throw std::invalid_argument("joint_moment_quad: mu must be >= 0");
    const int N = n + m;
    if (mu > 0.0) {
        const auto fin = moment_finiteness(spec, mu, static_cast<double>(N));
        if (fin.verdict != FinitenessVerdict::Finite)
            throw std::domain_error("joint_moment_quad: moment of order " + std::to_string(N) +
                                    " not finite at mu = " + std::to_string(mu));
    }
    const std::vector<double> d = N >= 2 ? d_seq(spec, N - 1) : std::vector<double>{};
    const double twolambda = -mu;
    // Cluster checks: within blocks and, for touching blocks, across b1 = a2.
    for (int c = 2; c <= std::max(n, m); ++c)
        if (!((c - 1) + twolambda * qdetail::pairsum_d(d, c) > 0.0))
            throw std::domain_error("joint_moment_quad: in-block cluster of size " +
                                    std::to_string(c) + " not integrable");
    if (iv.b1 == iv.a2)
        for (int c = 2; c <= N; ++c)
            if (!(c + twolambda * qdetail::pairsum_d(d, c) > 0.0))
                throw std::domain_error("joint_moment_quad: cluster at the touching point not integrable");

    auto ig = qdetail::build_two_block(iv, n, m, twolambda, d);
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    for (int i = 2; i <= m; ++i) fact *= i;
    ig.prefactor *= fact;
    return qdetail::run_to_abs_tol(ig, tol, "joint_moment_quad");
}

/// Relative residual of the single-moment recurrence
///   S_n(l,0,0) = S_{n-2}(l,2l,2l) / ((n-1+2l phi(-in)) (n+2l phi(-in))),
/// both sides by quadrature at relative tolerance `tol`.
inline double recurrence_residual_single(const SelbergParams& p, const LevySpectrum& spec,
                                         double tol) {
    if (p.n < 2) throw std::invalid_argument("recurrence_residual_single: n must be >= 2");
    if (p.lambda1 != 0.0 || p.lambda2 != 0.0)
        throw std::invalid_argument("recurrence_residual_single: lambda1 = lambda2 = 0 required");
    qdetail::validate_params(p, "recurrence_residual_single");
    check_selberg_integrability(p);

    const auto lhs = qdetail::run_to_rel_tol(qdetail::build_selberg(p, nullptr), tol,
                                             "recurrence_residual_single(lhs)");
    const double phin = phi_im(spec, static_cast<double>(p.n));
    const double denom = (p.n - 1 + 2.0 * p.lambda * phin) * (p.n + 2.0 * p.lambda * phin);

    double rhs;
    if (p.n == 2) {
        rhs = 1.0; // S_0 = 1
    } else {
        SelbergParams inner{p.n - 2, p.lambda, 2.0 * p.lambda, 2.0 * p.lambda,
                            std::vector<double>(p.d_seq.begin(), p.d_seq.begin() + (p.n - 2))};
        check_selberg_integrability(inner);
        rhs = qdetail::run_to_rel_tol(qdetail::build_selberg(inner, nullptr), tol,
                                      "recurrence_residual_single(rhs)")
                  .value;
    }
    return std::abs(lhs.value - rhs / denom) / std::abs(lhs.value);
}

/// Relative residual of the joint recurrence: the full two-block integral
/// against the six pinned boundary integrals. Terms whose pins collide on one
/// coordinate (n = 1 or m = 1) vanish with their zero coefficient.
inline double recurrence_residual_joint(const LevySpectrum& spec, double mu, const IntervalPair& iv,
                                        int n, int m, double tol) {
    iv.validate();
    if (n < 1 || m < 1 || n + m > 5)
        throw std::invalid_argument("recurrence_residual_joint: need n,m >= 1 and n+m <= 5");
    const int N = n + m;
    const double twolambda = -mu;
    const std::vector<double> d = d_seq(spec, N - 1);

    const auto lhs = qdetail::run_to_rel_tol(qdetail::build_two_block(iv, n, m, twolambda, d), tol,
                                             "recurrence_residual_joint(lhs)");

    const double phiN = phi_im(spec, static_cast<double>(N));
    const double denom = (N - 1 - mu * phiN) * (N - mu * phiN);

    struct Term {
        double coef;
        std::map<int, double> pins;
        bool enabled;
    };
    const double a1 = iv.a1, b1 = iv.b1, a2 = iv.a2, b2 = iv.b2;
    const Term terms[6] = {
        {+(b2 - a1) * (b2 - a1), {{1, a1}, {N, b2}}, true},
        {+(b1 - a1) * (b1 - a1), {{1, a1}, {n, b1}}, n >= 2},
        {-(a2 - a1) * (a2 - a1), {{1, a1}, {n + 1, a2}}, true},
        {-(b2 - b1) * (b2 - b1), {{n, b1}, {N, b2}}, true},
        {+(b2 - a2) * (b2 - a2), {{n + 1, a2}, {N, b2}}, m >= 2},
        {+(a2 - b1) * (a2 - b1), {{n, b1}, {n + 1, a2}}, true},
    };

    double rhs = 0.0;
    for (const auto& t : terms) {
        if (!t.enabled || t.coef == 0.0) continue;
        const auto ig = qdetail::build_two_block(iv, n, m, twolambda, d, t.pins);
        rhs += t.coef *
               qdetail::run_to_rel_tol(ig, tol, "recurrence_residual_joint(pinned)").value;
    }
    rhs /= denom;
    return std::abs(lhs.value - rhs) / std::abs(lhs.value);
}

namespace qdetail {

// One bracket term of the 2-D reductions: per-variable point-factor lists
// (factor |v - c|^{2 lambda} for each listed c) and one x-y pair factor.
struct BracketTerm {
    double coef;
    std::vector<double> x_pts;
    std::vector<double> y_pts;
    bool pair_is_sum;
};

inline QuadResult bracket_integral(const BracketTerm& term, double lambda, double rel_tol) {
    const double e = 2.0 * lambda;
    auto point_list = [&](const std::vector<double>& cs, bool top) {
        std::vector<PointFactor> out;
        for (double c : cs) {
            int anchor = 0;
            if (c == 0.0) anchor = 1;
            else if (c == 1.0 && top) anchor = 2;
            out.push_back({c, e, anchor});
        }
        return out;
    };

    if (term.pair_is_sum) {
        // No diagonal singularity: integrate over the full square.
        Integrand ig;
        ig.k = 2;
        ig.lo = {0.0, 0.0};
        ig.hi = {1.0, 1.0};
        ig.block = {0, 1};
        ig.points[0] = point_list(term.x_pts, true);
        ig.points[1] = point_list(term.y_pts, true);
        ig.pairs[0].push_back({1, e, true, false, false, 0.0});
        return run_to_rel_tol(ig, rel_tol, "bracket term (square)");
    }
    // |x - y| factor: split into the two ordered triangles. All diff terms in
    // the brackets are x<->y symmetric, so one triangle doubled suffices.
    Integrand ig;
    ig.k = 2;
    ig.lo = {0.0, 0.0};
    ig.hi = {1.0, 1.0};
    ig.block = {0, 0};
    ig.points[0] = point_list(term.x_pts, false);
    ig.points[1] = point_list(term.y_pts, true);
    ig.pairs[0].push_back({1, e, false, true, false, 0.0});
    ig.prefactor = 2.0;
    return run_to_rel_tol(ig, rel_tol, "bracket term (triangle)");
}

inline QuadResult bracket_sum(const std::vector<BracketTerm>& terms, double lambda, double denom,
                              double rel_tol) {
    QuadResult out;
    for (const auto& t : terms) {
        const QuadResult r = bracket_integral(t, lambda, rel_tol);
        out.value += t.coef * r.value;
        out.abs_error_estimate += std::abs(t.coef) * r.abs_error_estimate;
        out.evaluations += r.evaluations;
    }
    out.value /= denom;
    out.abs_error_estimate /= std::abs(denom);
    return out;
}

inline void check_prop51_lambda(double lambda, const char* what) {
    if (!(lambda > -0.25))
        throw std::domain_error(std::string(what) + ": need lambda > -1/4 (prefactor pole or "
                                                    "non-integrable bracket)");
}

} // namespace qdetail

/// S_{1,3}(lambda) via its 2-D reduction (four bracket terms over [0,1]^2).
inline QuadResult s13_2d(double lambda, double tol) {
    qdetail::check_prop51_lambda(lambda, "s13_2d");
    using BT = qdetail::BracketTerm;
    const std::vector<BT> terms = {
        {2.0, {1.0, 0.0}, {-1.0, 0.0}, true},
        {-1.0, {-1.0, 0.0}, {-1.0, 0.0}, false},
        {std::pow(4.0, lambda + 1.0), {1.0, -1.0}, {-1.0, 1.0}, false},
        {-1.0, {1.0, 0.0}, {1.0, 0.0}, false},
    };
    const double denom = 4.0 * (3.0 * lambda + 1.0) * (4.0 * lambda + 1.0);
    return qdetail::bracket_sum(terms, lambda, denom, tol);
}

/// S_{2,2}(lambda) via its 2-D reduction (three bracket terms).
inline QuadResult s22_2d(double lambda, double tol) {
    qdetail::check_prop51_lambda(lambda, "s22_2d");
    using BT = qdetail::BracketTerm;
    const std::vector<BT> terms = {
        {1.0, {-1.0, 0.0}, {-1.0, 0.0}, false},
        {-2.0, {1.0, 0.0}, {-1.0, 0.0}, true},
        {std::pow(4.0, lambda + 1.0), {1.0, -1.0}, {-1.0, 1.0}, true},
    };
    const double denom = 3.0 * (3.0 * lambda + 1.0) * (4.0 * lambda + 1.0);
    return qdetail::bracket_sum(terms, lambda, denom, tol);
}

/// Direct 4-D quadrature of the S_{1,3} cube integral. The integrand is
/// symmetric in (x2,x3,x4), so one ordered sector is integrated and scaled.
inline QuadResult s13_direct4d(double lambda, double tol) {
    qdetail::check_prop51_lambda(lambda, "s13_direct4d");
    const double e = 2.0 * lambda;
    qdetail::Integrand ig;
    ig.k = 4;
    ig.lo = {0.0, 0.0, 0.0, 0.0};
    ig.hi = {1.0, 1.0, 1.0, 1.0};
    ig.block = {0, 1, 1, 1};
    ig.pairs[0] = {{1, e, true, false, false, 0.0},
                   {2, e, true, false, false, 0.0},
                   {3, e, true, false, false, 0.0}};
    ig.pairs[1] = {{2, e, false, true, false, 0.0}, {3, e, false, false, false, 0.0}};
    ig.pairs[2] = {{3, e, false, true, false, 0.0}};
    ig.prefactor = 6.0;
    return qdetail::run_to_rel_tol(ig, tol, "s13_direct4d");
}

/// Direct 4-D quadrature of the S_{2,2} cube integral (two ordered pairs).
inline QuadResult s22_direct4d(double lambda, double tol) {
    qdetail::check_prop51_lambda(lambda, "s22_direct4d");
    const double e = 2.0 * lambda;
    qdetail::Integrand ig;
    ig.k = 4;
    ig.lo = {0.0, 0.0, 0.0, 0.0};
    ig.hi = {1.0, 1.0, 1.0, 1.0};
    ig.block = {0, 0, 1, 1};
    ig.pairs[0] = {{1, e, false, true, false, 0.0},
                   {2, e, true, false, false, 0.0},
                   {3, e, true, false, false, 0.0}};
    ig.pairs[1] = {{2, e, true, false, false, 0.0}, {3, e, true, false, false, 0.0}};
    ig.pairs[2] = {{3, e, false, true, false, 0.0}};
    ig.prefactor = 4.0;
    return qdetail::run_to_rel_tol(ig, tol, "s22_direct4d");
}

} // namespace logid
