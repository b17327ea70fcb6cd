#pragma once

// Monte Carlo construction of the finite-scale measure: sample the field
// u -> P(A_eps(u)) on a grid for the gaussian and log-Poisson integrators,
// integrate exp(P) for interval masses, and estimate moments, multiscaling
// and the log-mass covariance with jackknife error bars.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "logid/errors.hpp"
#include "logid/levy.hpp"
#include "logid/rng.hpp"

namespace logid {

struct SimConfig {
    double epsilon = 1e-2;
    int grid_n = 512;
    long paths = 1000;
    std::uint64_t seed = 1;
    double mu = 0.2;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("SimConfig: epsilon must be in (0,1)");
        if (grid_n < 1) throw std::invalid_argument("SimConfig: grid_n must be >= 1");
        if (1.0 / grid_n > epsilon / 4.0)
            throw std::invalid_argument(
                "SimConfig: grid spacing 1/grid_n must be <= epsilon/4 to resolve the kernel");
        if (paths < 1) throw std::invalid_argument("SimConfig: paths must be >= 1");
        if (!(mu >= 0.0)) throw std::invalid_argument("SimConfig: mu must be >= 0");
    }
};

struct FieldPath {
    std::vector<double> values; // P(A_eps(u_i)) at grid nodes u_i = (i+1/2)/n
};

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long paths_used = 0;
};

/// Intensity of cone intersections: log(1/h) on [eps, 1], capped linearly
/// below eps, zero beyond 1.
inline double rho_eps(double epsilon, double h) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("rho_eps: epsilon must be in (0,1)");
    if (!(h >= 0.0)) throw std::invalid_argument("rho_eps: h must be >= 0");
    if (h > 1.0) return 0.0;
    if (h < epsilon) return 1.0 + std::log(1.0 / epsilon) - h / epsilon;
    return std::log(1.0 / h);
}

inline std::vector<double> grid_nodes(int n) {
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = (i + 0.5) / n;
    return u;
}

/// Deterministic pairwise reduction (fixed association independent of any
/// batching), so estimator outputs do not depend on how work was scheduled.
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

/// Riemann sum of exp(P) over the grid cells whose midpoint lies in [a, b).
inline double measure_mass(const FieldPath& path, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 1.0))
        throw std::invalid_argument("measure_mass: need 0 <= a < b <= 1");
    const int n = static_cast<int>(path.values.size());
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        if (u >= a && u < b) s += std::exp(path.values[static_cast<std::size_t>(i)]);
    }
    return s / n;
}

/// Stationary gaussian field with covariance mu rho_eps(|u-v|) and mean
/// -mu rho_eps(0)/2, sampled by dense Cholesky factorization (jitter 1e-12).
class GaussianFieldSampler {
public:
    GaussianFieldSampler(const SimConfig& cfg, std::vector<double> nodes)
        : cfg_(cfg), nodes_(std::move(nodes)) {
        const auto n = static_cast<Eigen::Index>(nodes_.size());
        mean_ = -0.5 * cfg_.mu * rho_eps(cfg_.epsilon, 0.0);
        if (cfg_.mu == 0.0) return; // exactly zero field
        Eigen::MatrixXd cov(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) {
                const double h = std::abs(nodes_[static_cast<std::size_t>(i)] -
                                          nodes_[static_cast<std::size_t>(j)]);
                cov(i, j) = cov(j, i) = cfg_.mu * rho_eps(cfg_.epsilon, h);
            }
        cov.diagonal().array() += 1e-12;
        llt_.compute(cov);
        if (llt_.info() != Eigen::Success)
            throw numerical_error("GaussianFieldSampler: covariance factorization failed");
    }

    explicit GaussianFieldSampler(const SimConfig& cfg)
        : GaussianFieldSampler(cfg, grid_nodes(cfg.grid_n)) {}

    const std::vector<double>& nodes() const { return nodes_; }

    FieldPath sample(long path_index) const {
        const auto n = static_cast<Eigen::Index>(nodes_.size());
        Eigen::MatrixXd z(n, 1);
        fill_normals(z, path_index);
        FieldPath p;
        p.values.assign(static_cast<std::size_t>(n), mean_);
        if (cfg_.mu != 0.0) {
            z = llt_.matrixL() * z;
            for (Eigen::Index i = 0; i < n; ++i) p.values[static_cast<std::size_t>(i)] += z(i, 0);
        }
        return p;
    }

    /// Columns of `out` become paths first_path .. first_path+count-1.
    void sample_batch(long first_path, int count, Eigen::MatrixXd& out) const {
        const auto n = static_cast<Eigen::Index>(nodes_.size());
        out.resize(n, count);
        for (int c = 0; c < count; ++c) fill_normals_col(out, c, first_path + c);
        if (cfg_.mu != 0.0)
            out = llt_.matrixL() * out;
        else
            out.setZero();
        out.array() += mean_;
    }

private:
    void fill_normals(Eigen::MatrixXd& z, long path) const { fill_normals_col(z, 0, path); }

    void fill_normals_col(Eigen::MatrixXd& m, int col, long path) const {
        RngStream rng(cfg_.seed, static_cast<std::uint64_t>(path), 0);
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, col) = rng.normal();
    }

    SimConfig cfg_;
    std::vector<double> nodes_;
    double mean_ = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Poisson cone construction for the log-Poisson integrator: points (t, l)
/// with intensity mu dt dl/l^2; a point covers node u iff |t-u| <= l/2
/// (l <= 1) or |t-u| <= 1/2 (l > 1). The l > 1 layer is sampled exactly via
/// l = 1/U, so no truncation bias enters.
class PoissonFieldSampler {
public:
    PoissonFieldSampler(const SimConfig& cfg, double c, std::vector<double> nodes)
        : cfg_(cfg), c_(c), nodes_(std::move(nodes)) {
        if (!(c_ > 0.0) || c_ == 1.0)
            throw std::invalid_argument("PoissonFieldSampler: need c > 0, c != 1");
        t_lo_ = nodes_.front() - 0.5;
        t_hi_ = nodes_.back() + 0.5;
        offset_ = -cfg_.mu * (c_ - 1.0) * rho_eps(cfg_.epsilon, 0.0);
    }

    PoissonFieldSampler(const SimConfig& cfg, double c)
        : PoissonFieldSampler(cfg, c, grid_nodes(cfg.grid_n)) {}

    const std::vector<double>& nodes() const { return nodes_; }

    std::vector<long> sample_counts(long path_index) const {
        RngStream rng(cfg_.seed, static_cast<std::uint64_t>(path_index), 1);
        const double span = t_hi_ - t_lo_;
        const double inv_eps = 1.0 / cfg_.epsilon;
        std::vector<long> diff(nodes_.size() + 1, 0);

        // Scale band eps <= l <= 1, intensity mass mu * span * (1/eps - 1).
        const long n_band = rng.poisson(cfg_.mu * span * (inv_eps - 1.0));
        for (long k = 0; k < n_band; ++k) {
            const double t = t_lo_ + span * rng.uniform();
            const double l = 1.0 / (inv_eps - rng.uniform() * (inv_eps - 1.0));
            cover(diff, t, 0.5 * l);
        }
        // Flat top l > 1: residual intensity integrates to mu * span.
        const long n_top = rng.poisson(cfg_.mu * span);
        for (long k = 0; k < n_top; ++k) {
            const double t = t_lo_ + span * rng.uniform();
            cover(diff, t, 0.5);
        }

        std::vector<long> counts(nodes_.size());
        long acc = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            acc += diff[i];
            counts[i] = acc;
        }
        return counts;
    }

    FieldPath sample(long path_index) const {
        const auto counts = sample_counts(path_index);
        FieldPath p;
        p.values.resize(counts.size());
        const double lc = std::log(c_);
        for (std::size_t i = 0; i < counts.size(); ++i)
            p.values[i] = lc * static_cast<double>(counts[i]) + offset_;
        return p;
    }

private:
    void cover(std::vector<long>& diff, double t, double r) const {
        // nodes are sorted; mark [t-r, t+r]
        const auto lo = std::lower_bound(nodes_.begin(), nodes_.end(), t - r);
        const auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), t + r);
        if (lo == hi) return;
        ++diff[static_cast<std::size_t>(lo - nodes_.begin())];
        --diff[static_cast<std::size_t>(hi - nodes_.begin())];
    }

    SimConfig cfg_;
    double c_;
    std::vector<double> nodes_;
    double t_lo_ = 0.0, t_hi_ = 0.0;
    double offset_ = 0.0;
};

struct ModelSpec {
    bool poisson = false;
    double c = 2.0; // only for the Poisson model

    static ModelSpec gaussian() { return ModelSpec{false, 0.0}; }
    static ModelSpec log_poisson(double c) { return ModelSpec{true, c}; }

    LevySpectrum spectrum() const {
        return poisson ? LevySpectrum::log_poisson(c) : LevySpectrum::gaussian(1.0);
    }
};

inline FieldPath simulate_gaussian(const SimConfig& cfg) {
    cfg.validate();
    return GaussianFieldSampler(cfg).sample(0);
}

inline FieldPath simulate_poisson(const SimConfig& cfg, double c) {
    cfg.validate();
    return PoissonFieldSampler(cfg, c).sample(0);
}

struct Interval {
    double a = 0.0, b = 1.0;
};

namespace simdetail {

/// Stream per-path interval masses to a consumer: fn(path_index, masses).
template <class Fn>
void run_masses(const SimConfig& cfg, const ModelSpec& model, const std::vector<Interval>& ivs,
                Fn&& fn) {
    cfg.validate();
    const int g = cfg.grid_n;
    std::vector<std::pair<int, int>> ranges; // node index ranges per interval
    for (const auto& iv : ivs) {
        if (!(0.0 <= iv.a && iv.a < iv.b && iv.b <= 1.0))
            throw std::invalid_argument("run_masses: bad interval");
        const int lo = static_cast<int>(std::ceil(iv.a * g - 0.5));
        int hi = static_cast<int>(std::floor(iv.b * g - 0.5));
        if ((hi + 0.5) / g == iv.b) --hi; // half-open [a, b)
        ranges.emplace_back(std::max(lo, 0), std::min(hi, g - 1));
    }
    std::vector<double> masses(ivs.size());
    std::vector<double> expv(static_cast<std::size_t>(g));

    auto emit = [&](long path, const double* values) {
        for (int i = 0; i < g; ++i) expv[static_cast<std::size_t>(i)] = std::exp(values[i]);
        for (std::size_t j = 0; j < ranges.size(); ++j) {
            double s = 0.0;
            for (int i = ranges[j].first; i <= ranges[j].second; ++i)
                s += expv[static_cast<std::size_t>(i)];
            masses[j] = s / g;
        }
        fn(path, masses);
    };

    if (model.poisson) {
        PoissonFieldSampler sampler(cfg, model.c);
        for (long p = 0; p < cfg.paths; ++p) {
            const FieldPath fp = sampler.sample(p);
            emit(p, fp.values.data());
        }
    } else {
        GaussianFieldSampler sampler(cfg);
        const int batch = 256;
        Eigen::MatrixXd block;
        for (long p0 = 0; p0 < cfg.paths; p0 += batch) {
            const int count = static_cast<int>(std::min<long>(batch, cfg.paths - p0));
            sampler.sample_batch(p0, count, block);
            for (int c = 0; c < count; ++c) emit(p0 + c, block.col(c).data());
        }
    }
}

inline MomentEstimate mean_with_jackknife(const std::vector<double>& y) {
    const auto p = static_cast<double>(y.size());
    const double mean = pairwise_sum(y) / p;
    std::vector<double> dev2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dev2[i] = (y[i] - mean) * (y[i] - mean);
    const double ss = pairwise_sum(dev2);
    return {mean, std::sqrt(ss / (p * (p - 1.0))), static_cast<long>(y.size())};
}

} // namespace simdetail

/// Empirical mean of prod_j mass(I_j)^{q_j} with jackknife standard error.
inline MomentEstimate estimate_moment(const SimConfig& cfg, const ModelSpec& model,
                                      const std::vector<Interval>& intervals,
                                      const std::vector<double>& powers) {
    if (intervals.empty() || intervals.size() != powers.size())
        throw std::invalid_argument("estimate_moment: intervals/powers size mismatch");
    std::vector<double> y(static_cast<std::size_t>(cfg.paths));
    simdetail::run_masses(cfg, model, intervals, [&](long p, const std::vector<double>& m) {
        double v = 1.0;
        for (std::size_t j = 0; j < m.size(); ++j) v *= std::pow(m[j], powers[j]);
        y[static_cast<std::size_t>(p)] = v;
    });
    return simdetail::mean_with_jackknife(y);
}

/// Covariance of log mass(t, t+tau) and log mass(0, tau), jackknifed.
inline MomentEstimate estimate_log_covariance(const SimConfig& cfg, const ModelSpec& model,
                                              double t, double tau) {
    if (!(tau < t && t + tau < 1.0))
        throw std::invalid_argument("estimate_log_covariance: need tau < t and t + tau < 1");
    std::vector<double> x(static_cast<std::size_t>(cfg.paths)), y(x.size());
    simdetail::run_masses(cfg, model, {{t, t + tau}, {0.0, tau}},
                          [&](long p, const std::vector<double>& m) {
                              x[static_cast<std::size_t>(p)] = std::log(m[0]);
                              y[static_cast<std::size_t>(p)] = std::log(m[1]);
                          });
    const auto np = static_cast<double>(cfg.paths);
    const double sx = pairwise_sum(x), sy = pairwise_sum(y);
    std::vector<double> xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] * y[i];
    const double sxy = pairwise_sum(xy);
    const double cov = (sxy - sx * sy / np) / (np - 1.0);

    // Leave-one-out covariances.
    std::vector<double> loo(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sx1 = sx - x[i], sy1 = sy - y[i], sxy1 = sxy - x[i] * y[i];
        loo[i] = (sxy1 - sx1 * sy1 / (np - 1.0)) / (np - 2.0);
    }
    const double lbar = pairwise_sum(loo) / np;
    std::vector<double> dev2(loo.size());
    for (std::size_t i = 0; i < loo.size(); ++i) dev2[i] = (loo[i] - lbar) * (loo[i] - lbar);
    const double se = std::sqrt((np - 1.0) / np * pairwise_sum(dev2));
    return {cov, se, cfg.paths};
}

/// Slope of Cov(log mass(t,t+tau), log mass(0,tau)) regressed on -log t over
/// the given t grid; target value is mu * log_cov_coefficient(spectrum).
/// The slope is linear in the per-t covariances, so the jackknife runs over
/// paths with O(1) leave-one-out updates.
inline MomentEstimate estimate_log_cov_slope(const SimConfig& cfg, const ModelSpec& model,
                                             const std::vector<double>& ts, double tau) {
    if (ts.size() < 2) throw std::invalid_argument("estimate_log_cov_slope: need >= 2 t values");
    const std::size_t T = ts.size();
    const auto P = static_cast<std::size_t>(cfg.paths);
    std::vector<Interval> ivs;
    ivs.push_back({0.0, tau});
    for (double t : ts) {
        if (!(tau < t && t + tau < 1.0))
            throw std::invalid_argument("estimate_log_cov_slope: need tau < t and t + tau < 1");
        ivs.push_back({t, t + tau});
    }
    std::vector<std::vector<double>> lx(T + 1, std::vector<double>(P));
    simdetail::run_masses(cfg, model, ivs, [&](long p, const std::vector<double>& m) {
        for (std::size_t j = 0; j <= T; ++j)
            lx[j][static_cast<std::size_t>(p)] = std::log(m[j]);
    });

    std::vector<double> xi(T);
    double xbar = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
        xi[j] = -std::log(ts[j]);
        xbar += xi[j];
    }
    xbar /= static_cast<double>(T);
    double sxx = 0.0;
    for (std::size_t j = 0; j < T; ++j) sxx += (xi[j] - xbar) * (xi[j] - xbar);

    const double np = static_cast<double>(P);
    const auto& y0 = lx[0];
    const double sy0 = pairwise_sum(y0);
    std::vector<double> sx(T), sxy(T);
    std::vector<std::vector<double>> prod(T, std::vector<double>(P));
    for (std::size_t j = 0; j < T; ++j) {
        sx[j] = pairwise_sum(lx[j + 1]);
        for (std::size_t i = 0; i < P; ++i) prod[j][i] = lx[j + 1][i] * y0[i];
        sxy[j] = pairwise_sum(prod[j]);
    }
    auto slope_from = [&](const std::vector<double>& covs) {
        double s = 0.0, cbar = 0.0;
        for (double c : covs) cbar += c;
        cbar /= static_cast<double>(T);
        for (std::size_t j = 0; j < T; ++j) s += (xi[j] - xbar) * (covs[j] - cbar);
        return s / sxx;
    };

    std::vector<double> covs(T);
    for (std::size_t j = 0; j < T; ++j) covs[j] = (sxy[j] - sx[j] * sy0 / np) / (np - 1.0);
    const double slope = slope_from(covs);

    std::vector<double> loo_slopes(P), cj(T);
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < T; ++j) {
            const double sx1 = sx[j] - lx[j + 1][i];
            const double sy1 = sy0 - y0[i];
            const double sxy1 = sxy[j] - prod[j][i];
            cj[j] = (sxy1 - sx1 * sy1 / (np - 1.0)) / (np - 2.0);
        }
        loo_slopes[i] = slope_from(cj);
    }
    const double lbar = pairwise_sum(loo_slopes) / np;
    std::vector<double> dev2(P);
    for (std::size_t i = 0; i < P; ++i) dev2[i] = (loo_slopes[i] - lbar) * (loo_slopes[i] - lbar);
    const double se = std::sqrt((np - 1.0) / np * pairwise_sum(dev2));
    return {slope, se, cfg.paths};
}

} // namespace logid
