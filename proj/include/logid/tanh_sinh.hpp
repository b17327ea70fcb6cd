#pragma once

// Double-exponential (tanh-sinh) quadrature on a finite interval. The node
// transform absorbs algebraic endpoint singularities of any strength > -1,
// which is exactly what the Selberg-type integrands throw at it. Nodes carry
// their distance to the near endpoint so integrands can evaluate factors like
// (b - x)^alpha without cancellation.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace logid::detail {

struct ValErr {
    double v = 0.0;
    double e = 0.0;
};

struct TSNode {
    double x;     // abscissa in (0, 1) measured on the positive half
    double delta; // 1 - x, stable for x near 1
    double w;     // weight, excluding the step h
};

class TanhSinhTable {
public:
    static constexpr int kMaxLevel = 9;
    static constexpr double kTMax = 6.0; // delta(6.0) ~ 1e-280, past any use

    static const TanhSinhTable& instance() {
        static const TanhSinhTable table;
        return table;
    }

    // Level 0 holds t = h0, 2 h0, ...; level L > 0 the odd multiples of h0/2^L.
    const std::vector<TSNode>& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
    double center_weight() const { return center_w_; }

private:
    TanhSinhTable() {
        center_w_ = make(0.0).w;
        for (int l = 0; l <= kMaxLevel; ++l) {
            const double h = 1.0 / static_cast<double>(1 << l);
            std::vector<TSNode> nodes;
            for (int j = 1;; j += (l == 0 ? 1 : 2)) {
                const double t = j * h;
                if (t > kTMax) break;
                nodes.push_back(make(t));
            }
            levels_[static_cast<std::size_t>(l)] = std::move(nodes);
        }
    }

    static TSNode make(double t) {
        const double z = 0.5 * M_PI * std::sinh(t);
        const double em = std::exp(-2.0 * z);
        const double delta = 2.0 * em / (1.0 + em); // 1 - tanh(z)
        const double w = 2.0 * M_PI * std::cosh(t) * em / ((1.0 + em) * (1.0 + em));
        return TSNode{1.0 - delta, delta, w};
    }

    std::array<std::vector<TSNode>, kMaxLevel + 1> levels_;
    double center_w_ = 0.0;
};

struct TSOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int min_level = 2;
    int max_level = 6;
    long long* evals = nullptr;  // shared counter, incremented by the integrand
    long long budget = -1;       // once exceeded, stop refining levels
};

/// Integrate f over (a, b); f(x, dist_to_a, dist_to_b) -> ValErr. The returned
/// error is the last level-to-level difference plus the integrated inner-error
/// channel, i.e. a usable (conservative) bound, not a guess.
template <class F>
ValErr tanh_sinh(F&& f, double a, double b, const TSOptions& opt) {
    if (!(b > a)) return {0.0, 0.0};
    const auto& tab = TanhSinhTable::instance();
    const double r = 0.5 * (b - a);
    const double len = b - a;

    auto node_term = [&](const TSNode& nd, bool upper) -> ValErr {
        double da, db, x;
        if (upper) {
            db = r * nd.delta;
            da = len - db;
            x = b - db;
        } else {
            da = r * nd.delta;
            db = len - da;
            x = a + da;
        }
        const ValErr fe = f(x, da, db);
        return {nd.w * fe.v, nd.w * fe.e};
    };

    const ValErr c = f(a + r, r, r);
    double sum_v = tab.center_weight() * c.v;
    double sum_e = tab.center_weight() * c.e;

    double total = 0.0, total_e = 0.0, prev_total = 0.0;
    double diff = std::numeric_limits<double>::infinity();
    double prev_diff = std::numeric_limits<double>::infinity();
    bool have_prev = false;

    for (int l = 0; l <= opt.max_level; ++l) {
        const auto& nodes = tab.level(l);
        for (int side = 0; side < 2; ++side) {
            int tiny_run = 0;
            for (const auto& nd : nodes) {
                const ValErr t = node_term(nd, side == 1);
                if (std::isfinite(t.v)) {
                    sum_v += t.v;
                    sum_e += t.e;
                }
                // Outward truncation: consecutive negligible terms end the side.
                const double scale = std::max(std::abs(sum_v), 1e-300);
                if (std::abs(t.v) < 1e-17 * scale) {
                    if (++tiny_run >= 3) break;
                } else {
                    tiny_run = 0;
                }
            }
        }
        const double h = 1.0 / static_cast<double>(1 << l);
        total = r * h * sum_v;
        total_e = r * h * sum_e;
        if (have_prev) {
            prev_diff = diff;
            diff = std::abs(total - prev_total);
            const bool converged = diff <= std::max(opt.rel_tol * std::abs(total), opt.abs_tol);
            const bool out_of_budget = opt.evals && opt.budget >= 0 && *opt.evals > opt.budget;
            if ((l >= opt.min_level && converged) || out_of_budget) break;
        }
        prev_total = total;
        have_prev = true;
    }
    // Level-to-level differences shrink at least geometrically, so the
    // remaining truncation is about diff * (diff/prev_diff); keep a margin.
    double err = diff;
    if (std::isfinite(diff) && prev_diff > 0.0 && std::isfinite(prev_diff))
        err = 4.0 * diff * std::min(1.0, diff / prev_diff);
    const double floor_err = 4e-16 * std::abs(total);
    return {total, std::max(err, floor_err) + total_e};
}

} // namespace logid::detail
