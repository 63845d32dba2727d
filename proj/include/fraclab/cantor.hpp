#pragma once

// Exact constructions on the middle-thirds Cantor set: removed intervals in time order,
// the per-gap value-grid partitions of the cantor-distance path, and the dyadic Lebesgue
// partitions of the cantor-bump path.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fraclab/paths.hpp"

namespace fraclab {

struct CantorGap {
    int level;  // i: the gap has length 3^{-i}
    double left;
    double right;
};

namespace detail {

inline double pow3(int i) {
    double v = 1.0;
    for (int k = 0; k < i; ++k) v *= 3.0;
    return v;
}

template <class F>
void cantor_gaps_from(int level, int depth, std::int64_t num, const double* denom, F& f) {
    if (level > depth) return;
    cantor_gaps_from(level + 1, depth, 3 * num, denom, f);
    f(CantorGap{level, static_cast<double>(3 * num + 1) / denom[level],
                static_cast<double>(3 * num + 2) / denom[level]});
    cantor_gaps_from(level + 1, depth, 3 * num + 2, denom, f);
}

}  // namespace detail

// Visits the removed intervals of levels 1..depth in increasing time order (depth <= 33).
template <class F>
void for_each_cantor_gap(int depth, F&& f) {
    double denom[40];
    for (int i = 0; i < 40; ++i) denom[i] = detail::pow3(i);
    detail::cantor_gaps_from(1, depth, 0, denom, f);
}

// One partition interval with the path values at both ends.
struct Step {
    double t0, t1;
    double s0, s1;
};

// k_n = floor(n^{1/(p-1)}), the number of value levels per gap.
int cantor_grid_levels(double p, int n);

// Intervals of the level-n per-gap grid partition of the cantor-distance path on [0,1]:
// inside each gap of level i <= n the partition visits the values k 2^{-i/p} / k_n,
// k = 0..k_n and back, at their exact crossing times.
template <class F>
void for_each_cantor_grid_step(double p, int n, F&& f) {
    const int kn = cantor_grid_levels(p, n);
    const double inv_gamma = p * std::log(3.0) / std::log(2.0);
    double t_prev = 0.0;
    double s_prev = 0.0;
    std::vector<double> offsets(static_cast<std::size_t>(kn) + 1);
    std::vector<double> values(static_cast<std::size_t>(kn) + 1);
    int cached_level = -1;
    for_each_cantor_gap(n, [&](const CantorGap& g) {
        if (g.level != cached_level) {
            const double top = std::exp2(-static_cast<double>(g.level) / p);
            for (int k = 0; k <= kn; ++k) {
                values[k] = top * static_cast<double>(k) / kn;
                offsets[k] = 0.5 * std::pow(values[k], inv_gamma);
            }
            offsets[kn] = 0.5 * (g.right - g.left);
            cached_level = g.level;
        }
        if (g.left > t_prev) {
            f(Step{t_prev, g.left, s_prev, 0.0});
            t_prev = g.left;
            s_prev = 0.0;
        }
        for (int k = 1; k <= kn; ++k) {
            const double t = g.left + offsets[k];
            f(Step{t_prev, t, s_prev, values[k]});
            t_prev = t;
            s_prev = values[k];
        }
        for (int k = kn - 1; k >= 0; --k) {
            const double t = (k == 0) ? g.right : g.right - offsets[k];
            f(Step{t_prev, t, s_prev, values[k]});
            t_prev = t;
            s_prev = values[k];
        }
    });
    if (t_prev < 1.0) f(Step{t_prev, 1.0, s_prev, 0.0});
}

// Bump geometry of the cantor-bump path: r_i bumps per level-i gap, height 2^{-i}.
// Visits the intervals of the dyadic Lebesgue partition with delta = 2^{-n} (grid mode,
// anchor 0) in time order, with exact crossing times and values.
template <class F>
void for_each_bump_lebesgue_step(double p, int n, F&& f) {
    const double delta = std::ldexp(1.0, -n);
    double t_prev = 0.0;
    double s_prev = 0.0;
    for_each_cantor_gap(n, [&](const CantorGap& g) {
        const std::int64_t r = cantor_bump_count(p, g.level);
        const std::int64_t steps = std::int64_t{1} << (n - g.level);
        const double w = (g.right - g.left) / static_cast<double>(r);
        for (std::int64_t j = 0; j < r; ++j) {
            const double b0 = g.left + static_cast<double>(j) * w;
            for (std::int64_t k = 1; k <= steps; ++k) {
                const double t = b0 + 0.5 * w * static_cast<double>(k) / steps;
                const double s = static_cast<double>(k) * delta;
                f(Step{t_prev, t, s_prev, s});
                t_prev = t;
                s_prev = s;
            }
            for (std::int64_t k = steps - 1; k >= 0; --k) {
                const double t =
                    (k == 0) ? b0 + w : b0 + 0.5 * w * (2.0 - static_cast<double>(k) / steps);
                const double s = static_cast<double>(k) * delta;
                f(Step{t_prev, t, s_prev, s});
                t_prev = t;
                s_prev = s;
            }
        }
    });
    if (t_prev < 1.0) f(Step{t_prev, 1.0, s_prev, 0.0});
}

// Increment histogram of the dyadic Lebesgue partition of the cantor-bump path:
// up[k] counts steps k delta -> (k+1) delta, down[k] counts (k+1) delta -> k delta.
// Every interval of that partition is one of these steps (plus a final flat interval).
struct LatticeStepCounts {
    double delta = 0.0;
    std::vector<double> up;
    std::vector<double> down;
};

LatticeStepCounts bump_lebesgue_step_counts(double p, int n);

// Paths whose intervals come from the generators above, materialized.
SampledPath cantor_grid_sampled(double p, int n);
SampledPath bump_lebesgue_sampled(double p, int n);

// cantor-bump path sampled at all its breakpoints with exact values: the interpolant
// equals the path.
SampledPath cantor_bump_exact_samples(double p, int depth);

}  // namespace fraclab
