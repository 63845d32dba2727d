#include "fraclab/cantor.hpp"

#include "fraclab/errors.hpp"

namespace fraclab {

int cantor_grid_levels(double p, int n) {
    if (!(p > 1.0)) fail(ErrorKind::invalid_parameter, "grid levels need p > 1");
    if (n < 1) fail(ErrorKind::invalid_parameter, "level must be positive");
    int k = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 1.0 / (p - 1.0))));
    // pow may land just below an exact integer root
    while (std::pow(static_cast<double>(k + 1), p - 1.0) <= n * (1.0 + 1e-13)) ++k;
    while (k > 1 && std::pow(static_cast<double>(k), p - 1.0) > n * (1.0 + 1e-13)) --k;
    return std::max(k, 1);
}

LatticeStepCounts bump_lebesgue_step_counts(double p, int n) {
    if (!(p > 2.0 && p < 3.0)) fail(ErrorKind::invalid_parameter, "cantor-bump needs 2 < p < 3");
    if (n < 1 || n > 40) fail(ErrorKind::invalid_parameter, "level must be in 1..40");
    LatticeStepCounts c;
    c.delta = std::ldexp(1.0, -n);
    const std::size_t top = std::size_t{1} << (n - 1);
    c.up.assign(top, 0.0);
    // Gaps of level i carry 2^{i-1} r_i bumps, each climbing 2^{n-i} lattice steps.
    for (int i = 1; i <= n; ++i) {
        const double bumps = std::ldexp(1.0, i - 1) * static_cast<double>(cantor_bump_count(p, i));
        const std::size_t height = std::size_t{1} << (n - i);
        for (std::size_t k = 0; k < height; ++k) c.up[k] += bumps;
    }
    c.down = c.up;
    return c;
}

namespace {

template <class Gen>
SampledPath materialize(Gen&& gen) {
    std::vector<double> t{0.0}, s{0.0};
    gen([&](const Step& st) {
        t.push_back(st.t1);
        s.push_back(st.s1);
    });
    return SampledPath(std::move(t), std::move(s));
}

}  // namespace

SampledPath cantor_grid_sampled(double p, int n) {
    return materialize([&](auto&& f) { for_each_cantor_grid_step(p, n, f); });
}

SampledPath bump_lebesgue_sampled(double p, int n) {
    if (!(p > 2.0 && p < 3.0)) fail(ErrorKind::invalid_parameter, "cantor-bump needs 2 < p < 3");
    return materialize([&](auto&& f) { for_each_bump_lebesgue_step(p, n, f); });
}

SampledPath cantor_bump_exact_samples(double p, int depth) {
    if (!(p > 2.0 && p < 3.0)) fail(ErrorKind::invalid_parameter, "cantor-bump needs 2 < p < 3");
    std::vector<double> t{0.0}, s{0.0};
    for_each_cantor_gap(depth, [&](const CantorGap& g) {
        const std::int64_t r = cantor_bump_count(p, g.level);
        const double w = (g.right - g.left) / static_cast<double>(r);
        const double h = std::ldexp(1.0, -g.level);
        if (g.left > t.back()) {
            t.push_back(g.left);
            s.push_back(0.0);
        }
        for (std::int64_t j = 0; j < r; ++j) {
            t.push_back(g.left + (static_cast<double>(j) + 0.5) * w);
            s.push_back(h);
            t.push_back(j + 1 == r ? g.right : g.left + static_cast<double>(j + 1) * w);
            s.push_back(0.0);
        }
    });
    if (t.back() < 1.0) {
        t.push_back(1.0);
        s.push_back(0.0);
    }
    return SampledPath(std::move(t), std::move(s));
}

}  // namespace fraclab
