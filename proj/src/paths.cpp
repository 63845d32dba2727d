#include "fraclab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fraclab/cantor.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {

SampledPath::SampledPath(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size())
        fail(ErrorKind::invalid_input, "times and values differ in length");
    if (times_.size() < 2) fail(ErrorKind::invalid_input, "a sampled path needs at least two points");
    if (times_.front() != 0.0) fail(ErrorKind::invalid_input, "sampled path must start at t = 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            fail(ErrorKind::invalid_input, "times must be strictly increasing (index " +
                                               std::to_string(i) + ")");
    for (double v : values_)
        if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite path value");
}

std::size_t SampledPath::segment(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, times_.size() - 2);
}

double SampledPath::operator()(double t) const {
    if (t < 0.0 || t > horizon())
        fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    const std::size_t i = segment(t);
    const double t0 = times_[i], t1 = times_[i + 1];
    if (t == t0) return values_[i];
    if (t == t1) return values_[i + 1];
    const double w = (t - t0) / (t1 - t0);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

std::int64_t cantor_bump_count(double p, int level) {
    return static_cast<std::int64_t>(
        std::floor(std::exp2((level - 1) * (p - 1.0)) * (std::exp2(p - 1.0) - 1.0)));
}

double cantor_distance(double u, int depth) {
    double x = u, scale = 1.0;
    for (int i = 0; i < depth; ++i) {
        const double y = 3.0 * x;
        if (y > 1.0 && y < 2.0) return scale / 3.0 * std::min(y - 1.0, 2.0 - y);
        x = (y <= 1.0) ? y : y - 2.0;
        scale /= 3.0;
    }
    return 0.0;
}

AnalyticPath AnalyticPath::cantor_distance(double p, int depth, double horizon) {
    if (!(p > 1.0)) fail(ErrorKind::invalid_parameter, "cantor-distance path needs p > 1");
    if (depth < 1) fail(ErrorKind::invalid_parameter, "depth must be positive");
    if (!(horizon > 0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    AnalyticPath s;
    s.kind_ = PathKind::cantor_distance;
    s.p_ = p;
    s.depth_ = depth;
    s.horizon_ = horizon;
    return s;
}

AnalyticPath AnalyticPath::cantor_bump(double p, int depth, double horizon) {
    if (!(p > 2.0 && p < 3.0)) fail(ErrorKind::invalid_parameter, "cantor-bump path needs 2 < p < 3");
    if (depth < 1) fail(ErrorKind::invalid_parameter, "depth must be positive");
    if (!(horizon > 0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    AnalyticPath s;
    s.kind_ = PathKind::cantor_bump;
    s.p_ = p;
    s.depth_ = depth;
    s.horizon_ = horizon;
    return s;
}

AnalyticPath AnalyticPath::takagi(int b, double alpha, Wave wave, int depth, double nu, double rho,
                                  double horizon) {
    if (b < 2) fail(ErrorKind::invalid_parameter, "takagi base must be at least 2");
    if (!(std::abs(alpha * b - 1.0) < 1e-12 || std::abs(alpha * b + 1.0) < 1e-12))
        fail(ErrorKind::invalid_parameter, "takagi weight must satisfy |alpha| = 1/b");
    if (depth < 1) fail(ErrorKind::invalid_parameter, "depth must be positive");
    if (!(horizon > 0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    AnalyticPath s;
    s.kind_ = PathKind::takagi;
    s.b_ = b;
    s.alpha_ = alpha;
    s.wave_ = wave;
    s.depth_ = depth;
    s.nu_ = nu;
    s.rho_ = rho;
    s.horizon_ = horizon;
    return s;
}

AnalyticPath AnalyticPath::custom(std::function<double(double)> f, double horizon) {
    if (!f) fail(ErrorKind::invalid_parameter, "custom path needs an evaluator");
    if (!(horizon > 0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    AnalyticPath s;
    s.kind_ = PathKind::custom;
    s.fn_ = std::move(f);
    s.horizon_ = horizon;
    return s;
}

double AnalyticPath::operator()(double t) const {
    if (!(t >= 0.0 && t <= horizon_))
        fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    if (kind_ == PathKind::custom) return fn_(t);
    return eval_unit(t / horizon_);
}

double AnalyticPath::eval_unit(double u) const {
    switch (kind_) {
        case PathKind::cantor_distance: {
            const double d = fraclab::cantor_distance(u, depth_);
            if (d == 0.0) return 0.0;
            return std::pow(2.0 * d, std::log(2.0) / std::log(3.0) / p_);
        }
        case PathKind::cantor_bump: {
            double x = u;
            for (int i = 1; i <= depth_; ++i) {
                const double y = 3.0 * x;
                if (y > 1.0 && y < 2.0) {
                    const double r = static_cast<double>(cantor_bump_count(p_, i));
                    const double pos = (y - 1.0) * r;
                    const double frac = pos - std::floor(pos);
                    return std::ldexp(1.0 - std::abs(2.0 * frac - 1.0), -i);
                }
                x = (y <= 1.0) ? y : y - 2.0;
            }
            return 0.0;
        }
        case PathKind::takagi: {
            double sum = 0.0, weight = 1.0, scale = 1.0;
            for (int k = 0; k < depth_; ++k) {
                const double z = scale * u;
                const double frac = z - std::floor(z);
                double phi;
                if (wave_ == Wave::triangle)
                    phi = std::min(frac, 1.0 - frac);
                else
                    phi = nu_ * std::sin(2.0 * std::numbers::pi * frac) +
                          rho_ * std::cos(2.0 * std::numbers::pi * frac);
                sum += weight * phi;
                weight *= alpha_;
                scale *= b_;
            }
            return sum;
        }
        case PathKind::custom: return fn_(u * horizon_);
    }
    return 0.0;
}

std::vector<double> AnalyticPath::breakpoints() const {
    if (kind_ != PathKind::cantor_bump)
        fail(ErrorKind::invalid_parameter, "breakpoints are defined for the cantor-bump path only");
    std::vector<double> pts{0.0};
    for_each_cantor_gap(depth_, [&](const CantorGap& g) {
        const std::int64_t r = cantor_bump_count(p_, g.level);
        const double w = (g.right - g.left) / static_cast<double>(r);
        for (std::int64_t j = 0; j < r; ++j) {
            pts.push_back(g.left + j * w);
            pts.push_back(g.left + (j + 0.5) * w);
        }
        pts.push_back(g.right);
    });
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (double& t : pts) t *= horizon_;
    return pts;
}

SampledPath sample(const AnalyticPath& path, std::span<const double> grid) {
    if (grid.empty()) fail(ErrorKind::invalid_parameter, "empty grid");
    for (double t : grid)
        if (!(t >= 0.0 && t <= path.horizon()))
            fail(ErrorKind::invalid_parameter, "grid point outside [0, T]");
    std::vector<double> times(grid.begin(), grid.end());
    std::vector<double> values(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) values[i] = path(times[i]);
    return SampledPath(std::move(times), std::move(values));
}

std::vector<double> uniform_grid(double horizon, std::size_t intervals) {
    if (intervals == 0) fail(ErrorKind::invalid_parameter, "grid needs at least one interval");
    std::vector<double> g(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k)
        g[k] = horizon * static_cast<double>(k) / static_cast<double>(intervals);
    g.back() = horizon;
    return g;
}

}  // namespace fraclab
