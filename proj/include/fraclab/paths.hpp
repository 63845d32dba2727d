#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fraclab {

// A finite grid with real values, evaluated by linear interpolation in between.
class SampledPath {
public:
    SampledPath(std::vector<double> times, std::vector<double> values);

    std::span<const double> times() const { return times_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return times_.size(); }
    double horizon() const { return times_.back(); }

    double operator()(double t) const;
    // Index i of the segment [t_i, t_{i+1}] holding t (last segment for t = T).
    std::size_t segment(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

enum class PathKind { cantor_distance, cantor_bump, takagi, custom };
enum class Wave { triangle, sinusoid };

class AnalyticPath {
public:
    static AnalyticPath cantor_distance(double p, int depth, double horizon = 1.0);
    static AnalyticPath cantor_bump(double p, int depth, double horizon = 1.0);
    static AnalyticPath takagi(int b, double alpha, Wave wave, int depth, double nu = 1.0,
                               double rho = 0.0, double horizon = 1.0);
    static AnalyticPath custom(std::function<double(double)> f, double horizon = 1.0);

    double operator()(double t) const;

    PathKind kind() const { return kind_; }
    double horizon() const { return horizon_; }
    double p() const { return p_; }
    int depth() const { return depth_; }
    int base() const { return b_; }
    double alpha() const { return alpha_; }
    Wave wave() const { return wave_; }

    // All kinks of a piecewise-linear path (cantor-bump only): sampling there is exact.
    std::vector<double> breakpoints() const;

private:
    AnalyticPath() = default;
    double eval_unit(double u) const;

    PathKind kind_ = PathKind::custom;
    double horizon_ = 1.0;
    double p_ = 0.0;
    int depth_ = 0;
    int b_ = 2;
    double alpha_ = 0.5;
    Wave wave_ = Wave::triangle;
    double nu_ = 1.0;
    double rho_ = 0.0;
    std::function<double(double)> fn_;
};

SampledPath sample(const AnalyticPath& path, std::span<const double> grid);
std::vector<double> uniform_grid(double horizon, std::size_t intervals);

// Number r_i of bumps placed in each level-i gap of the cantor-bump path.
std::int64_t cantor_bump_count(double p, int level);

// Distance from u in [0,1] to the depth-d approximation of the Cantor set.
double cantor_distance(double u, int depth);

struct GaussianPathSpec {
    double H = 0.5;
    std::size_t N = 1024;
    double T = 1.0;
    std::uint64_t seed = 0;
};

// Fractional Brownian motion on the grid k T / N, k = 0..N.
SampledPath fbm_path(const GaussianPathSpec& spec);

// Autocovariance of fractional Gaussian noise at lag k for unit spacing.
double fgn_autocovariance(double H, std::int64_t k);

}  // namespace fraclab
