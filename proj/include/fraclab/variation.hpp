#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fraclab/numeric.hpp"
#include "fraclab/partitions.hpp"

namespace fraclab {

struct PhiSpec {
    enum class Kind { power, log_modulated, custom };

    Kind kind = Kind::power;
    double exponent = 2.0;  // power gauges only
    std::function<double(double)> fn;
    int m = 2;
    std::optional<double> p_phi;
    bool even = true;
    bool strictly_increasing = true;
    bool convex = false;

    static PhiSpec power(double p);
    // x / sqrt(-log x), defined for 0 <= x < 1.
    static PhiSpec log_modulated();
    static PhiSpec custom(std::function<double(double)> fn, int m,
                          std::optional<double> p_phi = std::nullopt, bool even = true);

    double operator()(double x) const;
};

// Truncated sums of gauge(|dS|) at sorted evaluation times, fed one Step at a time.
template <class Gauge>
class PartialSums {
public:
    PartialSums(std::span<const double> eval_times, std::span<const double> eval_values, Gauge g)
        : times_(eval_times), values_(eval_values), gauge_(std::move(g)), out_(eval_times.size()) {}

    void operator()(const Step& st) {
        while (next_ < times_.size() && times_[next_] < st.t1) {
            double v = running_.value();
            if (times_[next_] > st.t0) v += gauge_(std::abs(values_[next_] - st.s0));
            out_[next_++] = v;
        }
        const double inc = gauge_(std::abs(st.s1 - st.s0));
        running_ += inc;
        total_ = running_.value();
        if (inc > largest_) largest_ = inc;
    }

    std::vector<double> finish() {
        while (next_ < times_.size()) out_[next_++] = running_.value();
        return out_;
    }
    double total() const { return total_; }
    double largest() const { return largest_; }

private:
    std::span<const double> times_;
    std::span<const double> values_;
    Gauge gauge_;
    std::vector<double> out_;
    std::size_t next_ = 0;
    CompensatedSum running_;
    double total_ = 0.0;
    double largest_ = 0.0;
};

double pth_variation_partial(const SampledPath& path, const Partition& partition, double p, double t);
double phi_variation_partial(const SampledPath& path, const Partition& partition, const PhiSpec& phi,
                             double t);

struct VariationTable {
    std::vector<int> levels;
    std::vector<double> eval_times;
    std::vector<std::vector<double>> partial_sums;  // [level][eval time]
    std::vector<double> limit_estimate;             // finest level
    std::vector<double> cauchy_gaps;                // [level]: sup |level+1 - level|; last level 0
    std::vector<double> max_increment_share;        // [level]: largest single term / total
};

VariationTable variation_table(const SampledPath& path, const PartitionSequence& seq, double p,
                               std::span<const double> eval_times, int jobs = 1);
VariationTable phi_variation_table(const SampledPath& path, const PartitionSequence& seq,
                                   const PhiSpec& phi, std::span<const double> eval_times,
                                   int jobs = 1);

// Partial sums of |dS|^p on the level-n per-gap grid partition of the cantor-distance path.
std::vector<double> cantor_grid_partial_sums(double p, int n, std::span<const double> eval_times);

double cantor_function(double t, int depth = 52);

// Scalar path sum_i a_i S^i over a shared grid.
SampledPath linear_combination(std::span<const SampledPath> paths, std::span<const double> a);

VariationTable multidim_variation(std::span<const SampledPath> paths, std::span<const double> a,
                                  double p, const PartitionSequence& seq,
                                  std::span<const double> eval_times, int jobs = 1);

struct OccupationMass {
    std::vector<int> levels;
    std::array<double, 3> eps{};
    std::vector<std::array<double, 3>> mass;  // [level][band]
};

OccupationMass occupation_mass(const SampledPath& path, const PartitionSequence& seq, double k,
                               double eps, double p);

}  // namespace fraclab
