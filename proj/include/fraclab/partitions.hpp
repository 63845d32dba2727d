#pragma once

#include <optional>
#include <string>
#include <span>
#include <vector>

#include "fraclab/cantor.hpp"
#include "fraclab/paths.hpp"

namespace fraclab {

class Partition {
public:
    explicit Partition(std::vector<double> times);

    std::span<const double> times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    std::size_t intervals() const { return times_.size() - 1; }
    double horizon() const { return times_.back(); }

private:
    std::vector<double> times_;
};

Partition badic(double T, int n, int b);
double mesh(const Partition& partition);

// Header `t`, then one time per line in shortest round-trip form.
std::string partition_csv(const Partition& partition);
double osc(const SampledPath& path, const Partition& partition);

enum class CrossingMode { increment, grid };

struct ValueGridResult {
    Partition partition;
    bool degenerate = false;
};

// Lebesgue-type partition of a piecewise-linear path; crossings are solved exactly per
// segment and a path touching a level counts as crossing it.
ValueGridResult value_grid_partition(const SampledPath& path, double delta,
                                     CrossingMode mode = CrossingMode::increment,
                                     double anchor = 0.0);

class PartitionSequence {
public:
    PartitionSequence() = default;
    PartitionSequence(std::vector<Partition> levels, std::vector<int> labels);

    std::size_t size() const { return levels_.size(); }
    const Partition& operator[](std::size_t i) const { return levels_[i]; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    double mesh(std::size_t i) const { return meshes_[i]; }

    // Caches osc(path, level) for every level.
    void attach_oscillations(const SampledPath& path);
    bool has_oscillations() const { return !oscillations_.empty(); }
    double oscillation(std::size_t i) const;

private:
    std::vector<Partition> levels_;
    std::vector<int> labels_;
    std::vector<double> meshes_;
    std::vector<double> oscillations_;
};

PartitionSequence badic_sequence(double T, int b, int nmin, int nmax);
PartitionSequence grid_sequence(const SampledPath& path, std::span<const double> deltas,
                                CrossingMode mode = CrossingMode::increment, double anchor = 0.0);

// Path values at sorted times in one forward sweep.
std::vector<double> evaluate_sorted(const SampledPath& path, std::span<const double> times);

// Calls f(Step) for every interval of the partition, with interpolated path values.
template <class F>
void for_each_step(const SampledPath& path, const Partition& partition, F&& f) {
    const std::vector<double> v = evaluate_sorted(path, partition.times());
    auto t = partition.times();
    for (std::size_t i = 0; i + 1 < t.size(); ++i) f(Step{t[i], t[i + 1], v[i], v[i + 1]});
}

// The path restricted to the partition points.
SampledPath restrict_to(const SampledPath& path, const Partition& partition);

}  // namespace fraclab
