#include "fraclab/partitions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "fraclab/errors.hpp"

namespace fraclab {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) fail(ErrorKind::invalid_input, "a partition needs at least two points");
    if (times_.front() != 0.0) fail(ErrorKind::invalid_input, "a partition starts at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            fail(ErrorKind::invalid_input,
                 "partition times must be strictly increasing (index " + std::to_string(i) + ")");
}

Partition badic(double T, int n, int b) {
    if (b < 2) fail(ErrorKind::invalid_parameter, "base must be at least 2");
    if (n < 0) fail(ErrorKind::invalid_parameter, "level must be non-negative");
    if (!(T > 0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    const double count = std::pow(static_cast<double>(b), n);
    if (count > 1e9) fail(ErrorKind::invalid_parameter, "b-adic level too large");
    const std::size_t N = static_cast<std::size_t>(std::llround(count));
    std::vector<double> t(N + 1);
    for (std::size_t k = 0; k <= N; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(N);
    t.back() = T;
    return Partition(std::move(t));
}

std::string partition_csv(const Partition& partition) {
    std::string out = "t\n";
    char buf[32];
    for (double t : partition.times()) {
        auto r = std::to_chars(buf, buf + sizeof buf, t);
        out.append(buf, r.ptr);
        out.push_back('\n');
    }
    return out;
}

double mesh(const Partition& partition) {
    auto t = partition.times();
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) m = std::max(m, t[i + 1] - t[i]);
    return m;
}

std::vector<double> evaluate_sorted(const SampledPath& path, std::span<const double> times) {
    auto pt = path.times();
    auto pv = path.values();
    std::vector<double> out(times.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < 0.0 || t > path.horizon())
            fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
        if (i > 0 && t < times[i - 1]) fail(ErrorKind::invalid_input, "times must be sorted");
        while (j + 2 < pt.size() && pt[j + 1] <= t) ++j;
        if (t == pt[j]) {
            out[i] = pv[j];
        } else if (t == pt[j + 1]) {
            out[i] = pv[j + 1];
        } else {
            const double w = (t - pt[j]) / (pt[j + 1] - pt[j]);
            out[i] = pv[j] + w * (pv[j + 1] - pv[j]);
        }
    }
    return out;
}

double osc(const SampledPath& path, const Partition& partition) {
    auto t = partition.times();
    if (t.back() > path.horizon()) fail(ErrorKind::invalid_parameter, "partition beyond path horizon");
    const std::vector<double> v = evaluate_sorted(path, t);
    auto pt = path.times();
    auto pv = path.values();
    double worst = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        double lo = std::min(v[i], v[i + 1]);
        double hi = std::max(v[i], v[i + 1]);
        while (j < pt.size() && pt[j] <= t[i]) ++j;
        std::size_t k = j;
        while (k < pt.size() && pt[k] < t[i + 1]) {
            lo = std::min(lo, pv[k]);
            hi = std::max(hi, pv[k]);
            ++k;
        }
        j = k;
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

ValueGridResult value_grid_partition(const SampledPath& path, double delta, CrossingMode mode,
                                     double anchor) {
    if (!(delta > 0.0)) fail(ErrorKind::invalid_parameter, "delta must be positive");
    auto pt = path.times();
    auto pv = path.values();
    const double T = path.horizon();
    std::vector<double> out{0.0};

    auto push = [&](double t) {
        if (t <= out.back()) t = std::nextafter(out.back(), std::numeric_limits<double>::infinity());
        if (t >= T) return;
        out.push_back(t);
    };

    if (mode == CrossingMode::increment) {
        double ref = pv[0];
        for (std::size_t i = 0; i + 1 < pt.size(); ++i) {
            double t0 = pt[i], y0 = pv[i];
            const double t1 = pt[i + 1], y1 = pv[i + 1];
            // the segment may cross several levels
            while (true) {
                double level;
                if (y1 >= ref + delta)
                    level = ref + delta;
                else if (y1 <= ref - delta)
                    level = ref - delta;
                else
                    break;
                const double tc = (y1 == y0) ? t0 : t0 + (level - y0) / (y1 - y0) * (t1 - t0);
                const double tcl = std::clamp(tc, t0, t1);
                push(tcl);
                ref = level;
                t0 = tcl;
                y0 = level;
            }
        }
    } else {
        const double u0 = (pv[0] - anchor) / delta;
        bool have = std::abs(u0 - std::round(u0)) < 1e-12;
        long long cur = have ? std::llround(u0) : 0;
        for (std::size_t i = 0; i + 1 < pt.size(); ++i) {
            double t0 = pt[i], y0 = pv[i];
            const double t1 = pt[i + 1], y1 = pv[i + 1];
            while (true) {
                const double u1 = (y1 - anchor) / delta;
                long long target;
                if (have) {
                    if (u1 >= static_cast<double>(cur + 1))
                        target = cur + 1;
                    else if (u1 <= static_cast<double>(cur - 1))
                        target = cur - 1;
                    else
                        break;
                } else {
                    const double ua = (y0 - anchor) / delta;
                    const double lo = std::min(ua, u1), hi = std::max(ua, u1);
                    const double first = (u1 >= ua) ? std::ceil(lo) : std::floor(hi);
                    if (first < lo || first > hi) break;
                    target = static_cast<long long>(first);
                }
                const double level = anchor + static_cast<double>(target) * delta;
                const double tc = (y1 == y0) ? t0 : t0 + (level - y0) / (y1 - y0) * (t1 - t0);
                const double tcl = std::clamp(tc, t0, t1);
                push(tcl);
                cur = target;
                have = true;
                t0 = tcl;
                y0 = level;
            }
        }
    }
    const bool degenerate = out.size() == 1;
    out.push_back(T);
    return ValueGridResult{Partition(std::move(out)), degenerate};
}

PartitionSequence::PartitionSequence(std::vector<Partition> levels, std::vector<int> labels)
    : levels_(std::move(levels)), labels_(std::move(labels)) {
    if (labels_.empty())
        for (std::size_t i = 0; i < levels_.size(); ++i) labels_.push_back(static_cast<int>(i));
    if (labels_.size() != levels_.size())
        fail(ErrorKind::invalid_input, "one label per partition level required");
    for (const Partition& p : levels_) meshes_.push_back(fraclab::mesh(p));
}

void PartitionSequence::attach_oscillations(const SampledPath& path) {
    oscillations_.clear();
    for (const Partition& p : levels_) oscillations_.push_back(osc(path, p));
}

double PartitionSequence::oscillation(std::size_t i) const {
    if (oscillations_.empty()) fail(ErrorKind::invalid_input, "oscillations not attached");
    return oscillations_.at(i);
}

PartitionSequence badic_sequence(double T, int b, int nmin, int nmax) {
    if (nmin < 0 || nmax < nmin) fail(ErrorKind::invalid_parameter, "bad level range");
    std::vector<Partition> levels;
    std::vector<int> labels;
    for (int n = nmin; n <= nmax; ++n) {
        levels.push_back(badic(T, n, b));
        labels.push_back(n);
    }
    return PartitionSequence(std::move(levels), std::move(labels));
}

PartitionSequence grid_sequence(const SampledPath& path, std::span<const double> deltas,
                                CrossingMode mode, double anchor) {
    std::vector<Partition> levels;
    std::vector<int> labels;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        levels.push_back(value_grid_partition(path, deltas[i], mode, anchor).partition);
        labels.push_back(static_cast<int>(i));
    }
    return PartitionSequence(std::move(levels), std::move(labels));
}

SampledPath restrict_to(const SampledPath& path, const Partition& partition) {
    if (partition.horizon() > path.horizon())
        fail(ErrorKind::invalid_parameter, "partition beyond path horizon");
    std::vector<double> t(partition.times().begin(), partition.times().end());
    return SampledPath(t, evaluate_sorted(path, partition.times()));
}

}  // namespace fraclab
