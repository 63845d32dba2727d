#include "fraclab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

PhiSpec PhiSpec::power(double p) {
    if (!(p > 0)) fail(ErrorKind::invalid_phi, "power gauge needs p > 0");
    PhiSpec s;
    s.kind = Kind::power;
    s.exponent = p;
    s.m = static_cast<int>(std::floor(p));
    s.p_phi = p;
    s.convex = p >= 1.0;
    return s;
}

PhiSpec PhiSpec::log_modulated() {
    PhiSpec s;
    s.kind = Kind::log_modulated;
    s.m = 1;
    s.p_phi = 1.0;
    s.convex = true;
    return s;
}

PhiSpec PhiSpec::custom(std::function<double(double)> fn, int m, std::optional<double> p_phi,
                        bool even) {
    if (!fn) fail(ErrorKind::invalid_phi, "custom gauge needs an evaluator");
    PhiSpec s;
    s.kind = Kind::custom;
    s.fn = std::move(fn);
    s.m = m;
    s.p_phi = p_phi;
    s.even = even;
    return s;
}

double PhiSpec::operator()(double x) const {
    switch (kind) {
        case Kind::power: return std::pow(std::abs(x), exponent);
        case Kind::log_modulated: {
            const double a = std::abs(x);
            if (a == 0.0) return 0.0;
            if (a >= 1.0) fail(ErrorKind::invalid_phi, "x/sqrt(-log x) is defined for |x| < 1 only");
            return a / std::sqrt(-std::log(a));
        }
        case Kind::custom: {
            const double v = fn(x);
            if (!(v >= 0.0)) fail(ErrorKind::invalid_phi, "gauge returned a negative value");
            return v;
        }
    }
    return 0.0;
}

namespace {

template <class Gauge>
double partial_at(const SampledPath& path, const Partition& partition, Gauge g, double t) {
    if (!(t >= 0.0 && t <= partition.horizon()))
        fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    const double st = path(t);
    const double times[1] = {t};
    const double values[1] = {st};
    PartialSums<Gauge> acc(times, values, g);
    for_each_step(path, partition, acc);
    return acc.finish()[0];
}

void check_eval_times(std::span<const double> eval_times, double T) {
    for (std::size_t i = 0; i < eval_times.size(); ++i) {
        if (!(eval_times[i] >= 0.0 && eval_times[i] <= T))
            fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
        if (i > 0 && eval_times[i] < eval_times[i - 1])
            fail(ErrorKind::invalid_input, "evaluation times must be sorted");
    }
}

template <class Gauge>
VariationTable table_impl(const SampledPath& path, const PartitionSequence& seq, Gauge g,
                          std::span<const double> eval_times, int jobs) {
    check_eval_times(eval_times, path.horizon());
    VariationTable tab;
    tab.levels = seq.labels();
    tab.eval_times.assign(eval_times.begin(), eval_times.end());
    const std::vector<double> ev = evaluate_sorted(path, eval_times);
    tab.partial_sums.resize(seq.size());
    tab.max_increment_share.resize(seq.size());
    parallel_for(seq.size(), jobs, [&](std::size_t l) {
        PartialSums<Gauge> acc(tab.eval_times, ev, g);
        for_each_step(path, seq[l], [&](const Step& st) { acc(st); });
        tab.partial_sums[l] = acc.finish();
        tab.max_increment_share[l] = acc.total() > 0 ? acc.largest() / acc.total() : 0.0;
    });
    tab.cauchy_gaps.assign(seq.size(), 0.0);
    for (std::size_t l = 0; l + 1 < seq.size(); ++l) {
        double gap = 0.0;
        for (std::size_t e = 0; e < eval_times.size(); ++e)
            gap = std::max(gap, std::abs(tab.partial_sums[l + 1][e] - tab.partial_sums[l][e]));
        tab.cauchy_gaps[l] = gap;
    }
    if (seq.size() > 0) tab.limit_estimate = tab.partial_sums.back();
    return tab;
}

struct PowerGauge {
    double p;
    double operator()(double x) const { return std::pow(std::abs(x), p); }
};

struct PhiGauge {
    const PhiSpec* phi;
    double operator()(double x) const { return (*phi)(x); }
};

}  // namespace

double pth_variation_partial(const SampledPath& path, const Partition& partition, double p, double t) {
    if (!(p > 0)) fail(ErrorKind::invalid_parameter, "p must be positive");
    return partial_at(path, partition, PowerGauge{p}, t);
}

double phi_variation_partial(const SampledPath& path, const Partition& partition, const PhiSpec& phi,
                             double t) {
    return partial_at(path, partition, PhiGauge{&phi}, t);
}

VariationTable variation_table(const SampledPath& path, const PartitionSequence& seq, double p,
                               std::span<const double> eval_times, int jobs) {
    if (!(p > 0)) fail(ErrorKind::invalid_parameter, "p must be positive");
    return table_impl(path, seq, PowerGauge{p}, eval_times, jobs);
}

VariationTable phi_variation_table(const SampledPath& path, const PartitionSequence& seq,
                                   const PhiSpec& phi, std::span<const double> eval_times, int jobs) {
    return table_impl(path, seq, PhiGauge{&phi}, eval_times, jobs);
}

std::vector<double> cantor_grid_partial_sums(double p, int n, std::span<const double> eval_times) {
    check_eval_times(eval_times, 1.0);
    const AnalyticPath s = AnalyticPath::cantor_distance(p, 36);
    std::vector<double> ev(eval_times.size());
    for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = s(eval_times[i]);
    PartialSums<PowerGauge> acc(eval_times, ev, PowerGauge{p});
    for_each_cantor_grid_step(p, n, [&](const Step& st) { acc(st); });
    return acc.finish();
}

double cantor_function(double t, int depth) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_parameter, "Cantor function lives on [0,1]");
    double x = t, acc = 0.0, w = 1.0;
    for (int k = 0; k < depth; ++k) {
        if (x == 0.0) return acc;
        if (x == 1.0) return acc + w;
        const double y = 3.0 * x;
        if (y < 1.0) {
            x = y;
        } else if (y <= 2.0) {
            return acc + 0.5 * w;
        } else {
            acc += 0.5 * w;
            x = y - 2.0;
        }
        w *= 0.5;
    }
    return acc + w * x;
}

SampledPath linear_combination(std::span<const SampledPath> paths, std::span<const double> a) {
    if (paths.empty()) fail(ErrorKind::invalid_input, "no components");
    if (paths.size() != a.size()) fail(ErrorKind::invalid_input, "one coefficient per component");
    auto t0 = paths[0].times();
    for (const SampledPath& s : paths) {
        auto t = s.times();
        if (t.size() != t0.size() || !std::equal(t.begin(), t.end(), t0.begin()))
            fail(ErrorKind::invalid_input, "components do not share a grid");
    }
    std::vector<double> v(t0.size(), 0.0);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        auto vi = paths[i].values();
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += a[i] * vi[j];
    }
    return SampledPath(std::vector<double>(t0.begin(), t0.end()), std::move(v));
}

VariationTable multidim_variation(std::span<const SampledPath> paths, std::span<const double> a,
                                  double p, const PartitionSequence& seq,
                                  std::span<const double> eval_times, int jobs) {
    return variation_table(linear_combination(paths, a), seq, p, eval_times, jobs);
}

OccupationMass occupation_mass(const SampledPath& path, const PartitionSequence& seq, double k,
                               double eps, double p) {
    if (!(eps > 0)) fail(ErrorKind::invalid_parameter, "band width must be positive");
    if (!(p > 0)) fail(ErrorKind::invalid_parameter, "p must be positive");
    OccupationMass out;
    out.levels = seq.labels();
    out.eps = {eps, eps / 2, eps / 4};
    for (std::size_t l = 0; l < seq.size(); ++l) {
        std::array<CompensatedSum, 3> sums;
        for_each_step(path, seq[l], [&](const Step& st) {
            const double d = std::abs(st.s0 - k);
            const double inc = std::pow(std::abs(st.s1 - st.s0), p);
            for (int b = 0; b < 3; ++b)
                if (d <= out.eps[b]) sums[b] += inc;
        });
        out.mass.push_back({sums[0].value(), sums[1].value(), sums[2].value()});
    }
    return out;
}

}  // namespace fraclab
