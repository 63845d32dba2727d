#include "fraclab/follmer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/variation.hpp"

namespace fraclab {

CompensatedResult make_compensated_result(std::vector<int> levels, std::vector<double> sums, double lhs,
                                          double scale, const VerdictRule& rule) {
    CompensatedResult r;
    r.levels = std::move(levels);
    r.sums = std::move(sums);
    r.lhs = lhs;
    r.rule = rule;
    r.threshold = rule.tolerance * (1.0 + std::abs(scale));
    for (double s : r.sums) r.residuals.push_back(lhs - s);
    for (std::size_t i = 0; i + 1 < r.sums.size(); ++i) r.gaps.push_back(std::abs(r.sums[i + 1] - r.sums[i]));
    const std::size_t n = r.sums.size();
    if (n == 0 || static_cast<int>(n) < rule.min_levels) return r;
    const double last = std::abs(r.residuals.back());
    const bool small = last < r.threshold;
    const bool residuals_shrink = last <= std::abs(r.residuals.front());
    const bool gaps_shrink = r.gaps.empty() || r.gaps.back() <= r.gaps.front();
    r.converged = small && residuals_shrink && gaps_shrink;
    return r;
}

CompensatedAccumulator::CompensatedAccumulator(const DerivativeBundle& f, int m, double t, double s_t)
    : f_(f), m_(m), t_(t), s_t_(s_t) {
    for (int j = 1; j <= m; ++j)
        if (!f.has_derivative(j))
            fail(ErrorKind::insufficient_derivatives,
                 "compensated sum of order " + std::to_string(m) + " needs f^(" + std::to_string(j) + ")");
    for (int j = 0; j <= m; ++j) inv_fact_.push_back(factorial(j));
}

void CompensatedAccumulator::operator()(const Step& st) {
    if (st.t0 >= t_) return;
    const double s1 = (st.t1 <= t_) ? st.s1 : s_t_;
    const double d = s1 - st.s0;
    double c = 0.0, pw = 1.0;
    for (int j = 1; j <= m_; ++j) {
        pw *= d;
        c += f_.derivative(j, st.s0) * pw / inv_fact_[j];
    }
    sum_ += c;
}

double compensated_sum(const DerivativeBundle& f, const SampledPath& path, const Partition& partition,
                       const FracOrder& p, double t) {
    if (!(t >= 0.0 && t <= partition.horizon()))
        fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    CompensatedAccumulator acc(f, p.m, t, path(t));
    for_each_step(path, partition, [&](const Step& st) { acc(st); });
    return acc.value();
}

CompensatedResult ito_check(const DerivativeBundle& f, const SampledPath& path, const PartitionSequence& seq,
                            const FracOrder& p, double t, const VerdictRule& rule, int jobs) {
    std::vector<double> sums(seq.size());
    parallel_for(seq.size(), jobs, [&](std::size_t l) { sums[l] = compensated_sum(f, path, seq[l], p, t); });
    const double ft = f(path(t));
    return make_compensated_result(seq.labels(), std::move(sums), ft - f(path(0.0)), ft, rule);
}

TimeBundle TimeBundle::from_spatial(const SmoothFn& g, int m) {
    TimeBundle b;
    b.f = [g](double, double x) { return g(x); };
    b.dt = [](double, double) { return 0.0; };
    for (int k = 1; k <= m; ++k) b.dx.push_back([g, k](double, double x) { return g.derivative(k, x); });
    return b;
}

CompensatedResult ito_check_time(const TimeBundle& f, const SampledPath& path, const PartitionSequence& seq,
                                 const FracOrder& p, double t, const VerdictRule& rule, int jobs) {
    if (!f.f || !f.dt) fail(ErrorKind::insufficient_derivatives, "time bundle needs f and its time derivative");
    const int m = p.m;
    if (static_cast<int>(f.dx.size()) < m)
        fail(ErrorKind::insufficient_derivatives, "time bundle lacks space derivatives through order m");
    if (!(t >= 0.0 && t <= path.horizon())) fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    const double s_t = path(t);
    std::vector<double> fact;
    for (int j = 0; j <= m; ++j) fact.push_back(factorial(j));
    std::vector<double> sums(seq.size());
    parallel_for(seq.size(), jobs, [&](std::size_t l) {
        CompensatedSum sum;
        for_each_step(path, seq[l], [&](const Step& st) {
            if (st.t0 >= t) return;
            const double b = std::min(st.t1, t);
            const double s1 = (st.t1 <= t) ? st.s1 : s_t;
            const double d = s1 - st.s0;
            double c = 0.0, pw = 1.0;
            for (int j = 1; j <= m; ++j) {
                pw *= d;
                c += f.dx[j - 1](st.t0, st.s0) * pw / fact[j];
            }
            sum += c;
            // time derivative along the frozen right-endpoint value
            auto g = [&](double u) { return f.dt(u, s1); };
            sum += quad::gauss_panels(g, st.t0, b).value;
        });
        sums[l] = sum.value();
    });
    const double ft = f.f(t, s_t);
    return make_compensated_result(seq.labels(), std::move(sums), ft - f.f(0.0, path(0.0)), ft, rule);
}

PrefixKnots::PrefixKnots(Shape shape_, std::vector<double> t_, std::vector<double> v_)
    : shape(shape_), t(std::move(t_)), v(std::move(v_)) {
    if (t.size() != v.size() || t.size() < 2) fail(ErrorKind::invalid_input, "prefix knots malformed");
    cum.assign(t.size(), 0.0);
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double h = t[i + 1] - t[i];
        acc += shape == Shape::linear ? 0.5 * h * (v[i] + v[i + 1]) : h * v[i + 1];
        cum[i + 1] = acc.value();
    }
}

namespace {

std::size_t locate(const PrefixKnots& k, double s) {
    // linear: t_i <= s <= t_{i+1};  right step: t_i < s <= t_{i+1} (segment 0 for s = 0)
    if (k.shape == PrefixKnots::Shape::linear) {
        auto it = std::upper_bound(k.t.begin(), k.t.end(), s);
        std::size_t i = static_cast<std::size_t>(it - k.t.begin());
        return i == 0 ? 0 : std::min(i - 1, k.t.size() - 2);
    }
    auto it = std::lower_bound(k.t.begin(), k.t.end(), s);
    std::size_t i = static_cast<std::size_t>(it - k.t.begin());
    return i == 0 ? 0 : std::min(i - 1, k.t.size() - 2);
}

}  // namespace

PathPrefix::PathPrefix(const PrefixKnots& knots, double stop, double eval, double bump)
    : PathPrefix(knots, locate(knots, stop), stop, eval, bump) {}

PathPrefix::PathPrefix(const PrefixKnots& knots, std::size_t segment, double stop, double eval, double bump)
    : knots_(&knots), seg_(segment), stop_(stop), eval_(eval), bump_(bump) {
    if (eval < stop) fail(ErrorKind::invalid_input, "prefix viewed before its stopping time");
    const auto& t = knots.t;
    const auto& v = knots.v;
    const std::size_t i = seg_;
    if (knots.shape == PrefixKnots::Shape::linear) {
        const double h = t[i + 1] - t[i];
        const double w = (stop - t[i]) / h;
        stop_value_ = (stop == t[i + 1]) ? v[i + 1] : v[i] + w * (v[i + 1] - v[i]);
        stop_integral_ = knots.cum[i] + 0.5 * (stop - t[i]) * (v[i] + stop_value_);
    } else {
        stop_value_ = (stop == t[0]) ? v[0] : v[i + 1];
        stop_integral_ = knots.cum[i] + (stop - t[i]) * v[i + 1];
    }
}

double PathPrefix::at(double u) const {
    if (u >= stop_) return stop_value_ + bump_;
    const auto& t = knots_->t;
    const auto& v = knots_->v;
    if (knots_->shape == PrefixKnots::Shape::linear) {
        const std::size_t i = locate(*knots_, u);
        const double w = (u - t[i]) / (t[i + 1] - t[i]);
        return v[i] + w * (v[i + 1] - v[i]);
    }
    auto it = std::upper_bound(t.begin(), t.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    return v[std::min(i + 1, v.size() - 1)];
}

double PathPrefix::integral() const { return stop_integral_ + (eval_ - stop_) * (stop_value_ + bump_); }

PathPrefix PathPrefix::bumped(double h) const {
    PathPrefix c = *this;
    c.bump_ += h;
    return c;
}

PathPrefix PathPrefix::extended(double eval) const {
    if (eval < stop_) fail(ErrorKind::invalid_input, "cannot view a prefix before its stopping time");
    PathPrefix c = *this;
    c.eval_ = eval;
    return c;
}

FunctionalBundle FunctionalBundle::cylinder(const SmoothFn& f, int m) {
    FunctionalBundle b;
    b.F = [f](double, const PathPrefix& w) { return f(w.value()); };
    b.DF = [](double, const PathPrefix&) { return 0.0; };
    for (int k = 1; k <= m; ++k)
        b.vertical.push_back([f, k](double, const PathPrefix& w) { return f.derivative(k, w.value()); });
    return b;
}

namespace {

double central_bump(const FunctionalBundle& F, int k, const PathPrefix& w, double h) {
    double sum = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double e = (0.5 * k - i) * h;
        sum += ((i % 2) ? -binom : binom) * F.F(w.time(), w.bumped(e));
        binom = binom * (k - i) / (i + 1);
    }
    return sum / std::pow(h, k);
}

}  // namespace

double vertical_derivative(const FunctionalBundle& F, int k, const PathPrefix& w, double h) {
    if (k >= 1 && static_cast<int>(F.vertical.size()) >= k && F.vertical[k - 1])
        return F.vertical[k - 1](w.time(), w);
    if (!(h > 0)) fail(ErrorKind::insufficient_derivatives, "bump step must be positive");
    const double d1 = central_bump(F, k, w, h);
    const double d2 = central_bump(F, k, w, 0.5 * h);
    const double scale = 1.0 + std::abs(F.F(w.time(), w));
    if (!std::isfinite(d1) || !std::isfinite(d2) ||
        std::abs(d1 - d2) > 0.25 * std::max(std::abs(d1), std::abs(d2)) + 1e-6 * scale)
        fail(ErrorKind::insufficient_derivatives,
             "bump differences of order " + std::to_string(k) + " do not settle at t = " +
                 std::to_string(w.time()));
    return d1;
}

double horizontal_derivative(const FunctionalBundle& F, const PathPrefix& w) {
    if (F.DF) return F.DF(w.time(), w);
    const double h = F.horizontal_step * std::max(1.0, std::abs(w.time()));
    return (F.F(w.time() + h, w.extended(w.time() + h)) - F.F(w.time(), w)) / h;
}

CompensatedResult ito_check_functional(const FunctionalBundle& F, const SampledPath& path,
                                       const PartitionSequence& seq, const FracOrder& p, double t,
                                       const VerdictRule& rule, int jobs) {
    if (!F.F) fail(ErrorKind::invalid_bundle, "functional evaluator missing");
    if (!(t >= 0.0 && t <= path.horizon())) fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    const int m = p.m;
    const PrefixKnots actual(PrefixKnots::Shape::linear,
                             std::vector<double>(path.times().begin(), path.times().end()),
                             std::vector<double>(path.values().begin(), path.values().end()));

    // horizontal part on the actual path, 3-point Gauss per grid segment
    static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    CompensatedSum horizontal;
    for (std::size_t i = 0; i + 1 < actual.t.size() && actual.t[i] < t; ++i) {
        const double a = actual.t[i], b = std::min(actual.t[i + 1], t);
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        double s = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double u = c + r * gx[q];
            s += gw[q] * horizontal_derivative(F, PathPrefix(actual, i, u, u, 0.0));
        }
        horizontal += r * s;
    }
    const double Ft = F.F(t, PathPrefix(actual, t, t));
    const double F0 = F.F(0.0, PathPrefix(actual, 0.0, 0.0));
    const double lhs = Ft - F0 - horizontal.value();

    std::vector<double> fact;
    for (int j = 0; j <= m; ++j) fact.push_back(factorial(j));
    std::vector<double> sums(seq.size());
    const double s_t = path(t);
    parallel_for(seq.size(), jobs, [&](std::size_t l) {
        const Partition& part = seq[l];
        std::vector<double> v = evaluate_sorted(path, part.times());
        const PrefixKnots steps(PrefixKnots::Shape::right_step,
                                std::vector<double>(part.times().begin(), part.times().end()), v);
        double h = F.bump_scale * osc(path, part);
        if (!(h > 0)) h = 1e-4;
        CompensatedSum sum;
        auto tt = part.times();
        for (std::size_t j = 0; j + 1 < tt.size() && tt[j] < t; ++j) {
            const double s1 = (tt[j + 1] <= t) ? v[j + 1] : s_t;
            const double d = s1 - v[j];
            // S^n stopped just before t_j: segment j-1 ends at t_j
            const PathPrefix w(steps, j == 0 ? 0 : j - 1, tt[j], tt[j], 0.0);
            double c = 0.0, pw = 1.0;
            for (int k = 1; k <= m; ++k) {
                pw *= d;
                c += vertical_derivative(F, k, w, h) * pw / fact[k];
            }
            sum += c;
        }
        sums[l] = sum.value();
    });
    return make_compensated_result(seq.labels(), std::move(sums), lhs, Ft, rule);
}

TensorBundle TensorBundle::from_scalar(const SmoothFn& g, int m) {
    TensorBundle b;
    b.dim = 1;
    b.f = [g](std::span<const double> x) { return g(x[0]); };
    for (int k = 1; k <= m; ++k)
        b.tensors.push_back([g, k](std::span<const double> x) { return std::vector<double>{g.derivative(k, x[0])}; });
    return b;
}

namespace {

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double contract(const std::vector<double>& T, int k, int d, std::span<const double> delta) {
    const std::size_t n = ipow(static_cast<std::size_t>(d), k);
    double sum = 0.0;
    std::vector<int> idx(k, 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i) prod *= delta[idx[i]];
        sum += T[flat] * prod;
        for (int i = k - 1; i >= 0; --i) {
            if (++idx[i] < d) break;
            idx[i] = 0;
        }
    }
    return sum;
}

}  // namespace

void check_tensor_symmetry(const TensorBundle& f, std::span<const double> x) {
    const int d = f.dim;
    for (std::size_t kk = 0; kk < f.tensors.size(); ++kk) {
        const int k = static_cast<int>(kk) + 1;
        const std::vector<double> T = f.tensors[kk](x);
        const std::size_t n = ipow(static_cast<std::size_t>(d), k);
        if (T.size() != n)
            fail(ErrorKind::invalid_bundle, "tensor of order " + std::to_string(k) + " has wrong size");
        std::vector<int> idx(k, 0);
        for (std::size_t flat = 0; flat < n; ++flat) {
            std::vector<int> sorted = idx;
            std::sort(sorted.begin(), sorted.end());
            std::size_t canon = 0;
            for (int i = 0; i < k; ++i) canon = canon * d + sorted[i];
            if (std::abs(T[flat] - T[canon]) > 1e-8 * std::max(1.0, std::abs(T[canon])))
                fail(ErrorKind::invalid_bundle, "tensor of order " + std::to_string(k) + " is not symmetric");
            for (int i = k - 1; i >= 0; --i) {
                if (++idx[i] < d) break;
                idx[i] = 0;
            }
        }
    }
}

CompensatedResult ito_check_multi(const TensorBundle& f, std::span<const SampledPath> paths,
                                  const PartitionSequence& seq, const FracOrder& p, double t,
                                  const VerdictRule& rule, int jobs) {
    const int d = f.dim;
    if (static_cast<int>(paths.size()) != d) fail(ErrorKind::invalid_input, "one path per dimension required");
    const int m = p.m;
    if (static_cast<int>(f.tensors.size()) < m)
        fail(ErrorKind::insufficient_derivatives, "tensors through order m required");
    std::vector<double> unit(d, 0.0);
    for (int i = 0; i < d; ++i) {
        unit[i] = 1.0;
        (void)linear_combination(paths, unit);  // validates the shared grid
        unit[i] = 0.0;
    }
    std::vector<double> x0(d), xt(d);
    for (int i = 0; i < d; ++i) {
        x0[i] = paths[i](0.0);
        xt[i] = paths[i](t);
    }
    check_tensor_symmetry(f, x0);
    check_tensor_symmetry(f, xt);
    std::vector<double> fact;
    for (int j = 0; j <= m; ++j) fact.push_back(factorial(j));
    std::vector<double> sums(seq.size());
    parallel_for(seq.size(), jobs, [&](std::size_t l) {
        const Partition& part = seq[l];
        std::vector<std::vector<double>> vals(d);
        for (int i = 0; i < d; ++i) vals[i] = evaluate_sorted(paths[i], part.times());
        auto tt = part.times();
        CompensatedSum sum;
        std::vector<double> s0(d), delta(d);
        for (std::size_t j = 0; j + 1 < tt.size() && tt[j] < t; ++j) {
            for (int i = 0; i < d; ++i) {
                s0[i] = vals[i][j];
                const double s1 = (tt[j + 1] <= t) ? vals[i][j + 1] : xt[i];
                delta[i] = s1 - s0[i];
            }
            double c = 0.0;
            for (int k = 1; k <= m; ++k) c += contract(f.tensors[k - 1](s0), k, d, delta) / fact[k];
            sum += c;
        }
        sums[l] = sum.value();
    });
    const double ft = f.f(xt);
    return make_compensated_result(seq.labels(), std::move(sums), ft - f.f(x0), ft, rule);
}

YoungReport young_bound_check(std::span<const SampledPath> paths, std::span<const double> alphas,
                              const PartitionSequence& seq) {
    const std::size_t d = paths.size();
    if (d == 0 || alphas.size() != d) fail(ErrorKind::invalid_input, "one exponent per component required");
    double p = 0.0;
    for (double a : alphas) {
        if (!(a > 0)) fail(ErrorKind::invalid_parameter, "exponents must be positive");
        p += a;
    }
    std::vector<double> unit(d, 0.0);
    unit[0] = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[i] = 1.0;
        (void)linear_combination(paths, unit);
    }
    YoungReport rep;
    rep.levels = seq.labels();
    const std::size_t patterns = std::size_t{1} << d;
    for (std::size_t l = 0; l < seq.size(); ++l) {
        std::vector<std::vector<double>> vals(d);
        for (std::size_t i = 0; i < d; ++i) vals[i] = evaluate_sorted(paths[i], seq[l].times());
        CompensatedSum lhs, rhs;
        const std::size_t n = seq[l].size();
        for (std::size_t j = 0; j + 1 < n; ++j) {
            double prod = 1.0;
            for (std::size_t i = 0; i < d; ++i) prod *= std::pow(std::abs(vals[i][j + 1] - vals[i][j]), alphas[i]);
            lhs += prod;
            for (std::size_t e = 0; e < patterns; ++e) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double sign = (e >> i) & 1 ? -1.0 : 1.0;
                    s += sign * alphas[i] / p * (vals[i][j + 1] - vals[i][j]);
                }
                rhs += std::pow(std::abs(s), p);
            }
        }
        rep.lhs.push_back(lhs.value());
        rep.rhs.push_back(rhs.value());
        const bool ok = lhs.value() <= rhs.value() * (1.0 + 1e-12);
        rep.holds.push_back(ok);
        rep.all_hold = rep.all_hold && ok;
    }
    return rep;
}

KernelValue remainder_kernel(const DerivativeBundle& f, const FracOrder& p, double a, double b) {
    const int m = p.m;
    if (!f.has_derivative(m)) fail(ErrorKind::insufficient_derivatives, "kernel needs f^(m)");
    if (a == b) {
        for (const quad::Kink& k : f.kinks()) {
            const double e = k.exponent - (m + 1);
            const bool smooth = e >= 0 && std::abs(e - std::round(e)) < 1e-12;
            if (k.location == a && !smooth) return KernelValue{std::numeric_limits<double>::quiet_NaN(), true};
        }
        return KernelValue{0.0, false};
    }
    const double scale = std::pow(std::abs(b - a), p.p);
    if (m == 0) return KernelValue{(f(b) - f(a)) / scale, false};
    const double base = f.derivative(m, a);
    const double fm1 = factorial(m - 1);
    auto g = [&](double x) { return (f.derivative(m, x) - base) * std::pow(b - x, m - 1); };
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto kinks = f.kinks_of_derivative(m);
    quad::Options opt;
    opt.rel_tol = 1e-12;
    const quad::Result r = quad::integrate_split(g, lo, hi, kinks, opt);
    if (!r.converged && r.change > 1e-8 * std::max(1e-300, std::abs(r.value)))
        fail(ErrorKind::numeric_error, "remainder kernel quadrature did not converge");
    const double integral = (b > a) ? r.value : -r.value;
    return KernelValue{integral / (fm1 * scale), false};
}

double AtomMeasure::total() const {
    CompensatedSum s;
    for (const Atom& a : atoms) s += a.w;
    return s.value();
}

double circle_angle(double a, double b) { return std::atan2(b, a); }

AtomMeasure quotient_measure(const SampledPath& path, const Partition& partition, double p,
                             const Projection& projection, AtomSpace space) {
    if (!(p > 0)) fail(ErrorKind::invalid_parameter, "p must be positive");
    AtomMeasure mu;
    mu.space = space;
    mu.horizon = partition.horizon();
    for_each_step(path, partition, [&](const Step& st) {
        if (st.s0 == 0.0 && st.s1 == 0.0) {
            ++mu.dropped;
            return;
        }
        const double w = std::pow(std::abs(st.s1 - st.s0), p);
        if (w == 0.0) return;
        mu.atoms.push_back(Atom{st.t0, projection(st.s0, st.s1), w});
    });
    return mu;
}

double remainder_integral(const AtomMeasure& measure, const std::function<double(double)>& G_hat, double t) {
    if (!measure.time_resolved && t < measure.horizon)
        fail(ErrorKind::invalid_input, "aggregated measure can only be integrated over the whole horizon");
    CompensatedSum s;
    for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
        const Atom& a = measure.atoms[i];
        if (measure.time_resolved && a.t >= t) continue;  // atoms sit at left endpoints
        const double g = G_hat(a.x);
        if (!std::isfinite(g))
            fail(ErrorKind::invalid_input, "kernel undefined at atom " + std::to_string(i) +
                                               " (x = " + std::to_string(a.x) + ")");
        s += a.w * g;
    }
    return s.value();
}

std::function<double(double)> circle_kernel(const DerivativeBundle& f, const FracOrder& p) {
    return [f, p](double theta) {
        const KernelValue k = remainder_kernel(f, p, std::cos(theta), std::sin(theta));
        return k.singular ? std::numeric_limits<double>::quiet_NaN() : k.value;
    };
}

std::vector<AngleWeight> nonzero_atom_weights(double p, int k_max) {
    if (!(p > 2.0 && p < 3.0)) fail(ErrorKind::invalid_parameter, "closed-form weights need 2 < p < 3");
    if (k_max < 1) fail(ErrorKind::invalid_parameter, "k_max must be at least 1");
    const double c = (std::exp2(p - 1.0) - 1.0) / (std::exp2(p) - 1.0);
    std::vector<AngleWeight> out;
    for (int k = 0; k <= k_max; ++k) {
        const double w = std::exp2(-ceil_log2(static_cast<std::uint64_t>(k) + 1) * p) * c;
        out.push_back({std::atan2(k + 1.0, static_cast<double>(k)), w});
        out.push_back({std::atan2(static_cast<double>(k), k + 1.0), w});
    }
    return out;
}

double lattice_compensated_sum(const DerivativeBundle& f, const LatticeStepCounts& counts, int m) {
    const double delta = counts.delta;
    std::vector<double> fact;
    for (int j = 0; j <= m; ++j) fact.push_back(factorial(j));
    for (int j = 1; j <= m; ++j)
        if (!f.has_derivative(j)) fail(ErrorKind::insufficient_derivatives, "lattice sum needs f^(j), j <= m");
    auto step = [&](double x, double d) {
        double c = 0.0, pw = 1.0;
        for (int j = 1; j <= m; ++j) {
            pw *= d;
            c += f.derivative(j, x) * pw / fact[j];
        }
        return c;
    };
    CompensatedSum sum;
    for (std::size_t k = 0; k < counts.up.size(); ++k) {
        sum += counts.up[k] * step(static_cast<double>(k) * delta, delta);
        sum += counts.down[k] * step(static_cast<double>(k + 1) * delta, -delta);
    }
    return sum.value();
}

AtomMeasure lattice_quotient_measure(const LatticeStepCounts& counts, double p) {
    AtomMeasure mu;
    mu.time_resolved = false;
    mu.horizon = 1.0;
    const double w = std::pow(counts.delta, p);
    for (std::size_t k = 0; k < counts.up.size(); ++k) {
        const double kd = static_cast<double>(k);
        mu.atoms.push_back(Atom{1.0, std::atan2(kd + 1.0, kd), counts.up[k] * w});
        mu.atoms.push_back(Atom{1.0, std::atan2(kd, kd + 1.0), counts.down[k] * w});
    }
    return mu;
}

}  // namespace fraclab
