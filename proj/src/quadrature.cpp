#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab::quad {
namespace {

struct Rule {
    std::array<double, 32> x{};
    std::array<double, 32> w{};
};

// Newton iteration on the Legendre recurrence.
Rule make_rule() {
    Rule r;
    constexpr int n = 32;
    for (int i = 0; i < n / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

const Rule& rule() {
    static const Rule r = make_rule();
    return r;
}

bool is_nonneg_integer(double mu) { return mu >= 0 && std::abs(mu - std::round(mu)) < 1e-12; }

struct Marked {
    double t;
    bool singular;
    double exponent;
};

}  // namespace

int grading_power(double mu) {
    if (!(mu > -1.0)) fail(ErrorKind::numeric_error, "non-integrable endpoint exponent");
    if (is_nonneg_integer(mu)) return 1;
    int q = static_cast<int>(std::ceil(4.0 / (mu + 1.0) - 1e-12));
    return std::clamp(q, 2, 60);
}

Result gauss_panels(const Fn& g, double lo, double hi, const Options& opt) {
    Result res;
    if (hi == lo) {
        res.converged = true;
        return res;
    }
    const Rule& r = rule();
    double prev = 0.0;
    for (int panels = 1; panels <= opt.max_panels; panels *= 2) {
        const double h = (hi - lo) / panels;
        double sum = 0.0, abs_sum = 0.0;
        for (int k = 0; k < panels; ++k) {
            const double c = lo + (k + 0.5) * h;
            double s = 0.0, sa = 0.0;
            for (int i = 0; i < 32; ++i) {
                double v = g(c + 0.5 * h * r.x[i]);
                s += r.w[i] * v;
                sa += r.w[i] * std::abs(v);
            }
            sum += 0.5 * h * s;
            abs_sum += 0.5 * std::abs(h) * sa;
        }
        if (!std::isfinite(sum)) fail(ErrorKind::numeric_error, "non-finite integrand value");
        res.value = sum;
        res.panels = panels;
        if (panels > 1) {
            res.change = std::abs(sum - prev);
            if (res.change <= opt.rel_tol * abs_sum) {
                res.converged = true;
                return res;
            }
        } else if (abs_sum == 0.0) {
            // identically zero on the first panel set; one refinement confirms it
        }
        prev = sum;
    }
    return res;
}

Result integrate(const Fn& h, double l, double r, EndBehaviour left, EndBehaviour right,
                 const Options& opt) {
    if (r == l) return Result{0.0, 0.0, 0, true};
    if (left.singular && grading_power(left.exponent) == 1) left.singular = false;
    if (right.singular && grading_power(right.exponent) == 1) right.singular = false;
    if (left.singular && right.singular) {
        const double mid = 0.5 * (l + r);
        Result a = integrate(h, l, mid, left, {}, opt);
        Result b = integrate(h, mid, r, {}, right, opt);
        return Result{a.value + b.value, a.change + b.change, a.panels + b.panels,
                      a.converged && b.converged};
    }
    if (!left.singular && !right.singular) return gauss_panels(h, l, r, opt);

    const bool at_left = left.singular;
    const double e = at_left ? l : r;
    const double sgn = at_left ? 1.0 : -1.0;
    const double len = r - l;
    const int q = grading_power(at_left ? left.exponent : right.exponent);
    auto mapped = [&](double w) {
        const double d = len * std::pow(w, q);
        const double t = e + sgn * d;
        double v = h(t);
        if (!std::isfinite(v) && t == e) return 0.0;
        return v * len * q * std::pow(w, q - 1);
    };
    return gauss_panels(mapped, 0.0, 1.0, opt);
}

Result integrate_split(const Fn& h, double l, double r, std::span<const Kink> kinks,
                       const Options& opt) {
    std::vector<Marked> pts{{l, false, 0.0}, {r, false, 0.0}};
    for (const Kink& k : kinks) {
        if (k.location > l && k.location < r)
            pts.push_back({k.location, !is_nonneg_integer(k.exponent), k.exponent});
        else if (k.location == l && !is_nonneg_integer(k.exponent))
            pts[0] = {l, true, k.exponent};
        else if (k.location == r && !is_nonneg_integer(k.exponent))
            pts[1] = {r, true, k.exponent};
    }
    std::sort(pts.begin(), pts.end(), [](const Marked& a, const Marked& b) { return a.t < b.t; });
    Result total{0.0, 0.0, 0, true};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1].t == pts[i].t) continue;
        Result piece = integrate(h, pts[i].t, pts[i + 1].t, {pts[i].singular, pts[i].exponent},
                                 {pts[i + 1].singular, pts[i + 1].exponent}, opt);
        total.value += piece.value;
        total.change += piece.change;
        total.panels += piece.panels;
        total.converged = total.converged && piece.converged;
    }
    return total;
}

Result integrate_kernel(const Fn& g, double a, double x, double lambda,
                        std::span<const Kink> kinks, const Options& opt) {
    if (!(lambda > -1.0)) fail(ErrorKind::numeric_error, "kernel exponent must exceed -1");
    if (x < a) fail(ErrorKind::invalid_point, "kernel integral needs x >= a");
    if (x == a) return Result{0.0, 0.0, 0, true};

    std::vector<Marked> pts{{a, false, 0.0}};
    double x_exponent = 0.0;
    bool x_kink = false;
    for (const Kink& k : kinks) {
        const bool smooth = is_nonneg_integer(k.exponent);
        if (k.location > a && k.location < x)
            pts.push_back({k.location, !smooth, k.exponent});
        else if (k.location == a && !smooth)
            pts[0] = {a, true, k.exponent};
        else if (k.location == x && !smooth) {
            x_kink = true;
            x_exponent = k.exponent;
        }
    }
    std::sort(pts.begin(), pts.end(), [](const Marked& u, const Marked& v) { return u.t < v.t; });

    auto full = [&](double t) { return g(t) * std::pow(x - t, lambda); };
    Result total{0.0, 0.0, 0, true};
    auto accumulate = [&](const Result& piece) {
        total.value += piece.value;
        total.change += piece.change;
        total.panels += piece.panels;
        total.converged = total.converged && piece.converged;
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1].t == pts[i].t) continue;
        accumulate(integrate(full, pts[i].t, pts[i + 1].t, {pts[i].singular, pts[i].exponent},
                             {pts[i + 1].singular, pts[i + 1].exponent}, opt));
    }

    // Last piece [l, x]: kernel singularity at x handled by t = x - L w^q.
    double l = pts.back().t;
    if (pts.back().singular) {
        const double mid = 0.5 * (l + x);
        accumulate(integrate(full, l, mid, {true, pts.back().exponent}, {}, opt));
        l = mid;
    }
    const double mu = lambda + (x_kink ? x_exponent : 0.0);
    const int q = (x_kink || !is_nonneg_integer(lambda)) ? grading_power(mu) : 1;
    const double len = x - l;
    auto mapped = [&](double w) {
        const double wq = std::pow(w, q);
        const double t = x - len * wq;
        double v = g(t);
        if (!std::isfinite(v) && t == x) return 0.0;
        return v * std::pow(len * wq, lambda) * len * q * std::pow(w, q - 1);
    };
    accumulate(gauss_panels(mapped, 0.0, 1.0, opt));
    return total;
}

}  // namespace fraclab::quad
