#include "fraclab/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraclab/errors.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

FracOrder::FracOrder(double p_) : p(p_) {
    if (!(p_ > 0.0) || !std::isfinite(p_)) fail(ErrorKind::invalid_order, "order must be positive");
    m = static_cast<int>(std::floor(p_));
    alpha = p_ - m;
    if (alpha < 1e-14) {
        alpha = 0.0;
    } else if (alpha > 1.0 - 1e-14) {
        ++m;
        alpha = 0.0;
    }
}

SmoothFn::SmoothFn(Eval f, std::vector<Eval> derivatives, std::vector<quad::Kink> kinks)
    : f_(std::move(f)), derivs_(std::move(derivatives)), kinks_(std::move(kinks)) {
    if (!f_) fail(ErrorKind::invalid_bundle, "function evaluator missing");
}

SmoothFn& SmoothFn::with_finite_differences(int max_order, double step_scale) {
    if (!(step_scale > 0)) fail(ErrorKind::invalid_parameter, "finite-difference step must be positive");
    fd_order_ = max_order;
    fd_step_ = step_scale;
    return *this;
}

double SmoothFn::derivative(int j, double x) const {
    if (j < 0) fail(ErrorKind::invalid_order, "negative derivative order");
    if (j == 0) return f_(x);
    const int c = closed_form_order();
    if (j <= c) return derivs_[j - 1](x);
    if (j > fd_order_)
        fail(ErrorKind::insufficient_derivatives,
             "derivative of order " + std::to_string(j) + " not available");
    // central stencil of order k on top of the highest closed form
    const int k = j - c;
    const double scale = std::max(1.0, std::abs(x));
    const double h = (k == 1) ? fd_step_ * scale
                              : 0.5 * scale * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (k + 2));
    double sum = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double xi = x + (k - 2 * i) * h;
        const double g = (c == 0) ? f_(xi) : derivs_[c - 1](xi);
        sum += ((i % 2) ? -binom : binom) * g;
        binom = binom * (k - i) / (i + 1);
    }
    return sum / std::pow(2.0 * h, k);
}

std::vector<quad::Kink> SmoothFn::kinks_of_derivative(int j) const {
    std::vector<quad::Kink> out = kinks_;
    for (quad::Kink& k : out) k.exponent -= j;
    return out;
}

SmoothFn SmoothFn::combine(double a, const SmoothFn& f, double b, const SmoothFn& g) {
    const int n = std::min(f.closed_form_order(), g.closed_form_order());
    std::vector<Eval> d;
    for (int j = 1; j <= n; ++j)
        d.push_back([a, b, j, f, g](double x) { return a * f.derivative(j, x) + b * g.derivative(j, x); });
    std::vector<quad::Kink> kinks = f.kinks();
    kinks.insert(kinks.end(), g.kinks().begin(), g.kinks().end());
    SmoothFn out([a, b, f, g](double x) { return a * f(x) + b * g(x); }, std::move(d), std::move(kinks));
    out.fd_order_ = std::min(std::max(f.fd_order_, f.closed_form_order()),
                             std::max(g.fd_order_, g.closed_form_order()));
    out.fd_step_ = std::max(f.fd_step_, g.fd_step_);
    return out;
}

namespace {

double checked(const quad::Result& r, const char* what) {
    if (!r.converged && r.change > 1e-7 * std::max(1e-300, std::abs(r.value)))
        fail(ErrorKind::numeric_error, std::string(what) + ": quadrature did not converge");
    return r.value;
}

}  // namespace

double rl_integral(const SmoothFn& f, double a, double alpha, double x, const quad::Options& opt) {
    if (!(alpha > 0.0)) fail(ErrorKind::invalid_order, "integration order must be positive");
    if (x < a) fail(ErrorKind::invalid_point, "x must not lie left of a");
    auto kinks = f.kinks();
    auto g = [&](double t) { return f(t); };
    return checked(quad::integrate_kernel(g, a, x, alpha - 1.0, kinks, opt), "rl_integral") /
           std::tgamma(alpha);
}

double rl_integral_right(const SmoothFn& f, double b, double alpha, double x, const quad::Options& opt) {
    if (x > b) fail(ErrorKind::invalid_point, "x must not lie right of b");
    std::vector<quad::Kink> kinks = f.kinks();
    for (quad::Kink& k : kinks) k.location = -k.location;
    SmoothFn reflected([f](double s) { return f(-s); }, {}, std::move(kinks));
    return rl_integral(reflected, -b, alpha, -x, opt);
}

double caputo(const SmoothFn& f, double a, const FracOrder& p, double x, CaputoMethod method) {
    if (!(x > a)) fail(ErrorKind::invalid_point, "Caputo derivative needs x > a");
    const int m = p.m;
    if (!p.fractional()) return f.derivative(m, x);
    if (method == CaputoMethod::automatic)
        method = f.has_closed_form(m + 1) ? CaputoMethod::quadrature : CaputoMethod::differentiated;

    if (method == CaputoMethod::quadrature) {
        if (!f.has_derivative(m + 1))
            fail(ErrorKind::insufficient_derivatives, "quadrature Caputo needs f^(m+1)");
        auto kinks = f.kinks_of_derivative(m + 1);
        auto g = [&](double t) { return f.derivative(m + 1, t); };
        return checked(quad::integrate_kernel(g, a, x, -p.alpha, kinks), "caputo") /
               std::tgamma(1.0 - p.alpha);
    }

    if (!f.has_derivative(m)) fail(ErrorKind::insufficient_derivatives, "Caputo needs f^(m)");
    const double base = f.derivative(m, a);
    auto kinks = f.kinks_of_derivative(m);
    auto g = [&](double t) { return f.derivative(m, t) - base; };
    quad::Options tight;
    tight.rel_tol = 1e-13;
    auto J = [&](double y) {
        return quad::integrate_kernel(g, a, y, -p.alpha, kinks, tight).value;
    };
    double h = 1e-5 * std::max(1.0, std::abs(x));
    if (x - h <= a) h = 0.5 * (x - a);
    return (J(x + h) - J(x - h)) / (2.0 * h) / std::tgamma(1.0 - p.alpha);
}

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

double smooth_integral(const std::function<double(double)>& g, double lo, double hi, double grade_exp) {
    quad::Options opt;
    opt.rel_tol = 1e-12;
    quad::EndBehaviour left{grade_exp != 0.0, grade_exp};
    return checked(quad::integrate(g, lo, hi, left, {}, opt), "caputo_power");
}

// int_z^1 s^beta (1-s)^{-alpha} ds with z in (0,1).
double beta_tail(double z, double beta, double alpha) {
    double total = 0.0;
    const double c = 1.0 / (1.0 - alpha);
    const double mid = std::max(z, 0.5);
    // [mid, 1]: v = (1-s)^{1-alpha}
    total += smooth_integral([&](double v) { return std::pow(1.0 - std::pow(v, c), beta); }, 0.0,
                             std::pow(1.0 - mid, 1.0 - alpha), c) * c;
    if (z < 0.5) {
        if (beta > -1.0) {
            const double e = 1.0 / (beta + 1.0);
            total += smooth_integral([&](double u) { return std::pow(1.0 - std::pow(u, e), -alpha); },
                                     std::pow(z, beta + 1.0), std::pow(0.5, beta + 1.0), 0.0) * e;
        } else {
            total += smooth_integral(
                [&](double u) {
                    const double s = std::exp(u);
                    return std::pow(s, beta + 1.0) * std::pow(1.0 - s, -alpha);
                },
                std::log(z), std::log(0.5), 0.0);
        }
    }
    return total;
}

}  // namespace

double caputo_power(double a, double k, double q, const FracOrder& p, double x) {
    if (!(x > a)) fail(ErrorKind::invalid_point, "Caputo derivative needs x > a");
    if (!(q > p.p - 1.0)) fail(ErrorKind::invalid_parameter, "caputo_power needs q > p - 1");
    const int m = p.m;
    const double alpha = p.alpha;
    if (!p.fractional()) {
        double c = 1.0;
        for (int j = 0; j < m; ++j) c *= (q - j);
        const double d = x - k;
        if (d == 0.0) fail(ErrorKind::invalid_parameter, "integer derivative at the kink");
        return c * std::pow(std::abs(d), q - m) * ((m % 2 && d < 0) ? -1.0 : 1.0);
    }
    if (is_integer(q) && q <= m) {
        // a polynomial of degree <= m on [a, x] unless an odd power kinks inside
        const bool even = std::llround(q) % 2 == 0;
        if (even || k <= a || k >= x) return 0.0;
        fail(ErrorKind::invalid_parameter, "f^(m+1) is not integrable across the kink (need q > m)");
    }
    if (a == k) {
        return std::tgamma(q + 1.0) / std::tgamma(q + 1.0 - p.p) * std::pow(x - k, q - p.p);
    }
    const bool kink_inside = k > a && k <= x;
    if (kink_inside && q <= m)
        fail(ErrorKind::invalid_parameter, "f^(m+1) is not integrable across the kink (need q > m)");

    double c = 1.0;  // q (q-1) ... (q-m)
    for (int j = 0; j <= m; ++j) c *= (q - j);
    const double beta = q - m - 1.0;
    const double sign_left = (m + 1) % 2 ? -1.0 : 1.0;
    double I = 0.0;
    if (k < a) {
        const double z = (a - k) / (x - k);
        I = std::pow(x - k, beta + 1.0 - alpha) * beta_tail(z, beta, alpha);
    } else if (k >= x) {
        if (k == x) {
            if (!(beta - alpha > -1.0)) fail(ErrorKind::invalid_parameter, "divergent at x = k (need q > p)");
            I = sign_left * std::pow(x - a, beta - alpha + 1.0) / (beta - alpha + 1.0);
        } else {
            const double e = 1.0 / (1.0 - alpha);
            I = sign_left * e *
                smooth_integral([&](double v) { return std::pow(k - x + std::pow(v, e), beta); }, 0.0,
                                std::pow(x - a, 1.0 - alpha), e);
        }
    } else {
        const double e = 1.0 / (beta + 1.0);
        const double left =
            e * smooth_integral([&](double v) { return std::pow(x - k + std::pow(v, e), -alpha); }, 0.0,
                                std::pow(k - a, beta + 1.0), e);
        const double right = std::pow(x - k, beta + 1.0 - alpha) * std::beta(beta + 1.0, 1.0 - alpha);
        I = sign_left * left + right;
    }
    return c * I / std::tgamma(1.0 - alpha);
}

std::vector<double> default_shrink_steps() {
    std::vector<double> h;
    for (int j = 4; j <= 20; ++j) h.push_back(std::ldexp(1.0, -j));
    return h;
}

LocalDerivative extrapolate_limit(std::vector<double> steps, std::vector<double> values) {
    LocalDerivative out;
    out.steps = std::move(steps);
    out.values = std::move(values);
    const std::size_t n = out.values.size();
    if (n < 5) fail(ErrorKind::invalid_input, "limit estimation needs at least five terms");
    const double last = out.values.back();
    std::vector<double> d;
    for (std::size_t i = n - 4; i + 1 < n; ++i) d.push_back(out.values[i + 1] - out.values[i]);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    if (dmax <= 1e-9 * std::max(1.0, std::abs(last))) {
        out.limit = last;
        out.converged = true;
        return out;
    }
    std::vector<double> ratio;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] == 0.0) {
            out.limit = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        ratio.push_back(d[i + 1] / d[i]);
    }
    ratio.push_back(ratio.back());
    const double rmin = *std::min_element(ratio.begin(), ratio.end());
    const double rmax = *std::max_element(ratio.begin(), ratio.end());
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= static_cast<double>(ratio.size());
    if (mean == 0.0 || (rmax - rmin) / std::abs(mean) > 0.2 || std::abs(mean) >= 1.0) {
        out.limit = std::numeric_limits<double>::quiet_NaN();
        out.converged = false;
        return out;
    }
    const double rho = ratio[ratio.size() - 2];
    out.limit = last + d.back() * rho / (1.0 - rho);
    out.converged = true;
    return out;
}

LocalDerivative local_frac_derivative(const SmoothFn& f, double a, const FracOrder& p, LocalMode mode,
                                      std::span<const double> steps) {
    std::vector<double> h(steps.begin(), steps.end());
    if (h.empty()) h = default_shrink_steps();
    for (std::size_t i = 0; i < h.size(); ++i)
        if (!(h[i] > 0) || (i > 0 && !(h[i] < h[i - 1])))
            fail(ErrorKind::invalid_parameter, "shrink steps must be positive and decreasing");
    std::vector<double> r(h.size());
    if (mode == LocalMode::caputo) {
        for (std::size_t i = 0; i < h.size(); ++i) r[i] = caputo(f, a, p, a + h[i]);
    } else {
        if (!f.has_derivative(p.m)) fail(ErrorKind::insufficient_derivatives, "f^(m) needed");
        const double base = f.derivative(p.m, a);
        const double alpha = p.fractional() ? p.alpha : 1.0;
        for (std::size_t i = 0; i < h.size(); ++i)
            r[i] = (f.derivative(p.m, a + h[i]) - base) / std::pow(h[i], alpha);
    }
    return extrapolate_limit(std::move(h), std::move(r));
}

TaylorCheck frac_taylor_check(const SmoothFn& f, double a, const FracOrder& p, std::span<const double> xs) {
    if (xs.empty()) fail(ErrorKind::invalid_input, "no evaluation points");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!(xs[i] > a && xs[i] <= a + 1.0) || (i > 0 && !(xs[i] > xs[i - 1])))
            fail(ErrorKind::invalid_input, "points must be sorted inside (a, a+1]");
    TaylorCheck out;
    out.xs.assign(xs.begin(), xs.end());
    const LocalDerivative local = local_frac_derivative(f, a, p);
    out.coefficient_converged = local.converged;
    const double deriv = local.converged ? local.limit : local.values.back();
    out.coefficient = deriv / std::tgamma(p.p + 1.0);
    std::vector<double> taylor(p.m + 1);
    for (int k = 0; k <= p.m; ++k) taylor[k] = f.derivative(k, a) / factorial(k);
    for (double x : xs) {
        const double d = x - a;
        double poly = 0.0, dk = 1.0;
        for (int k = 0; k <= p.m; ++k) {
            poly += taylor[k] * dk;
            dk *= d;
        }
        out.remainders.push_back(f(x) - poly - out.coefficient * std::pow(d, p.p));
    }
    const double dmin = xs.front() - a;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - a;
        if (d > 10.0 * dmin * (1.0 + 1e-12)) break;
        if (out.remainders[i] != 0.0) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(std::abs(out.remainders[i])));
        }
    }
    out.slope = lx.size() >= 2 ? least_squares(lx, ly).slope : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace fraclab
