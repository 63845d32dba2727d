#pragma once

#include <functional>
#include <span>

namespace fraclab::quad {

using Fn = std::function<double(double)>;

struct Options {
    double rel_tol = 1e-9;
    int max_panels = 4096;
};

struct Result {
    double value = 0.0;
    double change = 0.0;  // difference between the last two panel counts
    int panels = 0;
    bool converged = false;
};

// A point where the integrand behaves like |t - location|^exponent (times something smooth).
// Integer exponents still split the range, so jumps in derivatives are honoured.
struct Kink {
    double location = 0.0;
    double exponent = 0.0;
};

struct EndBehaviour {
    bool singular = false;
    double exponent = 0.0;
};

// Power q of the graded map t = e + L w^q used next to a |t - e|^mu endpoint.
int grading_power(double mu);

// 32-point Gauss-Legendre on [lo, hi] split into 1, 2, 4, ... equal panels until the
// relative change drops below the tolerance (measured against the integral of |g|).
Result gauss_panels(const Fn& g, double lo, double hi, const Options& opt = {});

// Integral of h over [l, r] with graded substitutions at declared singular endpoints.
Result integrate(const Fn& h, double l, double r, EndBehaviour left = {}, EndBehaviour right = {},
                 const Options& opt = {});

// Integral over [l, r] of a function with interior kinks (split points).
Result integrate_split(const Fn& h, double l, double r, std::span<const Kink> kinks,
                       const Options& opt = {});

// Integral over [a, x] of (x - t)^lambda g(t), lambda > -1. The kernel factor is computed
// from the substitution variable so it never suffers cancellation in x - t.
Result integrate_kernel(const Fn& g, double a, double x, double lambda,
                        std::span<const Kink> kinks, const Options& opt = {});

}  // namespace fraclab::quad
