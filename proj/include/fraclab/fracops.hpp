#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fraclab/quadrature.hpp"

namespace fraclab {

struct FracOrder {
    double p = 0.5;
    int m = 0;
    double alpha = 0.5;

    explicit FracOrder(double p);
    bool fractional() const { return alpha > 0.0; }
};

// A function with closed-form derivatives f', f'', ... and optional finite-difference
// fallback beyond them. Kinks record points where f behaves like |x - k|^q; the j-th
// derivative then behaves like |x - k|^{q-j}.
class SmoothFn {
public:
    using Eval = std::function<double(double)>;

    SmoothFn() = default;
    explicit SmoothFn(Eval f, std::vector<Eval> derivatives = {}, std::vector<quad::Kink> kinks = {});

    double operator()(double x) const { return f_(x); }
    double derivative(int j, double x) const;

    int closed_form_order() const { return static_cast<int>(derivs_.size()); }
    bool has_derivative(int j) const { return j <= closed_form_order() || j <= fd_order_; }
    bool has_closed_form(int j) const { return j <= closed_form_order(); }

    // Allow centered differences up to order `max_order`; first derivatives use the step
    // h = step_scale * max(1, |x|).
    SmoothFn& with_finite_differences(int max_order, double step_scale = 1e-5);

    const std::vector<quad::Kink>& kinks() const { return kinks_; }
    std::vector<quad::Kink> kinks_of_derivative(int j) const;

    // a f + b g
    static SmoothFn combine(double a, const SmoothFn& f, double b, const SmoothFn& g);

private:
    Eval f_;
    std::vector<Eval> derivs_;
    std::vector<quad::Kink> kinks_;
    int fd_order_ = 0;
    double fd_step_ = 1e-5;
};

// Left Riemann-Liouville integral of order alpha at x.
double rl_integral(const SmoothFn& f, double a, double alpha, double x, const quad::Options& opt = {});
// Right-sided integral (1/Gamma(alpha)) int_x^b (t - x)^{alpha-1} f(t) dt, by reflection.
double rl_integral_right(const SmoothFn& f, double b, double alpha, double x,
                         const quad::Options& opt = {});

enum class CaputoMethod { automatic, quadrature, differentiated };

double caputo(const SmoothFn& f, double a, const FracOrder& p, double x,
              CaputoMethod method = CaputoMethod::automatic);

// Caputo derivative of |x - k|^q.
double caputo_power(double a, double k, double q, const FracOrder& p, double x);

enum class LocalMode { caputo, classical };

struct LocalDerivative {
    std::vector<double> steps;
    std::vector<double> values;
    double limit = 0.0;
    bool converged = false;  // false means `no-limit`
};

std::vector<double> default_shrink_steps();

LocalDerivative local_frac_derivative(const SmoothFn& f, double a, const FracOrder& p,
                                      LocalMode mode = LocalMode::caputo,
                                      std::span<const double> steps = {});

// Limit of a sequence converging geometrically (or already flat); sets converged=false
// when the last three difference ratios disagree by more than 20%.
LocalDerivative extrapolate_limit(std::vector<double> steps, std::vector<double> values);

struct TaylorCheck {
    std::vector<double> xs;
    std::vector<double> remainders;
    double coefficient = 0.0;  // f^{(p+)}(a) / Gamma(p+1)
    bool coefficient_converged = false;
    double slope = 0.0;  // +inf when the remainder vanishes on the fitted decade
};

TaylorCheck frac_taylor_check(const SmoothFn& f, double a, const FracOrder& p,
                              std::span<const double> xs);

}  // namespace fraclab
