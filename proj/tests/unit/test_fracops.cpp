#include <cmath>
#include <vector>

#include "fraclab/fracops.hpp"
#include "fraclab/registry.hpp"
#include "support.hpp"

using namespace fraclab;

namespace {

SmoothFn power_fn(double k, double p) { return function_registry("abs-power", {{"k", k}, {"p", p}}); }
SmoothFn poly(std::vector<double> c) { return function_registry("polynomial", {{"coeffs", c}}); }
SmoothFn sine() { return function_registry("sin", nlohmann::json::object()); }

}  // namespace

TEST_CASE("quadrature") {
    const quad::Result r = quad::gauss_panels([](double x) { return std::pow(x, 5); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(r.converged);

    // int_0^1 t^0.3 (1 - t)^{-0.4} dt = B(1.3, 0.6)
    const quad::Kink k[] = {{0.0, 0.3}};
    const double beta = std::tgamma(1.3) * std::tgamma(0.6) / std::tgamma(1.9);
    const quad::Result b = quad::integrate_kernel([](double t) { return std::pow(t, 0.3); }, 0.0, 1.0, -0.4, k);
    CHECK(b.value == doctest::Approx(beta).epsilon(1e-9));

    CHECK(quad::grading_power(0.0) == 1);
    CHECK(quad::grading_power(2.0) == 1);
    CHECK(quad::grading_power(-0.5) >= 2);
}

TEST_CASE("fractional order") {
    const FracOrder a(1.5);
    CHECK(a.m == 1);
    CHECK(a.alpha == doctest::Approx(0.5));
    CHECK(a.m + a.alpha == 1.5);
    const FracOrder b(0.3);
    CHECK(b.m == 0);
    CHECK(b.fractional());
}

TEST_CASE("Riemann-Liouville integrals") {
    CHECK(rl_integral(poly({1.0}), 0.0, 0.5, 1.0) == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
    CHECK(rl_integral(poly({0.0, 1.0}), 0.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(throws_kind([] { rl_integral(poly({1.0}), 0.0, 0.0, 1.0); }, ErrorKind::invalid_order));

    // I^a t^2 = 2 x^{2+a} / Gamma(3+a)
    const SmoothFn sq = poly({0.0, 0.0, 1.0});
    for (double a : {0.3, 0.7, 1.4})
        CHECK(rl_integral(sq, 0.0, a, 1.3) == doctest::Approx(2 * std::pow(1.3, 2 + a) / std::tgamma(3 + a)).epsilon(1e-10));

    // right-sided, by the mirror image of the left power rule
    CHECK(rl_integral_right(poly({1.0}), 1.0, 0.5, 0.0) == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
}

TEST_CASE("RL semigroup") {
    const SmoothFn sq = poly({0.0, 0.0, 1.0});
    const double pairs[][2] = {{0.3, 0.4}, {0.5, 0.5}, {0.2, 0.9}};
    for (auto [a, b] : pairs) {
        const SmoothFn inner([&, b](double x) { return x <= 0 ? 0.0 : rl_integral(sq, 0.0, b, x); });
        const double lhs = rl_integral(inner, 0.0, a, 1.0);
        const double rhs = rl_integral(sq, 0.0, a + b, 1.0);
        CHECK(std::abs(lhs - rhs) < 1e-6);
    }
}

TEST_CASE("Caputo derivatives") {
    for (double p : {0.3, 0.7, 1.5})
        CHECK(std::abs(caputo(poly({2.5}), 0.0, FracOrder(p), 0.8)) < 1e-12);

    const SmoothFn sq = poly({0.0, 0.0, 1.0});
    for (double x : {0.3, 1.0, 2.0})
        CHECK(caputo(sq, 0.0, FracOrder(0.5), x) ==
              doctest::Approx(2.0 / std::tgamma(2.5) * std::pow(x, 1.5)).epsilon(1e-9));
    CHECK(2.0 / std::tgamma(2.5) == doctest::Approx(1.504506).epsilon(1e-6));

    // |x|^a is its own Caputo fixed shape
    const double a = 0.4;
    const SmoothFn f = power_fn(0.0, a);
    for (double x : {1e-2, 1e-4, 1e-6})
        CHECK(caputo(f, 0.0, FracOrder(a), x) == doctest::Approx(std::tgamma(a + 1)).epsilon(1e-7));

    CHECK(throws_kind([&] { caputo(sq, 0.0, FracOrder(0.5), 0.0); }, ErrorKind::invalid_point));
    const SmoothFn bare([](double x) { return x * x; });
    CHECK(throws_kind([&] { caputo(bare, 0.0, FracOrder(1.5), 1.0); }, ErrorKind::insufficient_derivatives));
}

TEST_CASE("Caputo methods agree") {
    const SmoothFn s = sine();
    const FracOrder p(1.3);
    const double q = caputo(s, 0.2, p, 1.1, CaputoMethod::quadrature);
    const double d = caputo(s, 0.2, p, 1.1, CaputoMethod::differentiated);
    CHECK(std::abs(q - d) < 1e-6);
}

TEST_CASE("Caputo of powers in closed form") {
    for (double p : {0.4, 1.5, 2.3})
        CHECK(caputo_power(0.0, 0.0, p, FracOrder(p), 0.7) == doctest::Approx(std::tgamma(p + 1)).epsilon(1e-12));
    const double q = 2.7, p = 1.2;
    CHECK(caputo_power(1.0, 1.0, q, FracOrder(p), 2.5) ==
          doctest::Approx(std::tgamma(q + 1) / std::tgamma(q + 1 - p) * std::pow(1.5, q - p)).epsilon(1e-12));

    const double closed = caputo_power(0.5, 0.0, 2.2, FracOrder(1.3), 1.5);
    const double generic = caputo(power_fn(0.0, 2.2), 0.5, FracOrder(1.3), 1.5);
    CHECK(std::abs(closed - generic) < 1e-6);
    // k between a and x: the kink sits inside the integration range
    const double c2 = caputo_power(0.0, 0.6, 1.8, FracOrder(0.5), 1.4);
    const double g2 = caputo(power_fn(0.6, 1.8), 0.0, FracOrder(0.5), 1.4);
    CHECK(std::abs(c2 - g2) < 1e-6);

    CHECK(throws_kind([] { caputo_power(0.0, 0.0, 0.2, FracOrder(1.5), 1.0); }, ErrorKind::invalid_parameter));
}

TEST_CASE("Caputo linearity and Taylor polynomials") {
    const SmoothFn f = sine();
    const SmoothFn g = power_fn(0.0, 2.4);
    const FracOrder p(1.4);
    const double x = 1.3;
    const double lhs = caputo(SmoothFn::combine(2.0, f, -3.0, g), 0.1, p, x);
    const double rhs = 2.0 * caputo(f, 0.1, p, x) - 3.0 * caputo(g, 0.1, p, x);
    CHECK(std::abs(lhs - rhs) < 1e-9);

    // Taylor polynomial of order m at a
    const double a = 0.4;
    const SmoothFn taylor = poly({std::sin(a) - a * std::cos(a), std::cos(a)});
    CHECK(std::abs(caputo(taylor, a, p, 1.2)) < 1e-12);
}

TEST_CASE("finite-difference derivatives match closed forms") {
    SmoothFn fd([](double x) { return std::sin(x); });
    fd.with_finite_differences(2);
    for (double x : {-1.2, 0.3, 2.0}) {
        CHECK(std::abs(fd.derivative(1, x) - std::cos(x)) < 1e-6);
        CHECK(std::abs(fd.derivative(2, x) + std::sin(x)) < 1e-4);
    }
    const SmoothFn s = sine();
    CHECK(s.has_closed_form(4));
    CHECK_FALSE(SmoothFn([](double x) { return x; }).has_derivative(1));
}

TEST_CASE("local fractional derivatives") {
    const LocalDerivative s = local_frac_derivative(sine(), 0.7, FracOrder(0.6));
    CHECK(s.converged);
    CHECK(std::abs(s.limit) < 1e-4);

    const double p = 1.4;
    const LocalDerivative c = local_frac_derivative(power_fn(0.0, p), 0.0, FracOrder(p));
    CHECK(c.converged);
    CHECK(c.limit == doctest::Approx(std::tgamma(p + 1)).epsilon(1e-6));

    const LocalDerivative c1 = local_frac_derivative(power_fn(0.0, 0.6), 0.0, FracOrder(0.6), LocalMode::classical);
    CHECK(c1.limit == doctest::Approx(1.0).epsilon(1e-9));
    const LocalDerivative c2 = local_frac_derivative(power_fn(0.0, p), 0.0, FracOrder(p), LocalMode::classical);
    CHECK(c2.limit == doctest::Approx(std::tgamma(p + 1) / std::tgamma(1.4 - 1 + 1)).epsilon(1e-9));

    const LocalDerivative off = local_frac_derivative(power_fn(0.0, p), 1.0, FracOrder(p));
    CHECK(off.converged);
    CHECK(std::abs(off.limit) < 1e-4);

    std::vector<double> h, v;
    for (int j = 0; j < 10; ++j) h.push_back(std::ldexp(1.0, -j)), v.push_back(j % 2 ? 1.0 : -1.0);
    CHECK_FALSE(extrapolate_limit(h, v).converged);
}

TEST_CASE("fractional Taylor expansion") {
    std::vector<double> xs;
    for (int j = 14; j >= 2; --j) xs.push_back(std::ldexp(1.0, -j));

    const double p = 1.5;
    const TaylorCheck exact = frac_taylor_check(power_fn(0.0, p), 0.0, FracOrder(p), xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(exact.remainders[i]) < 1e-12 * std::pow(xs[i], p) + 1e-15);

    const SmoothFn mixed = SmoothFn::combine(1.0, power_fn(0.0, p), 1.0, poly({0.0, 0.0, 1.0}));
    const TaylorCheck m = frac_taylor_check(mixed, 0.0, FracOrder(p), xs);
    CHECK(m.coefficient == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.slope == doctest::Approx(2.0).epsilon(0.02));

    std::vector<double> near;
    for (double x : xs) near.push_back(0.5 + x);
    const TaylorCheck s = frac_taylor_check(sine(), 0.5, FracOrder(p), near);
    CHECK(s.slope >= 2.0 - 0.05);
}
