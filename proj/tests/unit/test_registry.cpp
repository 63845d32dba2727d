#include <cmath>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "fraclab/registry.hpp"
#include "support.hpp"

using namespace fraclab;
using nlohmann::json;

namespace {

// rationals a/q in [0,1], lowest terms, ordered by denominator then numerator
std::vector<double> rational_list(int n) {
    std::vector<double> out{0.0, 1.0};
    for (int q = 2; static_cast<int>(out.size()) < n; ++q)
        for (int a = 1; a < q && static_cast<int>(out.size()) < n; ++a)
            if (std::gcd(a, q) == 1) out.push_back(static_cast<double>(a) / q);
    out.resize(n);
    return out;
}

}  // namespace

TEST_CASE("polynomial and power derivatives") {
    const SmoothFn lin = function_registry("polynomial", {{"coeffs", {0, 1}}});
    for (double x : {-2.0, 0.0, 3.5}) {
        CHECK(lin.derivative(1, x) == 1.0);
        CHECK(lin.derivative(2, x) == 0.0);
    }
    const SmoothFn cub = function_registry("polynomial", {{"coeffs", {1, 0, -2, 1}}});
    CHECK(cub(2.0) == doctest::Approx(1 - 8 + 8));
    CHECK(cub.derivative(1, 2.0) == doctest::Approx(-8 + 12));
    CHECK(cub.derivative(3, 0.7) == doctest::Approx(6));

    const double p = 2.5;
    const SmoothFn f = function_registry("abs-power", {{"k", 0.5}, {"p", p}});
    for (double x : {-1.0, 0.2, 0.9, 2.0}) {
        const double y = x - 0.5;
        CHECK(f(x) == doctest::Approx(std::pow(std::abs(y), p)));
        CHECK(f.derivative(1, x) == doctest::Approx(p * std::pow(std::abs(y), p - 1) * (y > 0 ? 1 : -1)));
        CHECK(f.derivative(2, x) == doctest::Approx(p * (p - 1) * std::pow(std::abs(y), p - 2)));
    }
    CHECK(abs_power_derivative(p, 3, -0.25) == doctest::Approx(-p * (p - 1) * (p - 2) * std::pow(0.25, p - 3)));
    REQUIRE(f.kinks().size() == 1);
    CHECK(f.kinks()[0].location == 0.5);

    const SmoothFn s = function_registry("sin", json::object());
    CHECK(s.derivative(3, 0.4) == doctest::Approx(-std::cos(0.4)));
    const SmoothFn e = function_registry("exp", json::object());
    CHECK(e.derivative(5, 0.4) == doctest::Approx(std::exp(0.4)));

    const SmoothFn sum = function_registry(
        "sum", {{"terms", {{{"name", "sin"}, {"coeff", 2.0}}, {{"name", "polynomial"}, {"params", {{"coeffs", {0, 3}}}}}}}});
    CHECK(sum(0.3) == doctest::Approx(2 * std::sin(0.3) + 0.9));
    CHECK(sum.derivative(1, 0.3) == doctest::Approx(2 * std::cos(0.3) + 3));
}

TEST_CASE("abs-power series") {
    CHECK(ordered_rationals(8) == rational_list(8));
    CHECK(ordered_rationals(200) == rational_list(200));

    const double p = 2.5;
    const SmoothFn f = function_registry("abs-power-series", {{"p", p}, {"n_max", 100}});
    const std::vector<double> r = rational_list(100);
    for (double x : {0.0, 0.37, 0.5, 1.2}) {
        double brute = 0;
        for (int n = 1; n <= 100; ++n) brute += std::pow(std::abs(x - r[n - 1]), p) / (double(n) * n);
        CHECK(f(x) == doctest::Approx(brute).epsilon(1e-13));
        const SmoothFn g = function_registry("abs-power-series", {{"p", p}, {"n_max", 2000}});
        CHECK(std::abs(g(x) - f(x)) <= abs_power_series_tail_bound(p, 100, x));
    }
    CHECK(f.kinks().size() == 100);
}

TEST_CASE("time-dependent registry entries") {
    CHECK(is_time_dependent("abs-power-moving"));
    CHECK_FALSE(is_time_dependent("sin"));
    const TimeBundle b = time_function_registry("abs-power-moving", {{"p", 2.5}, {"g", {0.1, 0.5}}}, 2);
    CHECK(b.f(0.4, 1.0) == doctest::Approx(std::pow(1.0 - 0.3, 2.5)));
    CHECK(b.dt(0.4, 1.0) == doctest::Approx(-2.5 * std::pow(0.7, 1.5) * 0.5));
    CHECK(b.dx[0](0.4, 1.0) == doctest::Approx(2.5 * std::pow(0.7, 1.5)));
}

TEST_CASE("registry errors") {
    CHECK(throws_kind([] { function_registry("tan", json::object()); }, ErrorKind::invalid_config));
    CHECK(throws_kind([] { function_registry("abs-power", {{"q", 2}}); }, ErrorKind::invalid_config));
    CHECK(throws_kind([] { function_registry("abs-power", {{"p", 2.5}, {"extra", 1}}); }, ErrorKind::invalid_config));
}
