#include "fraclab/registry.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fraclab/errors.hpp"

namespace fraclab {

using nlohmann::json;

namespace {

void allow_keys(const std::string& name, const json& params, std::set<std::string> keys) {
    if (params.is_null()) return;
    if (!params.is_object()) fail(ErrorKind::invalid_config, "parameters of '" + name + "' must be an object");
    for (auto it = params.begin(); it != params.end(); ++it)
        if (!keys.count(it.key()))
            fail(ErrorKind::invalid_config, "function '" + name + "' has no parameter '" + it.key() + "'");
}

double number(const std::string& name, const json& params, const char* key) {
    if (params.is_null() || !params.contains(key))
        fail(ErrorKind::invalid_config, "function '" + name + "' needs parameter '" + key + "'");
    if (!params[key].is_number()) fail(ErrorKind::invalid_config, std::string("parameter '") + key + "' must be a number");
    return params[key].get<double>();
}

double number_or(const json& params, const char* key, double fallback) {
    if (params.is_null() || !params.contains(key)) return fallback;
    if (!params[key].is_number()) fail(ErrorKind::invalid_config, std::string("parameter '") + key + "' must be a number");
    return params[key].get<double>();
}

std::vector<double> coefficients(const std::string& name, const json& params, const char* key) {
    if (params.is_null() || !params.contains(key) || !params[key].is_array())
        fail(ErrorKind::invalid_config, "function '" + name + "' needs an array '" + key + "'");
    std::vector<double> c;
    for (const json& v : params[key]) {
        if (!v.is_number()) fail(ErrorKind::invalid_config, std::string("'") + key + "' must hold numbers");
        c.push_back(v.get<double>());
    }
    return c;
}

// j-th derivative of sum c_i x^i
double poly_derivative(const std::vector<double>& c, int j, double x) {
    double r = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= j; --i) {
        double f = 1.0;
        for (int q = 0; q < j; ++q) f *= i - q;
        r = r * x + f * c[i];
    }
    return r;
}

SmoothFn abs_power(double k, double p, int order) {
    if (!(p > 0)) fail(ErrorKind::invalid_config, "abs-power needs p > 0");
    std::vector<SmoothFn::Eval> d;
    for (int j = 1; j <= order; ++j) d.push_back([k, p, j](double x) { return abs_power_derivative(p, j, x - k); });
    return SmoothFn([k, p](double x) { return std::pow(std::abs(x - k), p); }, std::move(d), {quad::Kink{k, p}});
}

}  // namespace

double abs_power_derivative(double p, int j, double y) {
    double c = 1.0;
    for (int q = 0; q < j; ++q) c *= p - q;
    if (c == 0.0) return 0.0;
    const double e = p - j;
    if (y == 0.0) {
        if (e > 0) return 0.0;
        if (e == 0) return (j % 2) ? 0.0 : c;
        return std::numeric_limits<double>::infinity();
    }
    const double v = c * std::pow(std::abs(y), e);
    return (y < 0 && (j % 2)) ? -v : v;
}

std::vector<double> ordered_rationals(int n) {
    std::vector<double> out;
    if (n <= 0) return out;
    out.push_back(0.0);
    if (n >= 2) out.push_back(1.0);
    for (long q = 2; static_cast<int>(out.size()) < n; ++q)
        for (long a = 1; a < q && static_cast<int>(out.size()) < n; ++a)
            if (std::gcd(a, q) == 1) out.push_back(static_cast<double>(a) / static_cast<double>(q));
    return out;
}

double abs_power_series_tail_bound(double p, int n_max, double x) {
    return std::pow(std::max(std::abs(x), std::abs(x - 1.0)), p) / n_max;
}

SmoothFn function_registry(const std::string& name, const json& params, int order) {
    if (name == "abs-power") {
        allow_keys(name, params, {"k", "p"});
        return abs_power(number_or(params, "k", 0.0), number(name, params, "p"), order);
    }
    if (name == "abs-power-series") {
        allow_keys(name, params, {"p", "n_max"});
        const double p = number(name, params, "p");
        if (!(p > 0)) fail(ErrorKind::invalid_config, "abs-power-series needs p > 0");
        const double nm = number_or(params, "n_max", 100);
        if (!(nm >= 1) || nm != std::floor(nm)) fail(ErrorKind::invalid_config, "n_max must be a positive integer");
        const std::vector<double> xs = ordered_rationals(static_cast<int>(nm));
        auto eval = [xs, p](int j, double x) {
            double s = 0.0;
            for (std::size_t n = 0; n < xs.size(); ++n) {
                const double w = 1.0 / (static_cast<double>(n + 1) * static_cast<double>(n + 1));
                s += w * (j == 0 ? std::pow(std::abs(x - xs[n]), p) : abs_power_derivative(p, j, x - xs[n]));
            }
            return s;
        };
        std::vector<SmoothFn::Eval> d;
        for (int j = 1; j <= order; ++j) d.push_back([eval, j](double x) { return eval(j, x); });
        std::vector<quad::Kink> kinks;
        for (double x : xs) kinks.push_back({x, p});
        return SmoothFn([eval](double x) { return eval(0, x); }, std::move(d), std::move(kinks));
    }
    if (name == "sin" || name == "cos") {
        allow_keys(name, params, {});
        const int shift = name == "cos" ? 1 : 0;
        std::vector<SmoothFn::Eval> d;
        for (int j = 1; j <= order; ++j)
            d.push_back([j, shift](double x) {
                switch ((j + shift) % 4) {
                    case 0: return std::sin(x);
                    case 1: return std::cos(x);
                    case 2: return -std::sin(x);
                    default: return -std::cos(x);
                }
            });
        if (shift) return SmoothFn([](double x) { return std::cos(x); }, std::move(d));
        return SmoothFn([](double x) { return std::sin(x); }, std::move(d));
    }
    if (name == "exp") {
        allow_keys(name, params, {});
        std::vector<SmoothFn::Eval> d(order, [](double x) { return std::exp(x); });
        return SmoothFn([](double x) { return std::exp(x); }, std::move(d));
    }
    if (name == "polynomial") {
        allow_keys(name, params, {"coeffs"});
        const std::vector<double> c = coefficients(name, params, "coeffs");
        std::vector<SmoothFn::Eval> d;
        for (int j = 1; j <= order; ++j) d.push_back([c, j](double x) { return poly_derivative(c, j, x); });
        return SmoothFn([c](double x) { return poly_derivative(c, 0, x); }, std::move(d));
    }
    if (name == "sum") {
        allow_keys(name, params, {"terms"});
        if (params.is_null() || !params.contains("terms") || !params["terms"].is_array() || params["terms"].empty())
            fail(ErrorKind::invalid_config, "sum needs a non-empty 'terms' array");
        SmoothFn acc;
        bool first = true;
        for (const json& term : params["terms"]) {
            allow_keys("sum term", term, {"name", "params", "coeff"});
            if (!term.contains("name") || !term["name"].is_string())
                fail(ErrorKind::invalid_config, "each sum term needs a 'name'");
            const double c = number_or(term, "coeff", 1.0);
            SmoothFn g = function_registry(term["name"].get<std::string>(),
                                           term.contains("params") ? term["params"] : json(), order);
            if (first) acc = c == 1.0 ? g : SmoothFn::combine(c, g, 0.0, function_registry("polynomial", json{{"coeffs", {0.0}}}, order));
            else acc = SmoothFn::combine(1.0, acc, c, g);
            first = false;
        }
        return acc;
    }
    if (is_time_dependent(name))
        fail(ErrorKind::invalid_config, "'" + name + "' is time dependent; use it with ito-check only");
    fail(ErrorKind::invalid_config, "unknown function '" + name + "'");
}

bool is_time_dependent(const std::string& name) { return name == "abs-power-moving"; }

TimeBundle time_function_registry(const std::string& name, const json& params, int m) {
    if (!is_time_dependent(name)) return TimeBundle::from_spatial(function_registry(name, params, m + 1), m);
    allow_keys(name, params, {"p", "g"});
    const double p = number(name, params, "p");
    if (!(p > 0)) fail(ErrorKind::invalid_config, "abs-power-moving needs p > 0");
    const std::vector<double> g = coefficients(name, params, "g");
    TimeBundle b;
    b.f = [p, g](double t, double x) { return std::pow(std::abs(x - poly_derivative(g, 0, t)), p); };
    b.dt = [p, g](double t, double x) {
        return -abs_power_derivative(p, 1, x - poly_derivative(g, 0, t)) * poly_derivative(g, 1, t);
    };
    for (int k = 1; k <= m; ++k)
        b.dx.push_back([p, g, k](double t, double x) { return abs_power_derivative(p, k, x - poly_derivative(g, 0, t)); });
    return b;
}

}  // namespace fraclab
