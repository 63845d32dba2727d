#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fraclab/follmer.hpp"

namespace fraclab {

// Named test functions with closed-form derivatives through `order`.
//   abs-power          {k = 0, p}            |x - k|^p
//   abs-power-series   {p, n_max = 100}      sum_{n <= n_max} n^-2 |x - x_n|^p
//   sin, exp           {}
//   polynomial         {coeffs}              sum_i c_i x^i
//   sum                {terms: [{name, params, coeff}]}
// Unknown names or parameters throw invalid-config.
SmoothFn function_registry(const std::string& name, const nlohmann::json& params, int order = 8);

// abs-power-moving {p, g}: |x - g(t)|^p with g a polynomial; spatial entries are frozen in t.
TimeBundle time_function_registry(const std::string& name, const nlohmann::json& params, int m);
bool is_time_dependent(const std::string& name);

// x_1 = 0, x_2 = 1, x_3 = 1/2, x_4 = 1/3, x_5 = 2/3, ...: rationals in [0,1] by denominator.
std::vector<double> ordered_rationals(int n);

// |f(x) - f_{n_max}(x)| <= max(|x|, |x - 1|)^p / n_max.
double abs_power_series_tail_bound(double p, int n_max, double x);

// d^j/dy^j |y|^p
double abs_power_derivative(double p, int j, double y);

}  // namespace fraclab
