#include "fraclab/numeric.hpp"

#include "fraclab/errors.hpp"

namespace fraclab {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorKind::invalid_input, "least squares needs at least two paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) fail(ErrorKind::invalid_input, "least squares with constant abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

int ceil_log2(std::uint64_t n) {
    int k = 0;
    std::uint64_t v = 1;
    while (v < n) {
        v <<= 1;
        ++k;
    }
    return k;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace fraclab
