#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <mutex>
#include <random>

#include "fraclab/errors.hpp"
#include "fraclab/paths.hpp"

namespace fraclab {

double fgn_autocovariance(double H, std::int64_t k) {
    const double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, 2.0 * H) - 2.0 * std::pow(a, 2.0 * H) +
                  std::pow(std::abs(a - 1.0), 2.0 * H));
}

namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Davies-Harte: returns false when the circulant embedding has a negative eigenvalue.
bool circulant_increments(double H, std::size_t N, std::mt19937_64& rng, std::vector<double>& out) {
    const std::size_t M = 2 * N;
    fftw_complex* buf = fftw_alloc_complex(M);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(M), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < M; ++j) {
        const std::int64_t lag = static_cast<std::int64_t>(j <= N ? j : M - j);
        buf[j][0] = fgn_autocovariance(H, lag);
        buf[j][1] = 0.0;
    }
    fftw_execute(plan);
    std::vector<double> lambda(M);
    bool ok = true;
    for (std::size_t j = 0; j < M; ++j) {
        lambda[j] = buf[j][0];
        if (lambda[j] < -1e-10 * static_cast<double>(M)) ok = false;
        if (lambda[j] < 0) lambda[j] = 0;
    }
    if (ok) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t j = 0; j < M; ++j) {
            const double s = std::sqrt(lambda[j] / static_cast<double>(M));
            const double z1 = gauss(rng);
            const double z2 = gauss(rng);
            buf[j][0] = s * z1;
            buf[j][1] = s * z2;
        }
        fftw_execute(plan);
        out.resize(N);
        for (std::size_t j = 0; j < N; ++j) out[j] = buf[j][0];
    }
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return ok;
}

void dense_increments(double H, std::size_t N, std::mt19937_64& rng, std::vector<double>& out) {
    const Eigen::Index n = static_cast<Eigen::Index>(N);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = fgn_autocovariance(H, i - j);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::sampling_infeasible, "fGn covariance is not positive definite");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = gauss(rng);
    Eigen::VectorXd x = llt.matrixL() * z;
    out.assign(x.data(), x.data() + n);
}

}  // namespace

SampledPath fbm_path(const GaussianPathSpec& spec) {
    if (!(spec.H > 0.0 && spec.H < 1.0)) fail(ErrorKind::invalid_parameter, "Hurst index must lie in (0,1)");
    if (spec.N < 1) fail(ErrorKind::invalid_parameter, "grid size must be positive");
    if (!(spec.T > 0.0)) fail(ErrorKind::invalid_parameter, "horizon must be positive");
    std::mt19937_64 rng(spec.seed);
    std::vector<double> inc;
    bool done = false;
    if (is_power_of_two(spec.N)) done = circulant_increments(spec.H, spec.N, rng, inc);
    if (!done) {
        if (spec.N > 4096)
            fail(ErrorKind::sampling_infeasible,
                 "circulant embedding unavailable and N exceeds the dense limit 4096");
        rng.seed(spec.seed);
        dense_increments(spec.H, spec.N, rng, inc);
    }
    const double scale = std::pow(spec.T / static_cast<double>(spec.N), spec.H);
    std::vector<double> times = uniform_grid(spec.T, spec.N);
    std::vector<double> values(spec.N + 1, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.N; ++k) {
        acc += scale * inc[k];
        values[k + 1] = acc;
    }
    return SampledPath(std::move(times), std::move(values));
}

}  // namespace fraclab
