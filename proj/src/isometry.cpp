#include "fraclab/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

LimitEstimate phi_hat(const PhiSpec& phi, double x) {
    switch (phi.kind) {
        case PhiSpec::Kind::power: return {std::pow(std::abs(x), phi.exponent), true, true};
        case PhiSpec::Kind::log_modulated: return {std::abs(x), true, true};
        case PhiSpec::Kind::custom: break;
    }
    std::vector<double> r;
    for (int j = 10; j <= 30; ++j) {
        const double y = std::ldexp(1.0, -j);
        const double d = phi(y);
        if (d == 0.0) fail(ErrorKind::invalid_phi, "gauge vanishes at y = 2^-" + std::to_string(j));
        r.push_back(phi(x * y) / d);
    }
    LimitEstimate out;
    out.value = r.back();
    const double scale = std::max(1.0, std::abs(out.value));
    for (std::size_t i = r.size() - 4; i + 1 < r.size(); ++i)
        if (!std::isfinite(r[i + 1]) || std::abs(r[i + 1] - r[i]) > 1e-4 * scale) out.stable = false;
    return out;
}

LimitEstimate p_phi_estimate(const PhiSpec& phi) {
    if (phi.kind == PhiSpec::Kind::power) return {phi.exponent, true, true};
    if (phi.p_phi) return {*phi.p_phi, true, true};
    // local slopes d log phi / d log x, fitted as s + c / log x
    std::vector<double> inv_log, slope;
    double prev_l = 0.0, prev_v = 0.0;
    for (int j = 10; j <= 40; ++j) {
        const double x = std::ldexp(1.0, -j);
        const double v = std::log(phi(x));
        const double l = std::log(x);
        if (!std::isfinite(v)) fail(ErrorKind::invalid_phi, "gauge not positive near 0");
        if (j > 10) {
            inv_log.push_back(2.0 / (l + prev_l));
            slope.push_back((v - prev_v) / (l - prev_l));
        }
        prev_l = l;
        prev_v = v;
    }
    const LinearFit fit = least_squares(inv_log, slope);
    LimitEstimate out;
    out.value = fit.intercept;
    double worst = 0.0;
    for (std::size_t i = 0; i < slope.size(); ++i)
        worst = std::max(worst, std::abs(slope[i] - (fit.intercept + fit.slope * inv_log[i])));
    out.stable = worst < 1e-2;
    return out;
}

AdmissibilityGate admissibility(double holder_alpha, double p_phi) {
    if (!(p_phi > 0)) fail(ErrorKind::invalid_parameter, "p(phi) must be positive");
    AdmissibilityGate g;
    g.alpha = holder_alpha;
    g.threshold = (std::sqrt(1.0 + 4.0 / p_phi) - 1.0) / 2.0;
    g.passed = holder_alpha > g.threshold;
    return g;
}

double holder_exponent_estimate(const SampledPath& path) {
    const auto v = path.values();
    const auto t = path.times();
    const std::size_t n = v.size() - 1;
    std::vector<double> lx, ly;
    for (std::size_t lag = 1; lag * 16 <= n; lag *= 2) {
        CompensatedSum s;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i + lag <= n; i += lag) {
            s += std::abs(v[i + lag] - v[i]);
            ++cnt;
        }
        const double mean = s.value() / static_cast<double>(cnt);
        if (mean <= 0.0) continue;
        lx.push_back(std::log(t[lag] - t[0]));
        ly.push_back(std::log(mean));
    }
    if (lx.size() < 2) fail(ErrorKind::invalid_input, "path too short or constant for a Hoelder estimate");
    return least_squares(lx, ly).slope;
}

IsometryReport isometry_check(const IsometrySpec& spec, const SampledPath& path, const PartitionSequence& seq,
                              double t, double tolerance, int jobs) {
    IsometryReport rep;
    rep.gate = admissibility(spec.holder_alpha, spec.p_phi);
    rep.holder_source = spec.holder_source;
    rep.tolerance = tolerance;
    if (!rep.gate.passed) {
        std::ostringstream os;
        os.precision(12);
        os << "Hoelder exponent alpha = " << rep.gate.alpha << " (" << spec.holder_source
           << ") does not exceed (sqrt(1 + 4/p) - 1)/2 = " << rep.gate.threshold << " for p(phi) = " << spec.p_phi;
        fail(ErrorKind::admissibility_error, os.str());
    }
    const FunctionalBundle& F = spec.functional;
    if (!F.F) fail(ErrorKind::invalid_bundle, "functional evaluator missing");
    if (!(t >= 0.0 && t <= path.horizon())) fail(ErrorKind::invalid_parameter, "evaluation time outside [0, T]");
    const PrefixKnots actual(PrefixKnots::Shape::linear,
                             std::vector<double>(path.times().begin(), path.times().end()),
                             std::vector<double>(path.values().begin(), path.values().end()));
    const std::size_t L = seq.size();
    rep.levels = seq.labels();
    rep.lhs.assign(L, 0.0);
    rep.rhs.assign(L, 0.0);
    rep.rel_error.assign(L, 0.0);
    parallel_for(L, jobs, [&](std::size_t l) {
        const Partition& part = seq[l];
        auto tt = part.times();
        double h = F.bump_scale * osc(path, part);
        if (!(h > 0)) h = 1e-4;
        CompensatedSum lhs, rhs;
        const PathPrefix w0(actual, tt[0], tt[0]);
        double f_prev = F.F(tt[0], w0);
        double s_prev = w0.value();
        for (std::size_t j = 0; j + 1 < tt.size() && tt[j] < t; ++j) {
            const double b = std::min(tt[j + 1], t);
            const PathPrefix wj(actual, tt[j], tt[j]);
            const PathPrefix wb(actual, b, b);
            const double f_next = F.F(b, wb);
            const double s_next = wb.value();
            lhs += spec.phi(std::abs(f_next - f_prev));
            const double grad = vertical_derivative(F, 1, wj, h);
            rhs += phi_hat(spec.phi, std::abs(grad)).value * spec.phi(std::abs(s_next - s_prev));
            f_prev = f_next;
            s_prev = s_next;
        }
        rep.lhs[l] = lhs.value();
        rep.rhs[l] = rhs.value();
        const double denom = rep.lhs[l] != 0.0 ? std::abs(rep.lhs[l]) : 1.0;
        rep.rel_error[l] = std::abs(rep.lhs[l] - rep.rhs[l]) / denom;
    });
    rep.converged = L > 0 && rep.rel_error.back() < tolerance;
    return rep;
}

double phi_inverse(const PhiSpec& phi, double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) fail(ErrorKind::numeric_error, "cannot invert the gauge at a non-finite value");
    if (y == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    if (phi.kind == PhiSpec::Kind::log_modulated) {
        hi = std::nextafter(1.0, 0.0);
        if (phi(hi) < y) fail(ErrorKind::numeric_error, "value outside the range of x/sqrt(-log x)");
    } else {
        int doublings = 0;
        while (phi(hi) < y) {
            lo = hi;
            hi *= 2.0;
            if (++doublings > 1000 || !std::isfinite(hi))
                fail(ErrorKind::numeric_error, "gauge inverse: no bracket found");
        }
    }
    for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) < y) lo = mid;
        else hi = mid;
    }
    if (!(hi - lo <= 1e-12 * std::max(hi, 1e-300)))
        fail(ErrorKind::numeric_error, "gauge inverse: bisection did not narrow");
    return 0.5 * (lo + hi);
}

MinkowskiReport generalized_minkowski_check(const PhiSpec& phi, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::invalid_input, "vectors differ in length");
    CompensatedSum sab, sa, sb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] >= 0.0 && b[i] >= 0.0)) fail(ErrorKind::invalid_input, "entries must be non-negative");
        sab += phi(a[i] + b[i]);
        sa += phi(a[i]);
        sb += phi(b[i]);
    }
    MinkowskiReport r;
    r.lhs = phi_inverse(phi, sab.value());
    r.rhs = phi_inverse(phi, sa.value()) + phi_inverse(phi, sb.value());
    r.holds = r.lhs <= r.rhs + 1e-10;
    return r;
}

}  // namespace fraclab
