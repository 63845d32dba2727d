#include <cmath>
#include <random>
#include <vector>

#include "fraclab/isometry.hpp"
#include "fraclab/registry.hpp"
#include "support.hpp"

using namespace fraclab;

namespace {

SmoothFn poly(std::vector<double> c) { return function_registry("polynomial", {{"coeffs", c}}); }

IsometrySpec cylinder_spec(const SmoothFn& f, double p) {
    IsometrySpec s;
    s.phi = PhiSpec::power(p);
    s.p_phi = p;
    s.holder_alpha = 0.79;
    s.functional = FunctionalBundle::cylinder(f, 1);
    return s;
}

}  // namespace

TEST_CASE("phi-hat") {
    CHECK(phi_hat(PhiSpec::power(2.5), 2.0).value == doctest::Approx(5.65685).epsilon(1e-6));
    CHECK(phi_hat(PhiSpec::power(2.5), 2.0).exact);
    CHECK(phi_hat(PhiSpec::log_modulated(), 0.5).value == 0.5);
    CHECK(phi_hat(PhiSpec::power(1.7), 1.0).value == 1.0);
    for (double x : {0.2, 0.9, 3.0})
        for (double y : {0.5, 1.7}) {
            CHECK(phi_hat(PhiSpec::power(2.2), x * y).value ==
                  doctest::Approx(phi_hat(PhiSpec::power(2.2), x).value * phi_hat(PhiSpec::power(2.2), y).value).epsilon(1e-14));
            CHECK(phi_hat(PhiSpec::log_modulated(), x * y).value ==
                  doctest::Approx(phi_hat(PhiSpec::log_modulated(), x).value * phi_hat(PhiSpec::log_modulated(), y).value).epsilon(1e-14));
        }

    // numeric limit for an untagged gauge
    const PhiSpec quadratic = PhiSpec::custom([](double x) { return x * x + x * x * x; }, 2);
    const LimitEstimate e = phi_hat(quadratic, 3.0);
    CHECK(e.stable);
    CHECK_FALSE(e.exact);
    CHECK(e.value == doctest::Approx(9.0).epsilon(1e-4));
}

TEST_CASE("p(phi)") {
    const LimitEstimate pw = p_phi_estimate(PhiSpec::power(2.3));
    CHECK(pw.value == 2.3);
    CHECK(pw.exact);
    const PhiSpec lm = PhiSpec::custom([](double x) { return x / std::sqrt(-std::log(x)); }, 1);
    CHECK(p_phi_estimate(lm).value == doctest::Approx(1.0).epsilon(2e-2));
    const PhiSpec q = PhiSpec::custom([](double x) { return x * x + x * x * x; }, 2);
    CHECK(p_phi_estimate(q).value == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("admissibility gate") {
    const AdmissibilityGate g = admissibility(0.79, 1.25);
    CHECK(g.threshold == doctest::Approx((std::sqrt(1 + 4 / 1.25) - 1) / 2).epsilon(1e-14));
    CHECK(g.passed);
    const AdmissibilityGate h = admissibility(0.3, 1.25);
    CHECK_FALSE(h.passed);
    CHECK(admissibility(0.3, 1.25).passed == h.passed);

    const SampledPath b = fbm_path({0.8, 4096, 1.0, 1});
    IsometrySpec s = cylinder_spec(poly({0.0, 1.0}), 1.25);
    s.holder_alpha = 0.3;
    CHECK(throws_kind([&] { isometry_check(s, b, badic_sequence(1.0, 2, 6, 10), 1.0); }, ErrorKind::admissibility_error));

    const SampledPath bm = fbm_path({0.5, 1 << 16, 1.0, 2});
    CHECK(holder_exponent_estimate(bm) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("isometry identities") {
    const SampledPath b = fbm_path({0.8, 1 << 14, 1.0, 3});
    const PartitionSequence seq = badic_sequence(1.0, 2, 8, 14);
    const IsometryReport id = isometry_check(cylinder_spec(poly({0.0, 1.0}), 1.25), b, seq, 1.0);
    for (std::size_t i = 0; i < id.levels.size(); ++i) CHECK(id.lhs[i] == id.rhs[i]);
    const IsometryReport two = isometry_check(cylinder_spec(poly({0.0, 2.0}), 1.25), b, seq, 1.0);
    for (std::size_t i = 0; i < two.levels.size(); ++i) {
        CHECK(std::abs(two.rhs[i] / two.lhs[i] - 1) < 1e-12);
        CHECK(two.lhs[i] == doctest::Approx(std::pow(2.0, 1.25) * id.lhs[i]).epsilon(1e-12));
    }
    CHECK(two.converged);
}

TEST_CASE("generalized Minkowski") {
    const double a[] = {3, 0}, b[] = {0, 4}, z[] = {0, 0};
    const MinkowskiReport r = generalized_minkowski_check(PhiSpec::power(2), a, b);
    CHECK(r.lhs == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(r.rhs == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(r.holds);
    const MinkowskiReport e = generalized_minkowski_check(PhiSpec::power(2.5), a, z);
    CHECK(e.lhs == doctest::Approx(e.rhs).epsilon(1e-9));
    CHECK(e.holds);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(4), y(4);
        for (double& v : x) v = u(rng);
        for (double& v : y) v = u(rng);
        CHECK(generalized_minkowski_check(PhiSpec::log_modulated(), x, y).holds);
    }
    const PhiSpec lm = PhiSpec::log_modulated();
    CHECK(phi_inverse(lm, lm(0.3)) == doctest::Approx(0.3).epsilon(1e-10));
}
