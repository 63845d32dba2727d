#include <cmath>
#include <vector>

#include "fraclab/cantor.hpp"
#include "fraclab/follmer.hpp"
#include "fraclab/registry.hpp"
#include "fraclab/variation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fraclab;

namespace {

SmoothFn power_fn(double k, double p) { return function_registry("abs-power", {{"k", k}, {"p", p}}); }
SmoothFn poly(std::vector<double> c) { return function_registry("polynomial", {{"coeffs", c}}); }
SmoothFn sine() { return function_registry("sin", nlohmann::json::object()); }

}  // namespace

TEST_CASE("compensated sums, first order") {
    const SampledPath w = fbm_path({0.6, 2048, 1.0, 3});
    const Partition pi = badic(1.0, 9, 2);
    const SmoothFn s = sine();
    // m = 1: left Riemann sum of f' dS
    double riemann = 0;
    const std::vector<double> v = evaluate_sorted(w, pi.times());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) riemann += std::cos(v[i]) * (v[i + 1] - v[i]);
    CHECK(compensated_sum(s, w, pi, FracOrder(1.5), 1.0) == doctest::Approx(riemann).epsilon(1e-12));
}

TEST_CASE("affine f telescopes") {
    const SampledPath w = fbm_path({0.4, 4096, 1.0, 8});
    const SmoothFn f = poly({0.7, -1.9});
    const CompensatedResult r = ito_check(f, w, badic_sequence(1.0, 2, 4, 12), FracOrder(2.5), 1.0);
    for (double res : r.residuals) CHECK(std::abs(res) < 1e-12);
    CHECK(r.lhs == doctest::Approx(-1.9 * w.values().back()).epsilon(1e-12));
}

TEST_CASE("cantor first-order part") {
    for (double p : {2.25, 2.5}) {
        for (int n : {3, 8, 12}) {
            const SmoothFn f = power_fn(0.0, p);
            CompensatedAccumulator acc(f, 1, 1.0, 0.0);
            for_each_cantor_grid_step(p, n, acc);
            const double k = static_cast<double>(oracle::cantor_levels(p, n));
            CHECK(acc.value() == doctest::Approx(-n * p / (2 * k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("smooth Ito check on fBm") {
    const SampledPath w = fbm_path({0.4, 1 << 16, 1.0, 99});
    const SmoothFn s = sine();
    const CompensatedResult r = ito_check(s, w, badic_sequence(1.0, 2, 10, 16), FracOrder(2.5), 1.0, {}, 2);
    CHECK(std::abs(r.residuals.back()) < 1e-2 * (1 + std::abs(std::sin(w.values().back()))));
    CHECK(r.converged);
    CHECK(r.gaps.size() == r.levels.size() - 1);
}

TEST_CASE("cantor-bump remainder does not vanish") {
    const double p = 2.25;
    const SmoothFn f = power_fn(0.0, p);
    std::vector<int> levels;
    std::vector<double> sums;
    for (int n = 6; n <= 12; ++n) {
        levels.push_back(n);
        sums.push_back(lattice_compensated_sum(f, bump_lebesgue_step_counts(p, n), 2));
    }
    const CompensatedResult r = make_compensated_result(levels, sums, 0.0, 0.0, VerdictRule{2e-2, 4});
    CHECK_FALSE(r.converged);
    CHECK(sums.back() < -0.2);
}

TEST_CASE("time-dependent check") {
    const SampledPath w = fbm_path({0.4, 1 << 14, 1.0, 12});
    const PartitionSequence seq = badic_sequence(1.0, 2, 8, 14);
    const FracOrder P(2.5);

    const SmoothFn id = poly({0.0, 1.0});
    const CompensatedResult a = ito_check(id, w, seq, P, 1.0);
    const CompensatedResult b = ito_check_time(TimeBundle::from_spatial(id, 2), w, seq, P, 1.0);
    CHECK(a.sums == b.sums);

    TimeBundle clock;
    clock.f = [](double t, double) { return t; };
    clock.dt = [](double, double) { return 1.0; };
    clock.dx = {[](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
    const CompensatedResult c = ito_check_time(clock, w, seq, P, 0.8);
    for (double r : c.residuals) CHECK(std::abs(r) < 1e-12);

    TimeBundle tx;
    tx.f = [](double t, double x) { return t * x * x; };
    tx.dt = [](double, double x) { return x * x; };
    tx.dx = {[](double t, double x) { return 2 * t * x; }, [](double t, double) { return 2 * t; }};
    const SampledPath big = fbm_path({0.4, 1 << 16, 1.0, 13});
    const CompensatedResult d = ito_check_time(tx, big, badic_sequence(1.0, 2, 10, 16), P, 1.0);
    CHECK(std::abs(d.residuals.back()) < 1e-2);
}

TEST_CASE("functional check") {
    const SampledPath w = fbm_path({0.4, 1 << 14, 1.0, 40});
    const PartitionSequence seq = badic_sequence(1.0, 2, 8, 14);
    const FracOrder P(2.5);
    const SmoothFn s = sine();
    const CompensatedResult base = ito_check(s, w, seq, P, 0.7);
    const CompensatedResult cyl = ito_check_functional(FunctionalBundle::cylinder(s, 3), w, seq, P, 0.7);
    for (std::size_t i = 0; i < base.sums.size(); ++i) CHECK(std::abs(cyl.sums[i] - base.sums[i]) < 1e-9);

    // (int_0^t w) w(t), vertical derivatives by bump differences
    FunctionalBundle prod;
    prod.F = [](double, const PathPrefix& x) { return x.integral() * x.value(); };
    const SampledPath big = fbm_path({0.4, 1 << 16, 1.0, 41});
    const CompensatedResult r = ito_check_functional(prod, big, badic_sequence(1.0, 2, 10, 16), P, 1.0);
    CHECK(std::abs(r.residuals.back()) < 2e-2);

    // bump differences reproduce a known vertical derivative
    const PrefixKnots knots(PrefixKnots::Shape::linear, {0.0, 0.5, 1.0}, {0.0, 0.4, -0.2});
    const PathPrefix px(knots, 0.75, 0.75);
    const FunctionalBundle cube{[](double, const PathPrefix& x) { return std::pow(x.value(), 3); }};
    const double want = 3 * std::pow(px.value(), 2);
    CHECK(vertical_derivative(cube, 1, px, 1e-3) == doctest::Approx(want).epsilon(1e-6));
    CHECK(px.value() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(px.integral() == doctest::Approx(0.1 + 0.25 * (0.4 + 0.1) / 2).epsilon(1e-14));
}

TEST_CASE("multi-dimensional check") {
    const SampledPath x = fbm_path({0.4, 4096, 1.0, 50});
    const SampledPath y = fbm_path({0.4, 4096, 1.0, 51});
    const SampledPath xy[] = {x, y};
    const PartitionSequence seq = badic_sequence(1.0, 2, 6, 12);
    const FracOrder P(2.5);

    TensorBundle sum;
    sum.dim = 2;
    sum.f = [](std::span<const double> v) { return v[0] + v[1]; };
    sum.tensors = {[](std::span<const double>) { return std::vector<double>{1, 1}; },
                   [](std::span<const double>) { return std::vector<double>(4, 0.0); }};
    const CompensatedResult r = ito_check_multi(sum, xy, seq, P, 1.0);
    for (double res : r.residuals) CHECK(std::abs(res) < 1e-13);

    const SmoothFn s = sine();
    const SampledPath one[] = {x};
    CHECK(ito_check_multi(TensorBundle::from_scalar(s, 2), one, seq, P, 1.0).sums == ito_check(s, x, seq, P, 1.0).sums);

    TensorBundle skew = sum;
    skew.tensors[1] = [](std::span<const double>) { return std::vector<double>{0, 1, 0, 0}; };
    const double at[] = {0.1, 0.2};
    CHECK(throws_kind([&] { check_tensor_symmetry(skew, at); }, ErrorKind::invalid_bundle));
    CHECK(throws_kind([&] { ito_check_multi(skew, xy, seq, P, 1.0); }, ErrorKind::invalid_bundle));
}

TEST_CASE("Young bound") {
    const SampledPath x = fbm_path({0.4, 4096, 1.0, 60});
    std::vector<double> neg(x.values().begin(), x.values().end());
    for (double& v : neg) v = -v;
    const SampledPath mx(std::vector<double>(x.times().begin(), x.times().end()), neg);
    const PartitionSequence seq = badic_sequence(1.0, 2, 6, 12);

    const SampledPath one[] = {x};
    const double a1[] = {2.5};
    const YoungReport r1 = young_bound_check(one, a1, seq);
    CHECK(r1.all_hold);
    // both sign patterns reproduce the single term family
    for (std::size_t i = 0; i < r1.lhs.size(); ++i) CHECK(2 * r1.lhs[i] == doctest::Approx(r1.rhs[i]).epsilon(1e-12));

    const SampledPath anti[] = {x, mx};
    const double a2[] = {1.25, 1.25};
    const YoungReport r2 = young_bound_check(anti, a2, seq);
    CHECK(r2.all_hold);
    for (std::size_t i = 0; i < seq.size(); ++i)
        CHECK(r2.lhs[i] == doctest::Approx(pth_variation_partial(x, seq[i], 2.5, 1.0)).epsilon(1e-12));
}

TEST_CASE("remainder kernel") {
    const double p = 2.5;
    const FracOrder P(p);
    const SmoothFn f = power_fn(0.0, p);
    CHECK(remainder_kernel(f, P, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
    const KernelValue same = remainder_kernel(f, P, 1.0, 1.0);
    CHECK(same.value == 0.0);
    CHECK_FALSE(same.singular);
    CHECK(remainder_kernel(f, P, 0.0, 0.0).singular);
    for (auto [a, b] : {std::pair{0.3, -1.1}, std::pair{-2.0, 0.5}, std::pair{0.2, 0.9}})
        CHECK(remainder_kernel(poly({1, -2, 3}), P, a, b).value == doctest::Approx(0.0).epsilon(1e-12));
    for (double k : {0.1, 3.0, 17.0})
        for (auto [a, b] : {std::pair{0.3, -1.1}, std::pair{-0.4, 0.5}, std::pair{0.2, 0.9}})
            CHECK(std::abs(remainder_kernel(f, P, k * a, k * b).value - remainder_kernel(f, P, a, b).value) < 1e-9);
}

TEST_CASE("per-level remainder identity") {
    const double p = 2.5;
    const FracOrder P(p);
    const SmoothFn f = power_fn(0.3, p);
    const SampledPath w = fbm_path({0.4, 2048, 1.0, 70});
    for (int n : {4, 7, 11}) {
        const Partition pi = badic(1.0, n, 2);
        CompensatedSum rem;
        for_each_step(w, pi, [&](const Step& st) {
            rem += remainder_kernel(f, P, st.s0, st.s1).value * std::pow(std::abs(st.s1 - st.s0), p);
        });
        const double lhs = f(w.values().back()) - f(w.values()[0]);
        CHECK(std::abs(lhs - compensated_sum(f, w, pi, P, 1.0) - rem.value()) < 1e-9);
    }
}

TEST_CASE("quotient measures") {
    const SampledPath flat({0.0, 1.0}, {0.0, 0.0});
    const AtomMeasure e = quotient_measure(flat, badic(1.0, 3, 2), 2.5);
    CHECK(e.atoms.empty());
    CHECK(e.dropped == 8);

    const SampledPath w = fbm_path({0.4, 4096, 1.0, 71});
    for (int n : {5, 9, 12}) {
        const Partition pi = badic(1.0, n, 2);
        CHECK(std::abs(quotient_measure(w, pi, 2.5).total() - pth_variation_partial(w, pi, 2.5, 1.0)) < 1e-12);
    }

    // equal increments delta of a monotone path: atom k sits at angle atan((k+1)/k)
    const double d = 0.1;
    const SampledPath up(uniform_grid(1.0, 10), [] {
        std::vector<double> v;
        for (int k = 0; k <= 10; ++k) v.push_back(k * 0.1);
        return v;
    }());
    const AtomMeasure m = quotient_measure(up, badic(1.0, 1, 10), 2.0);
    REQUIRE(m.atoms.size() == 10);
    for (int k = 0; k < 10; ++k) {
        CHECK(m.atoms[k].x == doctest::Approx(std::atan2(k + 1.0, k)).epsilon(1e-12));
        CHECK(m.atoms[k].w == doctest::Approx(d * d).epsilon(1e-12));
    }

    CHECK(remainder_integral(m, [](double) { return 0.0; }, 1.0) == 0.0);
    CHECK(remainder_integral(m, [](double) { return 1.0; }, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(remainder_integral(m, [](double) { return 1.0; }, 0.5) == doctest::Approx(0.05).epsilon(1e-12));
    for (double t : {0.2, 0.5, 0.9})
        CHECK(remainder_integral(m, [](double) { return 1.0; }, t) ==
              doctest::Approx(pth_variation_partial(up, badic(1.0, 1, 10), 2.0, t)).epsilon(1e-12));
    CHECK(throws_kind([&] { remainder_integral(m, [](double) { return std::nan(""); }, 1.0); }, ErrorKind::invalid_input));
}

TEST_CASE("limit atoms of the cantor-bump path") {
    const double p = 2.25;
    const double c = (std::pow(2.0, p - 1) - 1) / (std::pow(2.0, p) - 1);
    const std::vector<AngleWeight> a = nonzero_atom_weights(p, 3);
    REQUIRE(a.size() == 8);
    // k = 1: both angles of the symmetric pair
    CHECK(a[2].angle == doctest::Approx(std::atan(2.0)).epsilon(1e-14));
    CHECK(a[3].angle == doctest::Approx(std::atan(0.5)).epsilon(1e-14));
    CHECK(a[2].weight == doctest::Approx(std::pow(2.0, -p) * c).epsilon(1e-14));
    CHECK(a[3].weight == a[2].weight);
    CHECK(a[6].weight == a[4].weight);

    double prev = 0;
    for (int K : {1, 15, 255, 4095}) {
        double total = 0;
        for (const AngleWeight& x : nonzero_atom_weights(p, K)) total += x.weight;
        CHECK(total > prev);
        CHECK(total <= 1.0 + 1e-12);
        prev = total;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(throws_kind([] { nonzero_atom_weights(2.25, 0); }, ErrorKind::invalid_parameter));

    // the lattice measure puts its level-n masses on exactly these angles
    const AtomMeasure lm = lattice_quotient_measure(bump_lebesgue_step_counts(p, 10), p);
    CHECK_FALSE(lm.time_resolved);
    CHECK(throws_kind([&] { remainder_integral(lm, [](double) { return 1.0; }, 0.5); }, ErrorKind::invalid_input));
    const std::vector<AngleWeight> ref = nonzero_atom_weights(p, 1024);
    for (const Atom& at : lm.atoms) {
        bool found = false;
        for (const AngleWeight& x : ref) found = found || std::abs(x.angle - at.x) < 1e-12;
        CHECK(found);
    }
}
