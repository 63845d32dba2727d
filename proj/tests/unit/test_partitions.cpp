#include <cmath>
#include <vector>

#include "fraclab/cantor.hpp"
#include "fraclab/partitions.hpp"
#include "support.hpp"

using namespace fraclab;

namespace {

SampledPath line(std::size_t n) {
    std::vector<double> t = uniform_grid(1.0, n);
    return SampledPath(t, t);
}

}  // namespace

TEST_CASE("b-adic partitions") {
    const Partition p0 = badic(1.0, 0, 2);
    CHECK(p0.size() == 2);
    const Partition p2 = badic(1.0, 2, 2);
    const std::vector<double> want{0, .25, .5, .75, 1};
    REQUIRE(p2.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(p2.times()[i] == want[i]);
    const Partition p3 = badic(2.0, 3, 3);
    CHECK(p3.size() == 28);
    CHECK(p3.horizon() == 2.0);
    CHECK(partition_csv(p2) == "t\n0\n0.25\n0.5\n0.75\n1\n");
}

TEST_CASE("partition invariants") {
    CHECK_THROWS_AS(Partition({0.0}), Error);
    CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5, 1.0}), Error);
    CHECK_THROWS_AS(Partition({0.1, 1.0}), Error);
}

TEST_CASE("mesh") {
    CHECK(mesh(Partition({0.0, 1.0})) == 1.0);
    CHECK(mesh(badic(1.0, 2, 2)) == 0.25);
    CHECK(mesh(Partition({0.0, 0.1, 1.0})) == doctest::Approx(0.9));
}

TEST_CASE("osc") {
    const SampledPath flat({0.0, 1.0}, {3.0, 3.0});
    CHECK(osc(flat, badic(1.0, 3, 2)) == 0.0);
    CHECK(osc(line(8), Partition({0.0, 0.5, 1.0})) == doctest::Approx(0.5));

    const SampledPath w = fbm_path({0.5, 1 << 14, 1.0, 5});
    double lo = 1e300, hi = -1e300;
    for (double v : w.values()) lo = std::min(lo, v), hi = std::max(hi, v);
    double prev = 1e300;
    for (int n = 2; n <= 14; n += 2) {
        const double o = osc(w, badic(1.0, n, 2));
        CHECK(o <= hi - lo + 1e-15);
        prev = o;
    }
    CHECK(prev < 0.05 * (hi - lo));
}

TEST_CASE("value-grid partitions") {
    const ValueGridResult r = value_grid_partition(line(1), 0.25);
    const std::vector<double> want{0, .25, .5, .75, 1};
    REQUIRE(r.partition.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(r.partition.times()[i] == doctest::Approx(want[i]).epsilon(1e-14));
    CHECK_FALSE(r.degenerate);

    const SampledPath flat({0.0, 0.5, 1.0}, {2.0, 2.0, 2.0});
    const ValueGridResult d = value_grid_partition(flat, 0.1);
    CHECK(d.degenerate);
    CHECK(d.partition.size() == 2);

    CHECK(throws_kind([&] { value_grid_partition(flat, 0.0); }, ErrorKind::invalid_parameter));
}

TEST_CASE("increment mode moves by exactly delta") {
    const SampledPath w = fbm_path({0.5, 4096, 1.0, 9});
    const double delta = 0.05;
    const Partition pi = value_grid_partition(w, delta).partition;
    const std::vector<double> v = evaluate_sorted(w, pi.times());
    REQUIRE(v.size() > 10);
    for (std::size_t i = 0; i + 2 < v.size(); ++i) CHECK(std::abs(std::abs(v[i + 1] - v[i]) - delta) < 1e-12);
}

TEST_CASE("dyadic Lebesgue partition of the cantor-bump path") {
    const double p = 2.25;
    for (int n = 2; n <= 5; ++n) {
        const SampledPath x = cantor_bump_exact_samples(p, n + 2);
        const Partition pi = value_grid_partition(x, std::ldexp(1.0, -n), CrossingMode::grid).partition;
        long r = 0;
        for (int i = 1; i <= n; ++i) r += cantor_bump_count(p, i);
        const long want = (1L << n) * r;
        CHECK(std::labs(static_cast<long>(pi.intervals()) - want) <= 2);

        std::size_t streamed = 0;
        for_each_bump_lebesgue_step(p, n, [&](const Step&) { ++streamed; });
        CHECK(std::labs(static_cast<long>(streamed) - want) <= 2);
    }
}

TEST_CASE("partition sequences") {
    const PartitionSequence s = badic_sequence(1.0, 2, 3, 6);
    CHECK(s.size() == 4);
    CHECK(s.label(0) == 3);
    CHECK(s.mesh(3) == doctest::Approx(1.0 / 64));

    const SampledPath w = fbm_path({0.5, 1024, 1.0, 2});
    const double deltas[] = {0.2, 0.1, 0.05};
    const PartitionSequence g = grid_sequence(w, deltas);
    CHECK(g.size() == 3);
    CHECK(g[2].intervals() > g[0].intervals());

    const SampledPath r = restrict_to(w, g[1]);
    CHECK(r.size() == g[1].size());
}
