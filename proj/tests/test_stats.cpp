#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "indist/bounds.hpp"
#include "indist/rng.hpp"
#include "indist/simulator.hpp"
#include "indist/stats.hpp"

using namespace indist;
using namespace indist::stats;

namespace {

ModeOccupation occ(std::vector<int> v) { return ModeOccupation(std::move(v)); }

OutputDistribution dist_of(std::vector<std::pair<std::vector<int>, double>> entries) {
    OutputDistribution d;
    for (auto& [o, p] : entries) d.add(occ(std::move(o)), p);
    return d;
}

}  // namespace

TEST_CASE("normalize") {
    CountsRecord counts;
    counts.entries[occ({1, 0})] = 80;
    counts.entries[occ({0, 1})] = 20;
    const auto d = normalize(counts);
    CHECK(d.probability(occ({1, 0})) == doctest::Approx(0.8));
    CHECK(d.probability(occ({0, 1})) == doctest::Approx(0.2));

    CountsRecord single;
    single.entries[occ({2, 0})] = 1;
    CHECK(normalize(single).probability(occ({2, 0})) == doctest::Approx(1.0));

    CHECK_THROWS_AS(normalize(CountsRecord{}), EmptyCounts);
}

TEST_CASE("total variation distance") {
    const auto p = dist_of({{{1, 0}, 0.3}, {{0, 1}, 0.7}});
    const auto q = dist_of({{{1, 0}, 0.5}, {{0, 1}, 0.5}});
    CHECK(tvd(p, q) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(tvd(p, p) == 0.0);

    const auto disjoint_a = dist_of({{{1, 0}, 1.0}});
    const auto disjoint_b = dist_of({{{0, 1}, 1.0}});
    CHECK(tvd(disjoint_a, disjoint_b) == doctest::Approx(1.0));
}

TEST_CASE("tvd is a metric on random triples") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        OutputDistribution d[3];
        for (auto& dd : d) {
            double total = 0.0;
            for (int k = 0; k < 5; ++k) {
                const double w = rng.uniform();
                dd.add(occ({k, 0}), w);
                total += w;
            }
            for (auto& [o, p] : dd.p) p /= total;
        }
        const double ab = tvd(d[0], d[1]), ba = tvd(d[1], d[0]);
        const double bc = tvd(d[1], d[2]), ac = tvd(d[0], d[2]);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
        CHECK(ac <= ab + bc + 1e-14);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-14);
    }
}

TEST_CASE("poisson sampler moments") {
    for (double lambda : {0.5, 5.0, 40.0, 300.0, 1e6}) {
        Rng rng(7);
        const int n = 200000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(rng.poisson(lambda));
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        CHECK(std::abs(mean - lambda) < 6.0 * std::sqrt(lambda / n));
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
}

TEST_CASE("poisson sampler matches the exact pmf in the rejection regime") {
    // total variation between 2e5 draws at lambda = 12 (PTRS branch) and the
    // exact probabilities
    const double lambda = 12.0;
    Rng rng(21);
    const int n = 200000;
    std::map<long long, long long> hist;
    for (int i = 0; i < n; ++i) ++hist[rng.poisson(lambda)];
    double tv = 0.0;
    for (long long k = 0; k <= 60; ++k) {
        const double pmf =
            std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
        const double emp = hist.count(k) ? static_cast<double>(hist[k]) / n : 0.0;
        tv += std::abs(pmf - emp);
    }
    CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("propagate: constant statistic has zero sigma") {
    CountsRecord counts;
    counts.entries[occ({1, 0})] = 500;
    counts.entries[occ({0, 1})] = 500;
    const auto out = propagate(
        counts, [](const OutputDistribution&) { return std::vector<double>{42.0}; }, 200, 1);
    REQUIRE(out.size() == 1);
    CHECK(out[0].mean == doctest::Approx(42.0));
    CHECK(out[0].sigma == 0.0);
}

TEST_CASE("propagate: single-probability sigma near the analytic value") {
    CountsRecord counts;
    counts.entries[occ({1, 0})] = 1000000;
    counts.entries[occ({0, 1})] = 1000000;
    const auto stat = [](const OutputDistribution& d) {
        return std::vector<double>{d.probability(ModeOccupation({1, 0}))};
    };
    const auto out = propagate(counts, stat, 1000, 5);
    REQUIRE(out.size() == 1);
    // p(1-p)(1/n1 + 1/n2) with p = 1/2: sigma = 0.25 sqrt(2e-6) = 3.54e-4
    const double analytic = 0.25 * std::sqrt(2e-6);
    CHECK(out[0].mean == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(out[0].sigma == doctest::Approx(analytic).epsilon(0.2));
}

TEST_CASE("propagate: sigma scales as 1 / sqrt(N)") {
    const auto stat = [](const OutputDistribution& d) {
        return std::vector<double>{d.probability(ModeOccupation({1, 0}))};
    };
    double ratio_sum = 0.0;
    const int repeats = 30;
    for (int rep = 0; rep < repeats; ++rep) {
        CountsRecord small, large;
        small.entries[occ({1, 0})] = 400;
        small.entries[occ({0, 1})] = 600;
        large.entries[occ({1, 0})] = 1600;
        large.entries[occ({0, 1})] = 2400;
        const auto s = propagate(small, stat, 300, 1000 + rep);
        const auto l = propagate(large, stat, 300, 2000 + rep);
        ratio_sum += l[0].sigma / s[0].sigma;
    }
    const double mean_ratio = ratio_sum / repeats;
    CHECK(std::abs(mean_ratio - 0.5) < 0.075);  // within 15% of the halving
}

TEST_CASE("propagate: serial and parallel are identical") {
    CountsRecord counts;
    counts.entries[occ({1, 0})] = 123;
    counts.entries[occ({0, 1})] = 456;
    counts.entries[occ({1, 1})] = 789;
    const auto stat = [](const OutputDistribution& d) {
        std::vector<double> out;
        for (const auto& [o, p] : d.p) out.push_back(p);
        out.push_back(d.total());
        return out;
    };
    const auto a = propagate(counts, stat, 500, 9);
    const auto b = propagate_serial(counts, stat, 500, 9);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].mean == b[k].mean);
        CHECK(a[k].sigma == b[k].sigma);
    }
}

TEST_CASE("propagate: c1 bound sigmas at the reference count scale") {
    // 1e4 events of a mixture whose estimated chain is (0.826, 0.640, 0.872):
    // the propagated endpoint sigmas come out at the 0.01 scale of the
    // reference table (factor-2 window)
    const auto spec = sim::six_mode_ideal();
    const auto mix = sim::build_rho_source(0.826, 0.640, 0.872);
    const auto dist = sim::evolve_mixture(spec, ModeOccupation({1, 1, 0, 0, 1, 1}), mix);
    const sim::OutputClassifier classifier(spec);
    const auto post = sim::postselect(dist, classifier).retained;
    CountsRecord counts;
    for (const auto& [o, p] : post.p) {
        const long long c = static_cast<long long>(p * 10000 + 0.5);
        if (c > 0) counts.entries[o] = c;
    }
    const auto f = [](const OutputDistribution& d) {
        const OverlapGraph g = sim::estimate_overlaps_from_distribution(d);
        const auto c1 = bounds::c1_bounds(g);
        return std::vector<double>{c1.value.lo, c1.value.hi};
    };
    const auto out = propagate(counts, f, 1000, 7);
    REQUIRE(out.size() == 2);
    CHECK(out[0].mean == doctest::Approx(0.338).epsilon(0.05));
    CHECK(out[1].mean == doctest::Approx(0.640).epsilon(0.05));
    CHECK(out[0].sigma > 0.005);
    CHECK(out[0].sigma < 0.02);
    CHECK(out[1].sigma > 0.005);
    CHECK(out[1].sigma < 0.02);
}

TEST_CASE("propagate: deterministic under reseeding") {
    CountsRecord counts;
    counts.entries[occ({1, 0})] = 1000;
    counts.entries[occ({0, 1})] = 500;
    const auto stat = [](const OutputDistribution& d) {
        return std::vector<double>{d.probability(ModeOccupation({1, 0}))};
    };
    const auto a = propagate(counts, stat, 100, 77);
    const auto b = propagate(counts, stat, 100, 77);
    CHECK(a[0].sigma == b[0].sigma);
    const auto c = propagate(counts, stat, 100, 78);
    CHECK(a[0].sigma != c[0].sigma);  // different seed, different draw
}
