// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Not part of the test suite; build target `indist-bench`.

#include <chrono>
#include <cstdio>

#include "indist/bounds.hpp"
#include "indist/parallel.hpp"
#include "indist/simulator.hpp"
#include "indist/stats.hpp"
#include "indist/surfaces.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_seconds(F&& f) {
    const auto t0 = Clock::now();
    f();
    const auto t1 = Clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-32s %9.3f s %9.3f s %6.2fx\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main() {
    indist::apply_thread_cap_from_env();
    using namespace indist;

    std::printf("threads: %d\n", max_threads());
    std::printf("%-32s %11s %11s %7s\n", "kernel", "serial", "openmp", "speedup");

    {
        const OverlapGraph g = OverlapGraph::chain_abcd(0.826, 0.640, 0.872);
        constexpr long long kTrials = 100000;
        bounds::OracleReport a, b;
        const double ts = time_seconds(
            [&] { a = bounds::classical_oracle_check_serial(g, kTrials, 7); });
        const double tp =
            time_seconds([&] { b = bounds::classical_oracle_check(g, kTrials, 7); });
        report("classical oracle (1e5)", ts, tp);
        if (a.violations != b.violations || a.matched != b.matched)
            std::printf("  MISMATCH between serial and parallel results\n");
    }
    {
        constexpr long long kTrials = 100000;
        bounds::OracleReport a, b;
        const double ts =
            time_seconds([&] { a = bounds::product_oracle_check_serial(4, kTrials, 7); });
        const double tp = time_seconds([&] { b = bounds::product_oracle_check(4, kTrials, 7); });
        report("product oracle dim 4 (1e5)", ts, tp);
        if (a.violations != b.violations)
            std::printf("  MISMATCH between serial and parallel results\n");
    }
    {
        surf::DelayAxes axes;
        axes.visibility = {0.944, 0.835, 0.915};
        surf::VolumeResult a, b;
        const double ts = time_seconds([&] {
            a = surf::nontrivial_region_volume_serial(axes, surf::VolumeMethod::grid, 192);
        });
        const double tp = time_seconds(
            [&] { b = surf::nontrivial_region_volume(axes, surf::VolumeMethod::grid, 192); });
        report("volume grid 192^3", ts, tp);
        if (a.volume != b.volume) std::printf("  MISMATCH between serial and parallel results\n");
    }
    {
        surf::DelayAxes axes;
        axes.visibility = {0.944, 0.835, 0.915};
        surf::VolumeResult a, b;
        const double ts = time_seconds([&] {
            a = surf::nontrivial_region_volume_serial(axes, surf::VolumeMethod::monte_carlo,
                                                      10000000, 11);
        });
        const double tp = time_seconds([&] {
            b = surf::nontrivial_region_volume(axes, surf::VolumeMethod::monte_carlo, 10000000,
                                               11);
        });
        report("volume monte-carlo 1e7", ts, tp);
        if (a.volume != b.volume) std::printf("  MISMATCH between serial and parallel results\n");
    }
    {
        // propagation through the overlap estimator on a simulated data set
        const auto dist = sim::evolve_mixture(sim::six_mode_ideal(),
                                              ModeOccupation({1, 1, 0, 0, 1, 1}),
                                              sim::build_rho_source(0.944, 0.835, 0.915));
        const sim::OutputClassifier classifier(sim::six_mode_ideal());
        const auto post = sim::postselect(dist, classifier).retained;
        stats::CountsRecord counts;
        for (const auto& [occ, p] : post.p)
            counts.entries[occ] = static_cast<long long>(p * 1e6);
        const auto statistic = [](const OutputDistribution& d) {
            const OverlapGraph g = sim::estimate_overlaps_from_distribution(d);
            std::vector<double> out;
            for (const auto& [key, edge] : g.edges()) out.push_back(edge.value);
            return out;
        };
        std::vector<stats::UncertainValue> a, b;
        const double ts =
            time_seconds([&] { a = stats::propagate_serial(counts, statistic, 2000, 3); });
        const double tp = time_seconds([&] { b = stats::propagate(counts, statistic, 2000, 3); });
        report("poisson propagate (2000 reps)", ts, tp);
        if (a.size() != b.size() || a[0].sigma != b[0].sigma)
            std::printf("  MISMATCH between serial and parallel results\n");
    }
    return 0;
}
