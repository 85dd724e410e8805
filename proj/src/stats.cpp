#include "indist/stats.hpp"

#include <cmath>

#include "indist/rng.hpp"

namespace indist::stats {

long long CountsRecord::total() const {
    long long n = 0;
    for (const auto& [occ, count] : entries) n += count;
    return n;
}

OutputDistribution normalize(const CountsRecord& counts) {
    const long long n = counts.total();
    if (n < 1) throw EmptyCounts("counts record holds no events");
    OutputDistribution out;
    for (const auto& [occ, count] : counts.entries)
        if (count > 0) out.p[occ] = static_cast<double>(count) / static_cast<double>(n);
    return out;
}

double tvd(const OutputDistribution& p, const OutputDistribution& q) {
    double acc = 0.0;
    for (const auto& [occ, prob] : p.p) acc += std::abs(prob - q.probability(occ));
    for (const auto& [occ, prob] : q.p)
        if (!p.p.count(occ)) acc += std::abs(prob);
    return 0.5 * acc;
}

namespace {

std::vector<double> one_replicate(const CountsRecord& counts, const DistributionStatistic& f,
                                  int replicates, int rep, std::uint64_t seed) {
    for (int attempt = 0;; ++attempt) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(rep) +
                                        static_cast<std::uint64_t>(replicates) *
                                            static_cast<std::uint64_t>(attempt));
        CountsRecord resampled;
        long long total = 0;
        for (const auto& [occ, count] : counts.entries) {
            const long long draw = rng.poisson(static_cast<double>(count));
            if (draw > 0) resampled.entries[occ] = draw;
            total += draw;
        }
        if (total == 0) continue;  // degenerate draw, try the next stream
        return f(normalize(resampled));
    }
}

std::vector<UncertainValue> propagate_impl(const CountsRecord& counts,
                                           const DistributionStatistic& f, int replicates,
                                           std::uint64_t seed, bool parallel) {
    if (replicates < 1) throw Error("propagate needs at least one replicate");
    if (counts.total() < 1) throw EmptyCounts("counts record holds no events");

    // probe the statistic's dimension once on the unperturbed distribution
    const size_t dim = f(normalize(counts)).size();
    std::vector<std::vector<double>> results(replicates);

#pragma omp parallel for schedule(static) if (parallel)
    for (int rep = 0; rep < replicates; ++rep)
        results[rep] = one_replicate(counts, f, replicates, rep, seed);

    std::vector<UncertainValue> out(dim);
    for (size_t k = 0; k < dim; ++k) {
        double sum = 0.0;
        for (const auto& r : results) sum += r.at(k);
        const double mean = sum / replicates;
        double var = 0.0;
        for (const auto& r : results) {
            const double d = r[k] - mean;
            var += d * d;
        }
        var = replicates > 1 ? var / (replicates - 1) : 0.0;
        out[k] = {mean, std::sqrt(var)};
    }
    return out;
}

}  // namespace

std::vector<UncertainValue> propagate(const CountsRecord& counts, const DistributionStatistic& f,
                                      int replicates, std::uint64_t seed) {
    return propagate_impl(counts, f, replicates, seed, true);
}

std::vector<UncertainValue> propagate_serial(const CountsRecord& counts,
                                             const DistributionStatistic& f, int replicates,
                                             std::uint64_t seed) {
    return propagate_impl(counts, f, replicates, seed, false);
}

}  // namespace indist::stats
