#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "indist/types.hpp"

namespace indist::stats {

/// Raw event counts per output occupation.
struct CountsRecord {
    std::map<ModeOccupation, long long> entries;

    long long total() const;
};

struct UncertainValue {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Probabilities count / N. Throws EmptyCounts when N < 1.
OutputDistribution normalize(const CountsRecord& counts);

/// Total variation distance, 1/2 sum |p_i - q_i| over the union of supports.
double tvd(const OutputDistribution& p, const OutputDistribution& q);

/// Any statistic computed from a distribution; may return several values.
using DistributionStatistic = std::function<std::vector<double>(const OutputDistribution&)>;

/// Poissonian Monte-Carlo propagation: every replicate redraws each count as
/// an independent Poisson variate with mean equal to the observed count
/// (total N fluctuates, as it does for coincidence events), renormalizes and
/// applies f. Returns the per-component sample mean and standard deviation.
/// Deterministic for a fixed seed, independent of thread count (replicates
/// carry derived seeds). A replicate whose resampled total is zero is
/// redrawn from the next derived seed.
std::vector<UncertainValue> propagate(const CountsRecord& counts, const DistributionStatistic& f,
                                      int replicates, std::uint64_t seed);

/// Reference implementation of propagate with a plain serial loop; results
/// are identical to the parallel kernel.
std::vector<UncertainValue> propagate_serial(const CountsRecord& counts,
                                             const DistributionStatistic& f, int replicates,
                                             std::uint64_t seed);

}  // namespace indist::stats
