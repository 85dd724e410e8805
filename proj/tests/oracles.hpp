#pragma once

// Test-only independent oracles. The path-sum evolution enumerates every
// single-photon routing explicitly and never touches the permanent code
// under test; the naive permanent iterates permutations.

#include <algorithm>
#include <map>
#include <vector>

#include "indist/matrix.hpp"
#include "indist/simulator.hpp"
#include "indist/types.hpp"

namespace indist::test {

inline double permanent_naive(const Mat& m) {
    const int n = m.rows();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double total = 0.0;
    do {
        double prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline double factorial_d(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Feynman path sum for one coherent block: amplitudes accumulate over all
/// assignments of block photons to output modes; probabilities carry the
/// bosonic normalization |S(t)|^2 prod t_j! / prod s_i!.
inline std::map<ModeOccupation, double> path_sum_block(const Mat& u,
                                                       std::vector<int> in_modes) {
    const int modes = u.rows();
    const int k = static_cast<int>(in_modes.size());
    std::sort(in_modes.begin(), in_modes.end());

    std::map<ModeOccupation, double> amp_sum;
    std::vector<int> occ(modes, 0);
    std::vector<int> route(k, 0);
    for (;;) {
        double amp = 1.0;
        std::fill(occ.begin(), occ.end(), 0);
        for (int p = 0; p < k; ++p) {
            amp *= u(route[p], in_modes[p]);
            ++occ[route[p]];
        }
        if (amp != 0.0) amp_sum[ModeOccupation(occ)] += amp;
        int pos = k - 1;
        while (pos >= 0 && route[pos] == modes - 1) route[pos--] = 0;
        if (pos < 0) break;
        ++route[pos];
    }

    double in_fact = 1.0;
    for (int i = 0; i < k;) {
        int j = i;
        while (j < k && in_modes[j] == in_modes[i]) ++j;
        in_fact *= factorial_d(j - i);
        i = j;
    }

    std::map<ModeOccupation, double> dist;
    for (const auto& [t, s] : amp_sum) {
        double t_fact = 1.0;
        for (int n : t.n) t_fact *= factorial_d(n);
        const double p = s * s * t_fact / in_fact;
        if (p > 0.0) dist[t] = p;
    }
    return dist;
}

/// Same photon-placement policy as the simulator: a partition block turns
/// into the input modes of its photons, duplicated per the occupation.
inline std::vector<std::vector<int>> placement_blocks(const ModeOccupation& input,
                                                      const Partition& partition,
                                                      const sim::SourceSpec& source) {
    std::vector<std::vector<int>> blocks;
    for (const auto& block : partition.blocks()) {
        std::vector<int> modes;
        for (PhotonLabel label : block) {
            const auto it = source.injected_modes.find(label);
            if (it == source.injected_modes.end()) continue;
            for (int rep = 0; rep < input.n[it->second]; ++rep) modes.push_back(it->second);
        }
        if (!modes.empty()) blocks.push_back(std::move(modes));
    }
    return blocks;
}

inline OutputDistribution path_sum_partition(const sim::InterferometerSpec& spec,
                                             const ModeOccupation& input,
                                             const Partition& partition,
                                             const sim::SourceSpec& source = {}) {
    const Mat u = sim::transfer_matrix(spec);
    std::map<ModeOccupation, double> acc;
    acc[ModeOccupation(std::vector<int>(spec.mode_count, 0))] = 1.0;
    for (const auto& block : placement_blocks(input, partition, source))
        acc = sim::convolve(acc, path_sum_block(u, block));
    OutputDistribution out;
    out.p = std::move(acc);
    return out;
}

inline double l1_distance(const OutputDistribution& a, const OutputDistribution& b) {
    double acc = 0.0;
    for (const auto& [occ, p] : a.p) acc += std::abs(p - b.probability(occ));
    for (const auto& [occ, p] : b.p)
        if (!a.p.count(occ)) acc += std::abs(p);
    return acc;
}

}  // namespace indist::test
