#include "indist/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>

#include "indist/rng.hpp"

namespace indist::bounds {

namespace {

struct ChainOverlaps {
    double ab, bc, cd;
    double s_ab, s_bc, s_cd;
};

ChainOverlaps chain_of(const OverlapGraph& g) {
    const EdgeValue& ab = g.edge('A', 'B');
    const EdgeValue& bc = g.edge('B', 'C');
    const EdgeValue& cd = g.edge('C', 'D');
    return {ab.value, bc.value, cd.value, ab.sigma, bc.sigma, cd.sigma};
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical bounds
// ---------------------------------------------------------------------------

ClampedInterval c1_bounds(const OverlapGraph& g) {
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    const double raw_lo = ab + bc + cd - 2.0;
    const double raw_hi = std::min({ab, bc, cd});
    return ClampedInterval::from_raw(raw_lo, raw_hi);
}

Interval chain_bounds(double r_xy, double r_yz) {
    const double lo = std::max(0.0, r_xy + r_yz - 1.0);
    const double hi = 1.0 - std::abs(r_xy - r_yz);
    return {lo, std::max(lo, hi)};
}

ClampedInterval classical_r_ad_bounds(const OverlapGraph& g) {
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    const double raw_lo = ab + bc + cd - 2.0;
    const Interval bd = chain_bounds(bc, cd);
    double hi;
    if (ab < bd.lo)      hi = 1.0 - (bd.lo - ab);
    else if (ab > bd.hi) hi = 1.0 - (ab - bd.hi);
    else                 hi = 1.0;
    return ClampedInterval::from_raw(raw_lo, hi);
}

double classical_r_ad_upper_min_form(double r_ab, double r_bc, double r_cd) {
    const double raw = 2.0 + std::min({r_ab - r_bc - r_cd, r_bc - r_ab - r_cd,
                                       r_cd - r_ab - r_bc});
    return clamp01(raw).value;
}

ClassicalBoundsReport classical_bounds(const OverlapGraph& g) {
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    ClassicalBoundsReport out;
    out.c1 = c1_bounds(g);
    const Interval ac = chain_bounds(ab, bc);
    const Interval bd = chain_bounds(bc, cd);
    out.r_ac = ClampedInterval::from_raw(ac.lo, ac.hi);
    out.r_bd = ClampedInterval::from_raw(bd.lo, bd.hi);
    out.r_ad = classical_r_ad_bounds(g);
    out.model_inconsistent = out.c1.inconsistent();
    return out;
}

// ---------------------------------------------------------------------------
// Product bounds
// ---------------------------------------------------------------------------

namespace {

double product_upper(double r1, double r2) {
    const double v = std::sqrt(r1 * r2) + std::sqrt((1.0 - r1) * (1.0 - r2));
    return std::min(1.0, v * v);
}

double product_lower_formula(double r1, double r2) {
    const double v = std::sqrt(r1 * r2) - std::sqrt((1.0 - r1) * (1.0 - r2));
    return v * v;
}

// Pointwise-valid lower bound given the dimension hint.
double product_lower(double r1, double r2, DimensionHint hint) {
    if (hint == DimensionHint::qubit || r1 + r2 > 1.0) return product_lower_formula(r1, r2);
    return 0.0;
}

// Maximize a unimodal-ish scalar function on [lo, hi]: coarse grid of 1e4
// points, then golden-section refinement of the best bracket to 1e-10.
template <typename F>
double grid_golden_max(F f, double lo, double hi) {
    if (hi <= lo) return f(lo);
    constexpr int kGrid = 10000;
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i <= kGrid; ++i) {
        const double t = lo + (hi - lo) * i / kGrid;
        const double v = f(t);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
    double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({best_val, f1, f2});
}

template <typename F>
double grid_golden_min(F f, double lo, double hi) {
    return -grid_golden_max([&](double t) { return -f(t); }, lo, hi);
}

// One route of the two-step r_AD inference: the final chain pairs `known`
// with an intermediate overlap confined to `mid`.
ProductRadBounds rad_via(double known, Interval mid, DimensionHint hint) {
    auto ub = [&](double t) { return product_upper(known, t); };
    auto lb = [&](double t) { return product_lower(known, t, hint); };
    ProductRadBounds out;
    out.sound.hi = grid_golden_max(ub, mid.lo, mid.hi);
    out.sound.lo = grid_golden_min(lb, mid.lo, mid.hi);
    out.endpoint_rule.hi = std::max(ub(mid.lo), ub(mid.hi));
    out.endpoint_rule.lo = lb(mid.lo);
    return out;
}

Interval intersect(Interval a, Interval b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

}  // namespace

Interval product_chain_bounds(double r1, double r2, DimensionHint hint) {
    if (!(r1 >= 0.0 && r1 <= 1.0 && r2 >= 0.0 && r2 <= 1.0))
        throw OutOfRangeOverlap("product chain bounds need overlaps in [0, 1]");
    return {product_lower(r1, r2, hint), product_upper(r1, r2)};
}

ProductRadBounds product_r_ad_bounds(const OverlapGraph& g, DimensionHint hint) {
    g.validate();  // the chain formulas take square roots of 1 - r
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    const Interval bd = product_chain_bounds(bc, cd, hint);
    const Interval ac = product_chain_bounds(ab, bc, hint);
    const ProductRadBounds via_bd = rad_via(ab, bd, hint);
    const ProductRadBounds via_ac = rad_via(cd, ac, hint);
    return {intersect(via_bd.sound, via_ac.sound),
            intersect(via_bd.endpoint_rule, via_ac.endpoint_rule)};
}

ProductBoundsReport product_bounds(const OverlapGraph& g, DimensionHint hint) {
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    ProductBoundsReport out;
    out.r_ac = product_chain_bounds(ab, bc, hint);
    out.r_bd = product_chain_bounds(bc, cd, hint);
    const ProductRadBounds rad = product_r_ad_bounds(g, hint);
    out.r_ad = rad.sound;
    out.r_ad_endpoint = rad.endpoint_rule;
    return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo endpoint sigmas
// ---------------------------------------------------------------------------

BoundsSigmas propagate_bound_sigmas(const OverlapGraph& g, DimensionHint hint,
                                    int replicates, std::uint64_t seed) {
    const auto [ab, bc, cd, sa, sb, sc] = chain_of(g);
    constexpr int kValues = 16;
    std::vector<double> sums(kValues, 0.0), sq(kValues, 0.0);
    for (int rep = 0; rep < replicates; ++rep) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(rep));
        const double a = clamp01(rng.normal(ab, sa)).value;
        const double b = clamp01(rng.normal(bc, sb)).value;
        const double c = clamp01(rng.normal(cd, sc)).value;
        const OverlapGraph sample = OverlapGraph::chain_abcd(a, b, c);
        const ClassicalBoundsReport cl = classical_bounds(sample);
        const ProductBoundsReport pr = product_bounds(sample, hint);
        const double vals[kValues] = {
            cl.c1.value.lo,   cl.c1.value.hi,   cl.r_ac.value.lo, cl.r_ac.value.hi,
            cl.r_bd.value.lo, cl.r_bd.value.hi, cl.r_ad.value.lo, cl.r_ad.value.hi,
            pr.r_ac.lo,       pr.r_ac.hi,       pr.r_bd.lo,       pr.r_bd.hi,
            pr.r_ad.lo,       pr.r_ad.hi,       pr.r_ad_endpoint.lo, pr.r_ad_endpoint.hi};
        for (int k = 0; k < kValues; ++k) {
            sums[k] += vals[k];
            sq[k] += vals[k] * vals[k];
        }
    }
    auto sigma = [&](int k) {
        const double mean = sums[k] / replicates;
        const double var = std::max(0.0, sq[k] / replicates - mean * mean);
        return std::sqrt(var * replicates / std::max(1, replicates - 1));
    };
    BoundsSigmas out;
    out.c1 = {sigma(0), sigma(1)};
    out.cl_r_ac = {sigma(2), sigma(3)};
    out.cl_r_bd = {sigma(4), sigma(5)};
    out.cl_r_ad = {sigma(6), sigma(7)};
    out.pr_r_ac = {sigma(8), sigma(9)};
    out.pr_r_bd = {sigma(10), sigma(11)};
    out.pr_r_ad = {sigma(12), sigma(13)};
    out.pr_r_ad_endpoint = {sigma(14), sigma(15)};
    return out;
}

// ---------------------------------------------------------------------------
// Polytope facets
// ---------------------------------------------------------------------------

namespace {

long long det3(const long long m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

std::vector<FacetInequality> polytope_inequalities() {
    // Truth-table rows of a1 & a2 & a3 as points (p1, p2, p3, p123).
    std::vector<std::array<long long, 4>> verts;
    for (int bits = 0; bits < 8; ++bits) {
        const long long a1 = (bits >> 2) & 1, a2 = (bits >> 1) & 1, a3 = bits & 1;
        verts.push_back({a1, a2, a3, a1 & a2 & a3});
    }

    std::set<FacetInequality> found;
    const int n = static_cast<int>(verts.size());
    int subset[4];
    for (subset[0] = 0; subset[0] < n; ++subset[0])
        for (subset[1] = subset[0] + 1; subset[1] < n; ++subset[1])
            for (subset[2] = subset[1] + 1; subset[2] < n; ++subset[2])
                for (subset[3] = subset[2] + 1; subset[3] < n; ++subset[3]) {
                    // Normal orthogonal to the three difference vectors
                    // (generalized cross product via cofactors).
                    long long diff[3][4];
                    for (int r = 0; r < 3; ++r)
                        for (int c = 0; c < 4; ++c)
                            diff[r][c] = verts[subset[r + 1]][c] - verts[subset[0]][c];
                    std::array<long long, 4> normal{};
                    for (int drop = 0; drop < 4; ++drop) {
                        long long minor[3][3];
                        for (int r = 0; r < 3; ++r) {
                            int cc = 0;
                            for (int c = 0; c < 4; ++c) {
                                if (c == drop) continue;
                                minor[r][cc++] = diff[r][c];
                            }
                        }
                        normal[drop] = ((drop % 2) ? -1 : 1) * det3(minor);
                    }
                    if (normal == std::array<long long, 4>{0, 0, 0, 0}) continue;  // degenerate

                    const long long offset = normal[0] * verts[subset[0]][0] +
                                             normal[1] * verts[subset[0]][1] +
                                             normal[2] * verts[subset[0]][2] +
                                             normal[3] * verts[subset[0]][3];
                    bool has_below = false, has_above = false;
                    for (const auto& v : verts) {
                        const long long s = normal[0] * v[0] + normal[1] * v[1] +
                                            normal[2] * v[2] + normal[3] * v[3];
                        if (s < offset) has_below = true;
                        if (s > offset) has_above = true;
                    }
                    if (has_below && has_above) continue;  // not supporting

                    FacetInequality facet{normal, offset};
                    if (has_above) {  // flip so every vertex satisfies a.x <= b
                        for (auto& c : facet.a) c = -c;
                        facet.b = -facet.b;
                    }
                    long long g = std::abs(facet.b);
                    for (long long c : facet.a) g = std::gcd(g, std::abs(c));
                    if (g > 1) {
                        for (auto& c : facet.a) c /= g;
                        facet.b /= g;
                    }
                    found.insert(facet);
                }
    return {found.begin(), found.end()};
}

Interval lp_joint_range(std::span<const FacetInequality> facets, double p1, double p2,
                        double p3) {
    double lo = 0.0, hi = 1.0;
    for (const auto& f : facets) {
        const double partial = f.a[0] * p1 + f.a[1] * p2 + f.a[2] * p3;
        const double rhs = static_cast<double>(f.b) - partial;
        if (f.a[3] > 0)
            hi = std::min(hi, rhs / f.a[3]);
        else if (f.a[3] < 0)
            lo = std::max(lo, rhs / f.a[3]);
        else if (rhs < -1e-12)
            throw Error("marginals violate a facet that does not involve the conjunction");
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Classical oracle
// ---------------------------------------------------------------------------

namespace {

struct PartitionTable {
    std::vector<Partition> partitions;          // all 15
    // pair membership masks, index order AB, BC, CD, AC, BD, AD
    std::array<std::vector<double>, 6> pair_mask;
    int single_block_index = -1;

    PartitionTable() {
        partitions = Partition::all();
        const std::pair<char, char> pairs[6] = {{'A', 'B'}, {'B', 'C'}, {'C', 'D'},
                                                {'A', 'C'}, {'B', 'D'}, {'A', 'D'}};
        for (auto& mask : pair_mask) mask.assign(partitions.size(), 0.0);
        for (size_t i = 0; i < partitions.size(); ++i) {
            for (int p = 0; p < 6; ++p)
                pair_mask[p][i] = partitions[i].same_block(pairs[p].first, pairs[p].second);
            if (partitions[i].single_block()) single_block_index = static_cast<int>(i);
        }
    }
};

const PartitionTable& partition_table() {
    static const PartitionTable table;
    return table;
}

// Mixture with independent identical/orthogonal draws on the three chain
// pairs; its induced chain overlaps equal (ab, bc, cd) exactly. Used as the
// interior start point of the constraint-slice walk.
std::vector<double> product_chain_mixture(double ab, double bc, double cd) {
    const PartitionTable& tab = partition_table();
    std::vector<double> w(tab.partitions.size(), 0.0);
    for (int coins = 0; coins < 8; ++coins) {
        const bool c_ab = coins & 1, c_bc = coins & 2, c_cd = coins & 4;
        const double weight = (c_ab ? ab : 1.0 - ab) * (c_bc ? bc : 1.0 - bc) *
                              (c_cd ? cd : 1.0 - cd);
        // blocks from transitive closure along the chain
        int cls[4] = {0, 1, 2, 3};
        auto unite = [&](int x, int y) {
            const int from = cls[y], to = cls[x];
            for (int& c : cls)
                if (c == from) c = to;
        };
        if (c_ab) unite(0, 1);
        if (c_bc) unite(1, 2);
        if (c_cd) unite(2, 3);
        std::vector<std::vector<PhotonLabel>> blocks;
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<PhotonLabel> block;
            for (int i = 0; i < 4; ++i)
                if (cls[i] == rep) block.push_back(static_cast<PhotonLabel>('A' + i));
            if (!block.empty()) blocks.push_back(std::move(block));
        }
        const Partition part(std::move(blocks));
        for (size_t i = 0; i < tab.partitions.size(); ++i)
            if (tab.partitions[i] == part) {
                w[i] += weight;
                break;
            }
    }
    return w;
}

// Orthonormal basis of the span of the four constraint rows
// (all-ones, mask_AB, mask_BC, mask_CD); directions are projected out of it.
std::vector<std::vector<double>> constraint_row_basis() {
    const PartitionTable& tab = partition_table();
    const size_t n = tab.partitions.size();
    std::vector<std::vector<double>> rows;
    rows.push_back(std::vector<double>(n, 1.0));
    for (int p = 0; p < 3; ++p) rows.push_back(tab.pair_mask[p]);
    std::vector<std::vector<double>> basis;
    for (auto& row : rows) {
        std::vector<double> v = row;
        for (const auto& q : basis) {
            double dot = 0.0;
            for (size_t i = 0; i < n; ++i) dot += v[i] * q[i];
            for (size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-12) continue;
        for (double& x : v) x /= norm;
        basis.push_back(std::move(v));
    }
    return basis;
}

struct MixtureCheck {
    bool violated = false;
    double excess = 0.0;
};

// Check a mixture's own c1 / r_AC / r_BD / r_AD against the bounds computed
// from its own induced chain overlaps.
MixtureCheck check_mixture(const std::vector<double>& w) {
    const PartitionTable& tab = partition_table();
    double r[6] = {0, 0, 0, 0, 0, 0};
    for (int p = 0; p < 6; ++p)
        for (size_t i = 0; i < w.size(); ++i) r[p] += w[i] * tab.pair_mask[p][i];
    const double c1 = w[tab.single_block_index];

    const OverlapGraph g = OverlapGraph::chain_abcd(r[0], r[1], r[2]);
    const ClassicalBoundsReport rep = classical_bounds(g);

    constexpr double kSlack = 1e-9;
    MixtureCheck out;
    auto probe = [&](const Interval& iv, double value) {
        const double excess = std::max(iv.lo - value, value - iv.hi);
        if (excess > kSlack) {
            out.violated = true;
            out.excess = std::max(out.excess, excess);
        }
    };
    probe(rep.c1.value, c1);
    probe(rep.r_ac.value, r[3]);
    probe(rep.r_bd.value, r[4]);
    probe(rep.r_ad.value, r[5]);
    return out;
}

struct TrialOutcome {
    bool matched = false;
    bool tested = false;
    bool self_checked = false;
    bool violated = false;
    double excess = 0.0;
};

TrialOutcome classical_trial(const OverlapGraph& g, long long index, std::uint64_t seed,
                             const std::vector<double>& start,
                             const std::vector<std::vector<double>>& row_basis) {
    const PartitionTable& tab = partition_table();
    const size_t n = tab.partitions.size();
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(index));
    TrialOutcome out;

    const double target[3] = {g.overlap('A', 'B'), g.overlap('B', 'C'), g.overlap('C', 'D')};

    std::vector<double> w(n);
    const bool unconstrained = index % 2 == 0;
    if (unconstrained) {
        rng.simplex_uniform(w.data(), static_cast<int>(n));
    } else {
        // Walk the slice of mixtures matching the measured chain.
        w = start;
        std::vector<double> dir(n);
        for (int step = 0; step < 16; ++step) {
            for (auto& d : dir) d = rng.normal();
            for (const auto& q : row_basis) {
                double dot = 0.0;
                for (size_t i = 0; i < n; ++i) dot += dir[i] * q[i];
                for (size_t i = 0; i < n; ++i) dir[i] -= dot * q[i];
            }
            // the chord {w + t dir >= 0} inside the simplex
            double t_lo = -1e30, t_hi = 1e30;
            for (size_t i = 0; i < n; ++i) {
                if (dir[i] > 1e-14)
                    t_lo = std::max(t_lo, -w[i] / dir[i]);
                else if (dir[i] < -1e-14)
                    t_hi = std::min(t_hi, -w[i] / dir[i]);
            }
            if (t_hi <= t_lo) continue;
            const double t = rng.uniform(t_lo, t_hi);
            for (size_t i = 0; i < n; ++i) w[i] = std::max(0.0, w[i] + t * dir[i]);
        }
    }
    // match filter: induced chain within 1e-3 of the target (the slice walk
    // stays on target by construction; unconstrained draws almost never do)
    {
        double induced[3] = {0, 0, 0};
        for (int p = 0; p < 3; ++p)
            for (size_t i = 0; i < n; ++i) induced[p] += w[i] * tab.pair_mask[p][i];
        out.matched = std::abs(induced[0] - target[0]) < 1e-3 &&
                      std::abs(induced[1] - target[1]) < 1e-3 &&
                      std::abs(induced[2] - target[2]) < 1e-3;
    }

    if (out.matched) {
        // matched draw: its c1 and unmeasured overlaps must sit inside the
        // intervals reported for the *measured* graph
        const ClassicalBoundsReport rep = classical_bounds(g);
        const double c1 = w[tab.single_block_index];
        double r_ac = 0.0, r_bd = 0.0, r_ad = 0.0;
        for (size_t i = 0; i < n; ++i) {
            r_ac += w[i] * tab.pair_mask[3][i];
            r_bd += w[i] * tab.pair_mask[4][i];
            r_ad += w[i] * tab.pair_mask[5][i];
        }
        constexpr double kSlack = 5e-3;  // three 1e-3 match deviations can stack
        auto probe = [&](const Interval& iv, double value) {
            const double excess = std::max(iv.lo - value, value - iv.hi);
            if (excess > kSlack) {
                out.violated = true;
                out.excess = std::max(out.excess, excess);
            }
        };
        probe(rep.c1.value, c1);
        probe(rep.r_ac.value, r_ac);
        probe(rep.r_bd.value, r_bd);
        probe(rep.r_ad.value, r_ad);
        out.tested = true;
    } else if (unconstrained) {
        const MixtureCheck check = check_mixture(w);
        out.self_checked = true;
        out.violated = check.violated;
        out.excess = check.excess;
    }
    return out;
}

OracleReport classical_oracle_run(const OverlapGraph& g, long long trials,
                                  std::uint64_t seed, bool parallel) {
    const std::vector<double> start = product_chain_mixture(
        g.overlap('A', 'B'), g.overlap('B', 'C'), g.overlap('C', 'D'));
    const std::vector<std::vector<double>> basis = constraint_row_basis();

    OracleReport report;
    report.trials = trials;
    long long matched = 0, tested = 0, self_checked = 0, violations = 0;
    double worst = 0.0;

#pragma omp parallel for reduction(+ : matched, tested, self_checked, violations) \
    reduction(max : worst) schedule(static) if (parallel)
    for (long long i = 0; i < trials; ++i) {
        const TrialOutcome r = classical_trial(g, i, seed, start, basis);
        matched += r.matched;
        tested += r.tested;
        self_checked += r.self_checked;
        violations += r.violated;
        worst = std::max(worst, r.excess);
    }
    report.matched = matched;
    report.tested = tested;
    report.self_checked = self_checked;
    report.violations = violations;
    report.worst_excess = worst;
    return report;
}

}  // namespace

OracleReport classical_oracle_check(const OverlapGraph& g, long long trials,
                                    std::uint64_t seed) {
    return classical_oracle_run(g, trials, seed, true);
}

OracleReport classical_oracle_check_serial(const OverlapGraph& g, long long trials,
                                           std::uint64_t seed) {
    return classical_oracle_run(g, trials, seed, false);
}

// ---------------------------------------------------------------------------
// Product oracle
// ---------------------------------------------------------------------------

namespace {

using State = std::vector<std::complex<double>>;

State haar_state(Rng& rng, int dim) {
    State psi(dim);
    double norm = 0.0;
    for (auto& amp : psi) {
        amp = {rng.normal(), rng.normal()};
        norm += std::norm(amp);
    }
    norm = std::sqrt(norm);
    for (auto& amp : psi) amp /= norm;
    return psi;
}

double overlap(const State& a, const State& b) {
    std::complex<double> dot = 0.0;
    for (size_t i = 0; i < a.size(); ++i) dot += std::conj(a[i]) * b[i];
    return std::norm(dot);
}

struct ProductTrial {
    bool violated = false;
    double excess = 0.0;
};

ProductTrial product_trial(int dimension, long long index, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(index));
    State s[4];
    for (auto& st : s) st = haar_state(rng, dimension);
    const double r_ab = overlap(s[0], s[1]);
    const double r_bc = overlap(s[1], s[2]);
    const double r_cd = overlap(s[2], s[3]);
    const double r_ac = overlap(s[0], s[2]);
    const double r_bd = overlap(s[1], s[3]);
    const double r_ad = overlap(s[0], s[3]);

    const DimensionHint hint =
        dimension == 2 ? DimensionHint::qubit : DimensionHint::general;
    const OverlapGraph g = OverlapGraph::chain_abcd(r_ab, r_bc, r_cd);
    const ProductBoundsReport rep = product_bounds(g, hint);

    constexpr double kSlack = 1e-9;
    ProductTrial out;
    auto probe = [&](const Interval& iv, double value) {
        const double excess = std::max(iv.lo - value, value - iv.hi);
        if (excess > kSlack) {
            out.violated = true;
            out.excess = std::max(out.excess, excess);
        }
    };
    probe(rep.r_ac, r_ac);
    probe(rep.r_bd, r_bd);
    probe(rep.r_ad, r_ad);
    return out;
}

OracleReport product_oracle_run(int dimension, long long trials, std::uint64_t seed,
                                bool parallel) {
    if (dimension < 2) throw DimensionMismatch("product oracle needs dimension >= 2");
    OracleReport report;
    report.trials = trials;
    report.tested = trials;
    long long violations = 0;
    double worst = 0.0;
#pragma omp parallel for reduction(+ : violations) reduction(max : worst) \
    schedule(static) if (parallel)
    for (long long i = 0; i < trials; ++i) {
        const ProductTrial r = product_trial(dimension, i, seed);
        violations += r.violated;
        worst = std::max(worst, r.excess);
    }
    report.violations = violations;
    report.worst_excess = worst;
    return report;
}

}  // namespace

OracleReport product_oracle_check(int dimension, long long trials, std::uint64_t seed) {
    return product_oracle_run(dimension, trials, seed, true);
}

OracleReport product_oracle_check_serial(int dimension, long long trials,
                                         std::uint64_t seed) {
    return product_oracle_run(dimension, trials, seed, false);
}

}  // namespace indist::bounds
