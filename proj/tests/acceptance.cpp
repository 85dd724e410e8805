// Acceptance suite: one checkable criterion per run (--criterion N) or all
// (--all). Each criterion prints a single [PASS]/[FAIL] line plus details
// and enforces its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "indist/bounds.hpp"
#include "indist/parallel.hpp"
#include "indist/rng.hpp"
#include "indist/simulator.hpp"
#include "indist/stats.hpp"
#include "indist/surfaces.hpp"
#include "oracles.hpp"

using namespace indist;

namespace {

struct Row {
    const char* name;
    double r_ab, r_bc, r_cd;
};

// Measured chain overlaps for the six distinguishability configurations.
const Row kRows[6] = {
    {"XXXX", 0.826, 0.640, 0.872}, {"XXXY", 0.802, 0.780, 0.00},
    {"XXYY", 0.832, 0.01, 0.802},  {"XXYZ", 0.834, 0.00, 0.01},
    {"XYYZ", 0.01, 0.68, 0.04},    {"XYWZ", 0.02, 0.00, 0.00},
};

struct Criterion {
    std::string detail;
    bool pass = true;
    int checks = 0, failed = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failed;
            pass = false;
            detail += "\n    FAILED: " + what;
        }
    }
    void expect_close(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", reference " << want << ", |diff| "
           << std::abs(got - want) << " > " << tol;
        expect(std::abs(got - want) <= tol + 1e-9, os.str());
    }
    void note(const std::string& line) { detail += "\n    " + line; }
};

// --- 1: c1 bounds table ----------------------------------------------------

Criterion criterion_1() {
    Criterion c;
    const double tol = 0.01;
    // printed c1 values: XXXX has both endpoints, the rest print the upper
    // bound (lower bound trivially zero)
    const double printed_hi[6] = {0.64, 0.00, 0.01, 0.00, 0.01, 0.00};
    for (int i = 0; i < 6; ++i) {
        const auto iv =
            bounds::c1_bounds(OverlapGraph::chain_abcd(kRows[i].r_ab, kRows[i].r_bc, kRows[i].r_cd));
        if (i == 0)
            c.expect_close(iv.value.lo, 0.34, tol, std::string(kRows[i].name) + " c1 lower");
        else
            c.expect_close(iv.value.lo, 0.0, tol, std::string(kRows[i].name) + " c1 lower");
        c.expect_close(iv.value.hi, printed_hi[i], tol,
                       std::string(kRows[i].name) + " c1 upper");
    }
    c.note(std::to_string(c.checks) + " endpoint checks at tolerance 0.01");
    return c;
}

// --- 2: classical unmeasured-overlap table ----------------------------------

Criterion criterion_2() {
    Criterion c;
    const double tol = 0.02;
    struct Printed {
        double ac_lo, ac_hi, ad_lo, ad_hi, bd_lo, bd_hi;
    };
    const Printed printed[6] = {
        {0.46, 0.81, 0.34, 0.94, 0.511, 0.768}, {0.58, 0.98, 0.0, 0.40, 0.0, 0.20},
        {0.0, 0.17, 0.0, 0.37, 0.0, 0.20},      {0.0, 0.14, 0.0, 1.0, 0.0, 0.97},
        {0.0, 0.33, 0.0, 1.0, 0.0, 0.36},       {0.0, 0.94, 0.0, 1.0, 0.0, 0.96},
    };
    for (int i = 0; i < 6; ++i) {
        const auto rep = bounds::classical_bounds(
            OverlapGraph::chain_abcd(kRows[i].r_ab, kRows[i].r_bc, kRows[i].r_cd));
        const std::string n = kRows[i].name;
        c.expect_close(rep.r_ac.value.lo, printed[i].ac_lo, tol, n + " r_AC lower");
        c.expect_close(rep.r_ac.value.hi, printed[i].ac_hi, tol, n + " r_AC upper");
        c.expect_close(rep.r_ad.value.lo, printed[i].ad_lo, tol, n + " r_AD lower");
        c.expect_close(rep.r_ad.value.hi, printed[i].ad_hi, tol, n + " r_AD upper");
        c.expect_close(rep.r_bd.value.lo, printed[i].bd_lo, tol, n + " r_BD lower");
        c.expect_close(rep.r_bd.value.hi, printed[i].bd_hi, tol, n + " r_BD upper");
    }
    c.note(std::to_string(c.checks - c.failed) + "/" + std::to_string(c.checks) +
           " endpoints within the flat 0.02 tolerance");
    if (!c.pass)
        c.note("the failing upper endpoints (XXYZ r_AC, XYWZ r_AC, XYWZ r_BD) are only "
               "reproducible from raw pre-clamp overlap estimates, which were never "
               "published; the printed clamped inputs give 1-|r1-r2| instead");
    return c;
}

// --- 3: product-model table ------------------------------------------------

Criterion criterion_3() {
    Criterion c;
    const double tol = 0.01;
    const OverlapGraph xxxx = OverlapGraph::chain_abcd(0.826, 0.640, 0.872);
    const auto rep = bounds::product_bounds(xxxx, bounds::DimensionHint::general);
    c.expect_close(rep.r_ac.lo, 0.23, tol, "XXXX r_AC lower");
    c.expect_close(rep.r_ac.hi, 0.955, tol, "XXXX r_AC upper");
    c.expect_close(rep.r_bd.lo, 0.28, tol, "XXXX r_BD lower");
    c.expect_close(rep.r_bd.hi, 0.925, tol, "XXXX r_BD upper");
    c.expect_close(rep.r_ad_endpoint.lo, 0.017, tol, "XXXX r_AD lower (endpoint rule)");
    c.expect_close(rep.r_ad_endpoint.hi, 0.976, tol, "XXXX r_AD upper (endpoint rule)");

    const OverlapGraph xxxy = OverlapGraph::chain_abcd(0.802, 0.780, 0.00);
    const auto rep2 = bounds::product_bounds(xxxy, bounds::DimensionHint::general);
    c.expect_close(rep2.r_ac.lo, 0.34, tol, "XXXY r_AC lower");
    c.expect_close(rep2.r_ac.hi, 0.9991, tol, "XXXY r_AC upper");
    c.note("r_AD endpoint-rule interval [" + std::to_string(rep.r_ad_endpoint.lo) + ", " +
           std::to_string(rep.r_ad_endpoint.hi) + "]; worst-case interval reaches " +
           std::to_string(rep.r_ad.hi));
    return c;
}

// --- 4: volume ratio ---------------------------------------------------------

Criterion criterion_4() {
    Criterion c;
    surf::DelayAxes axes;
    axes.visibility = {0.944, 0.835, 0.915};
    const auto ratio = surf::volume_ratio(axes, surf::VolumeMethod::monte_carlo, 10000000, 42);
    c.expect_close(ratio.ratio, 0.525, 0.02, "enclosed-volume ratio");
    std::ostringstream os;
    os << "ratio " << ratio.ratio << " +- " << ratio.standard_error << " (1e7 samples; volumes "
       << ratio.numerator.volume << " / " << ratio.denominator.volume << ")";
    c.note(os.str());
    return c;
}

// --- 5: post-selection disjointness -----------------------------------------

Criterion criterion_5() {
    Criterion c;
    const char* spec_name[2] = {"ideal reflectivities", "measured reflectivities"};
    int which = 0;
    for (const auto& spec : {sim::six_mode_ideal(), sim::six_mode_measured()}) {
        const ModeOccupation inputs[3] = {ModeOccupation({1, 1, 0, 0, 1, 1}),
                                          ModeOccupation({2, 2, 0, 0, 0, 0}),
                                          ModeOccupation({0, 0, 0, 0, 2, 2})};
        std::set<ModeOccupation> sets[3];
        size_t total = 0;
        for (int i = 0; i < 3; ++i) {
            sets[i] = sim::enumerate_reachable_outputs(spec, inputs[i]);
            total += sets[i].size();
        }
        long long intersections = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                for (const auto& occ : sets[i]) intersections += sets[j].count(occ);
        c.expect(intersections == 0, "reachable sets intersect (" +
                                         std::to_string(intersections) + " shared outputs)");
        c.note(std::string(spec_name[which++]) + ": set sizes " +
               std::to_string(sets[0].size()) + " / " + std::to_string(sets[1].size()) +
               " / " + std::to_string(sets[2].size()) + ", zero pairwise intersections (" +
               std::to_string(total) + " reachable outputs)");
    }
    return c;
}

// --- 6: permanent evolution vs path-sum oracle -------------------------------

Criterion criterion_6() {
    Criterion c;
    const ModeOccupation input({1, 1, 0, 0, 1, 1});
    double worst = 0.0;
    for (const auto& spec : {sim::six_mode_ideal(), sim::six_mode_measured()}) {
        for (const auto& partition : Partition::all()) {
            const auto fast = sim::evolve_partition(spec, input, partition);
            const auto oracle = test::path_sum_partition(spec, input, partition);
            const double l1 = test::l1_distance(fast, oracle);
            worst = std::max(worst, l1);
            c.expect(l1 < 1e-10, "partition " + partition.to_letters() +
                                     " L1 deviation " + std::to_string(l1));
        }
    }
    std::ostringstream os;
    os << "30 partition/reflectivity combinations, worst L1 " << worst;
    c.note(os.str());
    return c;
}

// --- 7: classical bound soundness --------------------------------------------

Criterion criterion_7() {
    Criterion c;
    const OverlapGraph g = OverlapGraph::chain_abcd(0.826, 0.640, 0.872);
    const auto report = bounds::classical_oracle_check(g, 100000, 2024);
    c.expect(report.violations == 0,
             std::to_string(report.violations) + " violations, worst excess " +
                 std::to_string(report.worst_excess));
    c.note("trials " + std::to_string(report.trials) + ", matched " +
           std::to_string(report.matched) + ", tested " + std::to_string(report.tested) +
           ", self-checked " + std::to_string(report.self_checked) + ", violations " +
           std::to_string(report.violations));
    c.expect(report.tested > 10000, "too few matched mixtures to be meaningful");
    return c;
}

// --- 8: product bound soundness ----------------------------------------------

Criterion criterion_8() {
    Criterion c;
    for (int dimension : {2, 4}) {
        const auto report = bounds::product_oracle_check(dimension, 100000, 4040);
        c.expect(report.violations == 0,
                 "dimension " + std::to_string(dimension) + ": " +
                     std::to_string(report.violations) + " violations, worst excess " +
                     std::to_string(report.worst_excess));
        c.note("dimension " + std::to_string(dimension) + ": trials " +
               std::to_string(report.trials) + ", violations " +
               std::to_string(report.violations));
    }
    return c;
}

// --- 9: facet LP reproduces the closed-form c1 bounds ------------------------

Criterion criterion_9() {
    Criterion c;
    const auto facets = bounds::polytope_inequalities();
    c.expect(facets.size() == 8,
             "expected 8 facets, got " + std::to_string(facets.size()));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                const double p1 = i / 19.0, p2 = j / 19.0, p3 = k / 19.0;
                const Interval lp = bounds::lp_joint_range(facets, p1, p2, p3);
                const auto closed = bounds::c1_bounds(OverlapGraph::chain_abcd(p1, p2, p3));
                worst = std::max({worst, std::abs(lp.lo - closed.value.lo),
                                  std::abs(lp.hi - closed.value.hi)});
            }
    c.expect(worst <= 1e-12, "LP and closed form differ by " + std::to_string(worst));
    std::ostringstream os;
    os << "8000 marginal grid points, max endpoint deviation " << worst;
    c.note(os.str());
    return c;
}

// --- 10: estimator closure ----------------------------------------------------

Criterion criterion_10() {
    Criterion c;
    const double v1 = 0.944, v2 = 0.835, v3 = 0.915;
    const double true_c1 = v1 * v2 * v3;  // 0.72124
    const auto spec = sim::six_mode_ideal();
    const MixtureModel mixture = sim::build_rho_source(v1, v2, v3);
    const auto dist = sim::evolve_mixture(spec, ModeOccupation({1, 1, 0, 0, 1, 1}), mixture);
    const sim::OutputClassifier classifier(spec);
    const auto post = sim::postselect(dist, classifier);
    const OverlapGraph g = sim::estimate_overlaps_from_distribution(post.retained);
    c.expect(std::abs(g.overlap('A', 'B') - v1) < 1e-6, "r_AB estimate off");
    c.expect(std::abs(g.overlap('B', 'C') - v2) < 1e-6, "r_BC estimate off");
    c.expect(std::abs(g.overlap('C', 'D') - v3) < 1e-6, "r_CD estimate off");
    const auto c1 = bounds::c1_bounds(g);
    c.expect(c1.value.contains(true_c1, 1e-9),
             "c1 interval does not contain the mixture weight");
    std::ostringstream os;
    os << "estimated chain (" << g.overlap('A', 'B') << ", " << g.overlap('B', 'C') << ", "
       << g.overlap('C', 'D') << "); c1 interval [" << c1.value.lo << ", " << c1.value.hi
       << "] contains " << true_c1;
    c.note(os.str());
    return c;
}

// --- 11: resampled-simulation TVD property ------------------------------------

Criterion criterion_11() {
    Criterion c;
    const auto spec = sim::six_mode_measured();
    const sim::SourceSpec source;
    const MixtureModel mixture = sim::build_rho_source(0.944, 0.835, 0.915);
    const auto clicks = sim::simulate_noisy(spec, source, sim::detection_measured(), mixture);
    const sim::OutputClassifier classifier(spec, source);
    const auto expected = sim::postselect(sim::fourfold_occupations(clicks), classifier).retained;

    const int seeds = 100;
    const long long events = 10000;
    int below = 0;
    double worst = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(9000 + seed);
        stats::CountsRecord counts;
        for (const auto& [occ, p] : expected.p) {
            const long long draw = rng.poisson(p * static_cast<double>(events));
            if (draw > 0) counts.entries[occ] = draw;
        }
        const double t = stats::tvd(stats::normalize(counts), expected);
        worst = std::max(worst, t);
        if (t < 0.05) ++below;
    }
    c.expect(below >= 95, "only " + std::to_string(below) + "/100 seeds below TVD 0.05");
    std::ostringstream os;
    os << below << "/100 resampled data sets (N = 1e4) below TVD 0.05; worst " << worst;
    c.note(os.str());
    return c;
}

struct Entry {
    int number;
    const char* title;
    double budget_seconds;
    std::function<Criterion()> run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list = {
        {1, "c1 bounds for the six configurations match the reference table (+-0.01)", 1.0,
         criterion_1},
        {2, "classical unmeasured-overlap intervals match the reference table (+-0.02)", 1.0,
         criterion_2},
        {3, "product-model intervals match the reference table (+-0.01)", 1.0, criterion_3},
        {4, "delay-space volume ratio 0.525 +- 0.02 (Monte Carlo, 1e7 samples)", 60.0,
         criterion_4},
        {5, "reachable output sets of the three source inputs are pairwise disjoint", 1.0,
         criterion_5},
        {6, "permanent evolution matches the path-sum oracle (L1 < 1e-10)", 10.0, criterion_6},
        {7, "classical bounds sound against 1e5 random mixtures", 30.0, criterion_7},
        {8, "product bounds sound against 1e5 Haar tuples in dims 2 and 4", 60.0, criterion_8},
        {9, "facet LP reproduces the c1 bound endpoints on a 20^3 grid", 10.0, criterion_9},
        {10, "estimator closure: recovered c1 interval contains the mixture weight", 10.0,
         criterion_10},
        {11, "resampled 1e4-event simulation stays within TVD 0.05 of its source", 30.0,
         criterion_11},
    };
    return list;
}

int run_entry(const Entry& entry) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion result = entry.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds > entry.budget_seconds) {
        result.pass = false;
        result.note("runtime " + std::to_string(seconds) + " s exceeds the " +
                    std::to_string(entry.budget_seconds) + " s budget");
    }
    std::printf("[%s] criterion %d: %s (%.2f s)%s\n", result.pass ? "PASS" : "FAIL",
                entry.number, entry.title, seconds, result.detail.c_str());
    return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    indist::apply_thread_cap_from_env();
    int which = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which = std::atoi(argv[++i]);
    }
    int failures = 0;
    for (const auto& entry : entries()) {
        if (which != 0 && entry.number != which) continue;
        failures += run_entry(entry);
    }
    if (which == 0)
        std::printf("%d/%zu criteria passed\n", static_cast<int>(entries().size()) - failures,
                    entries().size());
    return failures > 125 ? 125 : failures;
}
