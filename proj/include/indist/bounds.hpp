#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "indist/types.hpp"

namespace indist::bounds {

// ---------------------------------------------------------------------------
// Classical model (i): convex mixtures in which every photon pair is either
// identical or orthogonal.
// ---------------------------------------------------------------------------

/// Genuine four-photon indistinguishability from the measured chain:
///   max(0, r_AB + r_BC + r_CD - 2)  <=  c1  <=  min(r_AB, r_BC, r_CD).
/// Raw endpoints are kept; raw lo > raw hi means the data are incompatible
/// with the classical model (reported, not thrown).
ClampedInterval c1_bounds(const OverlapGraph& g);

/// Bounds for the unmeasured overlap closing an X-Y-Z chain:
///   [max(0, r_xy + r_yz - 1), 1 - |r_xy - r_yz|].
Interval chain_bounds(double r_xy, double r_yz);

/// Classical bounds on r_AD. Lower: max(0, r_AB + r_BC + r_CD - 2).
/// Upper: extremize 1 - |r_AB - r_BD| over the full chain range of r_BD
/// (closed form: 1 when r_AB lies inside the range, otherwise 1 minus the
/// distance to the nearest endpoint).
ClampedInterval classical_r_ad_bounds(const OverlapGraph& g);

/// Cross-check form of the r_AD upper bound,
///   2 + min(r_AB - r_BC - r_CD, r_BC - r_AB - r_CD, r_CD - r_AB - r_BC),
/// clamped to [0, 1]; identical to the extremized upper bound.
double classical_r_ad_upper_min_form(double r_ab, double r_bc, double r_cd);

struct ClassicalBoundsReport {
    ClampedInterval c1;
    ClampedInterval r_ac;
    ClampedInterval r_bd;
    ClampedInterval r_ad;
    bool model_inconsistent = false;
};

/// All classical-model outputs for a measured A-B-C-D chain.
ClassicalBoundsReport classical_bounds(const OverlapGraph& g);

// ---------------------------------------------------------------------------
// Product model (ii): four pure single-photon states in a tensor product.
// ---------------------------------------------------------------------------

/// For qubits the product-state lower bound holds unconditionally; in higher
/// dimension it is active only when the two known overlaps sum above 1.
enum class DimensionHint { qubit, general };

/// Product-state bounds for the overlap closing an X-Y-Z chain:
///   upper = (sqrt(r1 r2) + sqrt((1-r1)(1-r2)))^2          (always)
///   lower = (sqrt(r1 r2) - sqrt((1-r1)(1-r2)))^2          (qubit, or r1+r2 > 1)
Interval product_chain_bounds(double r1, double r2, DimensionHint hint);

struct ProductRadBounds {
    /// Worst case of the chain formulas over the whole inferred range of the
    /// intermediate overlap: a valid bound for every product state.
    Interval sound;
    /// Chain formulas evaluated only at the endpoints of the inferred range;
    /// matches the published reference tables but can be exceeded by product
    /// states whose r_BD falls strictly inside the range (see tests).
    Interval endpoint_rule;
};

/// Two-step bounds on r_AD: infer the range of r_BD from (r_BC, r_CD), then
/// extremize the A-B-D chain formulas over that range. Computed through both
/// routes (A-B-D via r_BD, A-C-D via r_AC) and intersected; the routes agree.
ProductRadBounds product_r_ad_bounds(const OverlapGraph& g, DimensionHint hint);

struct ProductBoundsReport {
    Interval r_ac;
    Interval r_bd;
    Interval r_ad;           // sound variant
    Interval r_ad_endpoint;  // endpoint-rule variant
};

ProductBoundsReport product_bounds(const OverlapGraph& g, DimensionHint hint);

// ---------------------------------------------------------------------------
// Monte-Carlo uncertainty on bound endpoints
// ---------------------------------------------------------------------------

struct IntervalSigma {
    double lo = 0.0;
    double hi = 0.0;
};

struct BoundsSigmas {
    IntervalSigma c1, cl_r_ac, cl_r_bd, cl_r_ad;
    IntervalSigma pr_r_ac, pr_r_bd, pr_r_ad, pr_r_ad_endpoint;
};

/// Endpoint standard deviations from Gaussian resampling of the measured
/// overlaps (edge sigmas of the graph), clamped per replicate. Deterministic
/// for a fixed seed.
BoundsSigmas propagate_bound_sigmas(const OverlapGraph& g, DimensionHint hint,
                                    int replicates, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Logical polytope behind the classical c1 bounds
// ---------------------------------------------------------------------------

/// Facet a . (p1, p2, p3, p123) <= b with integer coefficients, gcd 1.
struct FacetInequality {
    std::array<long long, 4> a{};
    long long b = 0;
    auto operator<=>(const FacetInequality&) const = default;
};

/// Facets of the convex hull of the AND truth table rows
/// (p(a1), p(a2), p(a3), p(a1 and a2 and a3)), found by exact enumeration
/// over the 8 binary vertices. Exactly eight facets come out: the three
/// trivial caps, nonnegativity of the conjunction, the three monotonicity
/// constraints, and the nontrivial p123 >= p1 + p2 + p3 - 2.
std::vector<FacetInequality> polytope_inequalities();

/// Range of the conjunction probability subject to the facets at fixed
/// marginals: a one-variable linear program over the facet list.
/// Throws Error if the marginals violate a facet not involving p123.
Interval lp_joint_range(std::span<const FacetInequality> facets, double p1, double p2,
                        double p3);

// ---------------------------------------------------------------------------
// Brute-force soundness oracles
// ---------------------------------------------------------------------------

struct OracleReport {
    long long trials = 0;
    long long matched = 0;     // draws whose induced chain matches the target (1e-3)
    long long tested = 0;      // matched draws checked against the fixed-target bounds
    long long self_checked = 0;  // unconstrained draws checked against their own bounds
    long long violations = 0;
    double worst_excess = 0.0;  // largest distance outside any interval
};

/// Samples random classical mixtures over the 15 four-photon partitions.
/// Half of the draws walk the affine slice of mixtures whose induced
/// (r_AB, r_BC, r_CD) equals the graph's values, so the match filter has
/// power; the unconstrained half are checked against bounds computed from
/// their own induced overlaps. Violations must be zero.
OracleReport classical_oracle_check(const OverlapGraph& g, long long trials,
                                    std::uint64_t seed);
OracleReport classical_oracle_check_serial(const OverlapGraph& g, long long trials,
                                           std::uint64_t seed);

/// Samples Haar-random pure-state 4-tuples in the given dimension and checks
/// every tuple against the product bounds computed from its own chain
/// overlaps (qubit hint iff dimension == 2). Violations must be zero.
OracleReport product_oracle_check(int dimension, long long trials, std::uint64_t seed);
OracleReport product_oracle_check_serial(int dimension, long long trials,
                                         std::uint64_t seed);

}  // namespace indist::bounds
