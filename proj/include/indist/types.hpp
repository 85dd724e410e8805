#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace indist {

// ---------------------------------------------------------------------------
// Errors. One exception type per named failure mode; all derive from Error so
// callers can catch the family.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRangeOverlap : Error { using Error::Error; };
struct OutOfRangeProbability : Error { using Error::Error; };
struct DuplicateEdge : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct MissingEdge : Error { using Error::Error; };
struct NonPositiveWidth : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct WrongPhotonNumber : Error { using Error::Error; };
struct EmptyPostselection : Error { using Error::Error; };
struct NoConditionedEvents : Error { using Error::Error; };
struct EmptyCounts : Error { using Error::Error; };
struct BoxTooSmall : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Basic values
// ---------------------------------------------------------------------------

/// Photon identity. The four-photon experiment uses 'A'..'D'; any distinct
/// characters work.
using PhotonLabel = char;

constexpr PhotonLabel kPhotonA = 'A';
constexpr PhotonLabel kPhotonB = 'B';
constexpr PhotonLabel kPhotonC = 'C';
constexpr PhotonLabel kPhotonD = 'D';

/// The default four-photon vertex set.
std::span<const PhotonLabel> default_photons();

/// A value clamped into [0, 1] together with a flag recording whether the
/// raw input was outside. Noisy estimation can produce overlaps slightly
/// below 0 or above 1; downstream bound formulas require the unit interval.
struct Clamped {
    double value = 0.0;
    bool was_clamped = false;
};

Clamped clamp01(double raw);

/// Closed range [lo, hi] within [0, 1]; the return type of every bound.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v, double slack = 0.0) const {
        return v >= lo - slack && v <= hi + slack;
    }
    double width() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Interval produced by clamping raw endpoints into [0, 1]. Keeps the raw
/// values so that model inconsistency (raw lo > raw hi) stays visible.
struct ClampedInterval {
    Interval value;
    double raw_lo = 0.0;
    double raw_hi = 0.0;
    bool clamped_lo = false;
    bool clamped_hi = false;

    static ClampedInterval from_raw(double raw_lo, double raw_hi);
    /// Raw endpoints crossed: the data admits no state of the assumed model.
    bool inconsistent(double tol = 1e-12) const { return raw_lo > raw_hi + tol; }
};

// ---------------------------------------------------------------------------
// Overlap graph
// ---------------------------------------------------------------------------

/// Measured two-photon overlap with its standard uncertainty.
struct EdgeValue {
    double value = 0.0;
    double sigma = 0.0;
    bool clamped = false;  // raw estimate fell outside [0, 1]
};

/// Unordered photon pair, normalized so first < second.
struct PairKey {
    PhotonLabel first, second;
    PairKey(PhotonLabel a, PhotonLabel b)
        : first(a < b ? a : b), second(a < b ? b : a) {}
    auto operator<=>(const PairKey&) const = default;
};

/// Photon vertices plus measured overlap edges. The four-photon experiment
/// measures the path A-B-C-D (edges AB, BC, CD); arbitrary subsets are
/// representable.
class OverlapGraph {
public:
    OverlapGraph() = default;
    explicit OverlapGraph(std::span<const PhotonLabel> vertices);

    /// The measured chain with edges AB, BC, CD.
    static OverlapGraph chain_abcd(double r_ab, double r_bc, double r_cd,
                                   double s_ab = 0.0, double s_bc = 0.0, double s_cd = 0.0);

    void add_vertex(PhotonLabel v);

    /// Stores the value as given; range problems surface in validate().
    /// Throws SelfLoop / DuplicateEdge immediately.
    void add_edge(PhotonLabel a, PhotonLabel b, double value, double sigma = 0.0);

    /// Clamps the raw value into [0, 1] and records the clamp on the edge.
    void add_edge_clamped(PhotonLabel a, PhotonLabel b, double raw, double sigma = 0.0);

    bool has_edge(PhotonLabel a, PhotonLabel b) const;
    const EdgeValue& edge(PhotonLabel a, PhotonLabel b) const;  // throws MissingEdge
    double overlap(PhotonLabel a, PhotonLabel b) const { return edge(a, b).value; }

    const std::vector<PhotonLabel>& vertices() const { return vertices_; }
    const std::map<PairKey, EdgeValue>& edges() const { return edges_; }

    /// Returns normally iff every invariant holds.
    /// Throws OutOfRangeOverlap for edge values outside [0, 1].
    void validate() const;

private:
    std::vector<PhotonLabel> vertices_;
    std::map<PairKey, EdgeValue> edges_;
};

/// Free-function form of OverlapGraph::validate().
void validate_graph(const OverlapGraph& g);

// ---------------------------------------------------------------------------
// Distinguishability partitions and mixtures
// ---------------------------------------------------------------------------

/// A labeling of the photons into classes of mutually identical photons;
/// photons in different blocks are orthogonal. Canonical form: blocks sorted
/// by their smallest member, members sorted within each block.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<std::vector<PhotonLabel>> blocks);  // canonicalizes

    /// Two photons share a block iff their letters in `letters` are equal,
    /// e.g. "XXYY" over photons ABCD -> {A,B},{C,D}. Throws LengthMismatch.
    static Partition from_letters(std::string_view letters,
                                  std::span<const PhotonLabel> photons = default_photons());

    /// Letter rendering with blocks named X, Y, Z, W, ... in canonical order.
    std::string to_letters(std::span<const PhotonLabel> photons = default_photons()) const;

    /// All set partitions of the given photons (15 for four photons).
    static std::vector<Partition> all(std::span<const PhotonLabel> photons = default_photons());

    bool same_block(PhotonLabel a, PhotonLabel b) const;
    bool single_block() const { return blocks_.size() == 1; }
    const std::vector<std::vector<PhotonLabel>>& blocks() const { return blocks_; }
    std::vector<PhotonLabel> photons() const;

    bool operator==(const Partition&) const = default;
    auto operator<=>(const Partition&) const = default;

private:
    std::vector<std::vector<PhotonLabel>> blocks_;
};

/// Convenience alias matching the domain vocabulary.
using DistinguishabilityPartition = Partition;

/// canonical_partition("XXYY") -> {A,B},{C,D}; see Partition::from_letters.
Partition canonical_partition(std::string_view letters,
                              std::span<const PhotonLabel> photons = default_photons());

struct MixtureTerm {
    double weight = 0.0;
    Partition partition;
};

/// Convex mixture of distinguishability partitions: the classical-model
/// state. Weights are nonnegative and sum to one (1e-12); duplicate
/// partitions are merged on construction.
class MixtureModel {
public:
    MixtureModel() = default;
    explicit MixtureModel(std::vector<MixtureTerm> terms);

    const std::vector<MixtureTerm>& terms() const { return terms_; }

    /// Weight of the all-photons-identical component.
    double c1() const;

    /// Induced overlap r_ij = probability that i and j share a block.
    double pair_identity_probability(PhotonLabel a, PhotonLabel b) const;

private:
    std::vector<MixtureTerm> terms_;
};

// ---------------------------------------------------------------------------
// Mode occupations and distributions
// ---------------------------------------------------------------------------

/// Photon count per interferometer mode.
struct ModeOccupation {
    std::vector<int> n;

    ModeOccupation() = default;
    explicit ModeOccupation(std::vector<int> counts) : n(std::move(counts)) {}

    int total() const;
    int modes() const { return static_cast<int>(n.size()); }
    auto operator<=>(const ModeOccupation&) const = default;

    std::string to_string() const;  // "(1,1,0,0,1,1)"
};

/// Probability map over mode occupations. Map ordering is lexicographic in
/// the occupation vector, which fixes the output ordering everywhere.
struct OutputDistribution {
    std::map<ModeOccupation, double> p;

    double total() const;
    double probability(const ModeOccupation& occ) const;
    void add(const ModeOccupation& occ, double prob);
    /// Scales to total 1. Throws EmptyPostselection on zero mass.
    void normalize();
};

}  // namespace indist
