#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "indist/matrix.hpp"
#include "indist/types.hpp"

namespace indist::sim {

// ---------------------------------------------------------------------------
// Apparatus description. Mode indices are 0-based internally; file formats
// and printed occupations use 1-based mode numbers.
// ---------------------------------------------------------------------------

struct BeamSplitter {
    int mode_a = 0;
    int mode_b = 1;
    double reflectivity = 0.5;
};

struct InterferometerSpec {
    int mode_count = 6;
    std::vector<BeamSplitter> layer1;
    std::vector<BeamSplitter> layer2;
    std::vector<double> mode_loss;  // per-mode transmission between the layers

    void validate() const;  // throws DimensionMismatch / Error
};

struct SourceSpec {
    double g = 0.1;  // squeezing parameter; pair emission odds scale as tanh^2 g
    std::map<PhotonLabel, int> injected_modes = {
        {'A', 0}, {'B', 1}, {'C', 4}, {'D', 5}};
    bool include_six_photon_terms = true;

    /// p(1,1,0,0,1,1) = p(2,2,0,0,0,0) = p(0,0,0,0,2,2) = tanh^4 g / cosh^4 g.
    double four_photon_probability() const;
    /// p(2,2,0,0,1,1) = p(1,1,0,0,2,2) = tanh^6 g / cosh^4 g.
    double six_photon_probability() const;
};

struct DetectionSpec {
    /// Per output mode, probability that a photon routes to the paired
    /// detector rather than the primary one.
    std::vector<double> mmfbs_reflectivity = std::vector<double>(6, 0.5);
    double eta_det = 1.0;

    /// 1 - (1 - eta)^n for n photons on one detector.
    double click_probability(int photons) const;
};

/// Balanced circuit: two 50/50 splitters on modes (2,3) and (4,5), three
/// 50/50 splitters on (1,2), (3,4), (5,6) [1-based], no loss.
InterferometerSpec six_mode_ideal();

/// Same circuit with the measured reflectivities (layer 2: 0.515, 0.507,
/// 0.498) and the measured loss budget (0.4 x 0.7 x 0.7 per mode, extra
/// 0.625 on mode 5).
InterferometerSpec six_mode_measured();

DetectionSpec detection_ideal();
DetectionSpec detection_measured();

/// 6x6 transfer matrix of both layers (layer 1 applied first). Each element
/// is the real orthogonal [[sqrt(R), sqrt(1-R)], [sqrt(1-R), -sqrt(R)]].
Mat transfer_matrix(const InterferometerSpec& spec);

// ---------------------------------------------------------------------------
// Evolution under partial distinguishability
// ---------------------------------------------------------------------------

/// One coherent block of mutually identical photons occupying the listed
/// input modes (repeats allowed) evolving under u: P(T) comes from the
/// permanent of the row/column-selected submatrix.
std::map<ModeOccupation, double> evolve_block(const Mat& u, std::vector<int> input_modes);

/// Independent combination of per-block distributions.
std::map<ModeOccupation, double> convolve(const std::map<ModeOccupation, double>& a,
                                          const std::map<ModeOccupation, double>& b);

/// Output distribution for photons grouped into distinguishability blocks:
/// photons within a block interfere, distinct blocks combine independently.
OutputDistribution evolve_blocks(const Mat& u, const std::vector<std::vector<int>>& blocks,
                                 int modes);

/// Lossless evolution of `input` through the circuit with the photons of
/// `partition` placed per the source mapping. For inputs that double a
/// photon's mode (multi-pair emission) the duplicates join their sibling's
/// block. Throws DimensionMismatch when input and source mapping disagree.
OutputDistribution evolve_partition(const InterferometerSpec& spec,
                                    const ModeOccupation& input, const Partition& partition,
                                    const SourceSpec& source = SourceSpec{});

/// Weighted sum of evolve_partition over the mixture terms.
OutputDistribution evolve_mixture(const InterferometerSpec& spec, const ModeOccupation& input,
                                  const MixtureModel& mixture,
                                  const SourceSpec& source = SourceSpec{});

/// The eight-configuration mixture with product weights
/// V_AB V_BC V_CD, (1-V_AB) V_BC V_CD, ... down to the fully distinguishable
/// term; weights sum to one identically.
MixtureModel build_rho_source(double v_ab, double v_bc, double v_cd);

// ---------------------------------------------------------------------------
// Reachability and post-selection
// ---------------------------------------------------------------------------

/// Output occupations with nonzero amplitude for at least one partition
/// (equivalently, the support of the fully distinguishable case).
std::set<ModeOccupation> enumerate_reachable_outputs(const InterferometerSpec& spec,
                                                     const ModeOccupation& input);

enum class InputClass { input_110011, input_220000, input_000022, forbidden };

/// Maps four-photon output occupations to the unique double-pair input able
/// to produce them. Built once per circuit; construction verifies that the
/// three reachable sets are pairwise disjoint.
class OutputClassifier {
public:
    explicit OutputClassifier(const InterferometerSpec& spec,
                              const SourceSpec& source = SourceSpec{});

    /// Throws WrongPhotonNumber unless occ totals four photons.
    InputClass classify(const ModeOccupation& occ) const;

    const std::set<ModeOccupation>& reachable(InputClass c) const;
    const ModeOccupation& generator_input(InputClass c) const;

private:
    std::array<std::set<ModeOccupation>, 3> sets_;
    std::array<ModeOccupation, 3> inputs_;
};

struct PostselectResult {
    OutputDistribution retained;  // renormalized
    double retained_mass = 0.0;
    double discarded_mass = 0.0;
};

/// Keep only outcomes classified as the (1,1,0,0,1,1) input, renormalize.
/// Throws EmptyPostselection when nothing survives.
PostselectResult postselect(const OutputDistribution& dist, const OutputClassifier& classifier);

// ---------------------------------------------------------------------------
// Losses, pseudo-number-resolving detection, click patterns
// ---------------------------------------------------------------------------

/// Bit d set = detector d clicked; detectors (2j, 2j+1) watch output mode j.
using ClickPattern = std::uint16_t;
using ClickDistribution = std::map<ClickPattern, double>;

/// Classical loss + detection applied to a distribution over true output
/// occupations: each photon independently survives its mode's transmission,
/// survivors route through the mode's splitter to one of the paired
/// detectors, and each detector clicks per 1 - (1 - eta)^n.
ClickDistribution apply_losses_and_detection(const OutputDistribution& dist,
                                             const DetectionSpec& det,
                                             const std::vector<double>& mode_transmission);

/// Occupations inferred from click patterns with exactly four clicks
/// (clicks per detector pair). Mass below 1 when other click counts occur.
OutputDistribution fourfold_occupations(const ClickDistribution& clicks);

/// Full noise model: multi-pair source terms evolve coherently through both
/// layers with the mode losses placed between them (loss realized exactly as
/// beam splitters into environment modes), then detection. Returns the click
/// distribution; use fourfold_occupations + postselect downstream.
ClickDistribution simulate_noisy(const InterferometerSpec& spec, const SourceSpec& source,
                                 const DetectionSpec& det, const MixtureModel& mixture);

// ---------------------------------------------------------------------------
// Overlap estimation from post-selected outcomes
// ---------------------------------------------------------------------------

struct EstimatorOptions {
    enum class Correction { off, on, automatic };
    /// Reflectivities of the three interfering splitters, pair order
    /// (1,2), (3,4), (5,6). Used only by the bias correction.
    std::array<double, 3> layer2_reflectivity = {0.5, 0.5, 0.5};
    /// automatic: correct a pair iff its reflectivity is off 1/2 by > 0.005.
    Correction correction = Correction::automatic;
};

/// Labels measured by the three splitter pairs for a given injection,
/// order (1,2), (3,4), (5,6): the middle pair interferes the photons
/// injected on modes 2 and 5 [1-based].
std::array<PairKey, 3> measured_edges(const SourceSpec& source);

/// Bunching-based overlap estimation: condition each splitter pair on
/// exactly two photons inside it; the bunched fraction gives p_b and
/// r = 2 p_b - 1 (or the reflectivity-corrected inversion). Estimates are
/// clamped into [0, 1] with the clamp recorded on the edge.
/// Throws NoConditionedEvents when a pair never holds exactly two photons.
OverlapGraph estimate_overlaps_from_distribution(const OutputDistribution& dist,
                                                 const SourceSpec& source = SourceSpec{},
                                                 const EstimatorOptions& options = {});

/// Swapped injection C->1, D->2, A->5, B->6 [1-based]: the measured chain
/// becomes C-D-A-B and the middle splitter estimates r_AD. Involution.
SourceSpec swap_to_cdab(const SourceSpec& source);

}  // namespace indist::sim
