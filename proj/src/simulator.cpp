#include "indist/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace indist::sim {

// ---------------------------------------------------------------------------
// Specs and factories
// ---------------------------------------------------------------------------

void InterferometerSpec::validate() const {
    if (mode_count <= 0) throw DimensionMismatch("mode_count must be positive");
    auto check_layer = [&](const std::vector<BeamSplitter>& layer, const char* name) {
        std::vector<bool> used(mode_count, false);
        for (const auto& bs : layer) {
            if (bs.mode_a < 0 || bs.mode_a >= mode_count || bs.mode_b < 0 ||
                bs.mode_b >= mode_count || bs.mode_a == bs.mode_b)
                throw DimensionMismatch(std::string(name) + ": bad mode pair");
            if (used[bs.mode_a] || used[bs.mode_b])
                throw Error(std::string(name) + ": mode pairs must be disjoint");
            used[bs.mode_a] = used[bs.mode_b] = true;
            if (!(bs.reflectivity >= 0.0 && bs.reflectivity <= 1.0))
                throw Error(std::string(name) + ": reflectivity outside [0, 1]");
        }
    };
    check_layer(layer1, "layer1");
    check_layer(layer2, "layer2");
    if (!mode_loss.empty() && static_cast<int>(mode_loss.size()) != mode_count)
        throw DimensionMismatch("mode_loss length does not match mode_count");
    for (double eta : mode_loss)
        if (!(eta >= 0.0 && eta <= 1.0)) throw Error("mode transmission outside [0, 1]");
}

double SourceSpec::four_photon_probability() const {
    const double t = std::tanh(g), c = std::cosh(g);
    return std::pow(t, 4) / std::pow(c, 4);
}

double SourceSpec::six_photon_probability() const {
    const double t = std::tanh(g), c = std::cosh(g);
    return std::pow(t, 6) / std::pow(c, 4);
}

double DetectionSpec::click_probability(int photons) const {
    return 1.0 - std::pow(1.0 - eta_det, photons);
}

InterferometerSpec six_mode_ideal() {
    InterferometerSpec spec;
    spec.mode_count = 6;
    spec.layer1 = {{1, 2, 0.5}, {3, 4, 0.5}};
    spec.layer2 = {{0, 1, 0.5}, {2, 3, 0.5}, {4, 5, 0.5}};
    spec.mode_loss = std::vector<double>(6, 1.0);
    return spec;
}

InterferometerSpec six_mode_measured() {
    InterferometerSpec spec;
    spec.mode_count = 6;
    spec.layer1 = {{1, 2, 0.5}, {3, 4, 0.5}};
    spec.layer2 = {{0, 1, 0.515}, {2, 3, 0.507}, {4, 5, 0.498}};
    // fiber coupling from the source x delay-line coupling x splitter
    // insertion; mode 5 [1-based] carries an extra coupling stage
    const double eta = 0.4 * 0.7 * 0.7;
    spec.mode_loss = std::vector<double>(6, eta);
    spec.mode_loss[4] = eta * 0.625;
    return spec;
}

DetectionSpec detection_ideal() { return DetectionSpec{}; }

DetectionSpec detection_measured() {
    DetectionSpec det;
    det.mmfbs_reflectivity = {0.65, 0.77, 0.72, 0.77, 0.47, 0.15};
    det.eta_det = 0.6;
    return det;
}

Mat transfer_matrix(const InterferometerSpec& spec) {
    spec.validate();
    auto layer_matrix = [&](const std::vector<BeamSplitter>& layer) {
        Mat m = Mat::identity(spec.mode_count);
        for (const auto& bs : layer) {
            const double r = std::sqrt(bs.reflectivity);
            const double t = std::sqrt(1.0 - bs.reflectivity);
            m(bs.mode_a, bs.mode_a) = r;
            m(bs.mode_a, bs.mode_b) = t;
            m(bs.mode_b, bs.mode_a) = t;
            m(bs.mode_b, bs.mode_b) = -r;
        }
        return m;
    };
    return layer_matrix(spec.layer2) * layer_matrix(spec.layer1);
}

// ---------------------------------------------------------------------------
// Block evolution
// ---------------------------------------------------------------------------

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double occupation_factorial(const std::vector<int>& occ) {
    double f = 1.0;
    for (int n : occ) f *= factorial(n);
    return f;
}

}  // namespace

std::map<ModeOccupation, double> evolve_block(const Mat& u, std::vector<int> input_modes) {
    const int modes = u.rows();
    const int k = static_cast<int>(input_modes.size());
    std::sort(input_modes.begin(), input_modes.end());

    std::vector<int> in_occ(modes, 0);
    for (int m : input_modes) {
        if (m < 0 || m >= modes) throw DimensionMismatch("input mode outside circuit");
        ++in_occ[m];
    }
    const double in_fact = occupation_factorial(in_occ);

    std::map<ModeOccupation, double> dist;
    if (k == 0) {
        dist[ModeOccupation(std::vector<int>(modes, 0))] = 1.0;
        return dist;
    }

    std::vector<int> occ(modes, 0);
    Mat sub(k, k);
    std::function<void(int, int)> rec = [&](int mode, int remaining) {
        if (mode == modes - 1) {
            occ[mode] = remaining;
            // rows: output modes with multiplicity, cols: input modes
            int row = 0;
            for (int j = 0; j < modes; ++j)
                for (int rep = 0; rep < occ[j]; ++rep) {
                    for (int c = 0; c < k; ++c) sub(row, c) = u(j, input_modes[c]);
                    ++row;
                }
            const double amp = permanent_ryser(sub);
            if (amp != 0.0) {
                const double prob = amp * amp / (in_fact * occupation_factorial(occ));
                if (prob > 0.0) dist[ModeOccupation(occ)] += prob;
            }
            occ[mode] = 0;
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            occ[mode] = c;
            rec(mode + 1, remaining - c);
        }
        occ[mode] = 0;
    };
    rec(0, k);
    return dist;
}

std::map<ModeOccupation, double> convolve(const std::map<ModeOccupation, double>& a,
                                          const std::map<ModeOccupation, double>& b) {
    std::map<ModeOccupation, double> out;
    for (const auto& [occ_a, p_a] : a)
        for (const auto& [occ_b, p_b] : b) {
            std::vector<int> sum = occ_a.n;
            for (size_t i = 0; i < sum.size(); ++i) sum[i] += occ_b.n[i];
            out[ModeOccupation(std::move(sum))] += p_a * p_b;
        }
    return out;
}

OutputDistribution evolve_blocks(const Mat& u, const std::vector<std::vector<int>>& blocks,
                                 int modes) {
    std::map<ModeOccupation, double> acc;
    acc[ModeOccupation(std::vector<int>(modes, 0))] = 1.0;
    for (const auto& block : blocks)
        if (!block.empty()) acc = convolve(acc, evolve_block(u, block));
    OutputDistribution out;
    out.p = std::move(acc);
    return out;
}

namespace {

// Photon placement for one generator input: which labels sit where and with
// what multiplicity. Duplicated photons share their sibling's internal state.
std::vector<std::vector<int>> blocks_for(const ModeOccupation& input,
                                         const Partition& partition,
                                         const SourceSpec& source) {
    std::map<int, PhotonLabel> label_at;
    for (const auto& [label, mode] : source.injected_modes) label_at[mode] = label;

    std::vector<std::vector<int>> blocks;
    for (const auto& block : partition.blocks()) {
        std::vector<int> modes;
        for (PhotonLabel label : block) {
            const auto it = source.injected_modes.find(label);
            if (it == source.injected_modes.end()) continue;
            const int mode = it->second;
            if (mode < 0 || mode >= input.modes()) throw DimensionMismatch("injection outside circuit");
            for (int rep = 0; rep < input.n[mode]; ++rep) modes.push_back(mode);
        }
        if (!modes.empty()) blocks.push_back(std::move(modes));
    }
    // every occupied mode must carry a label
    int placed = 0;
    for (const auto& b : blocks) placed += static_cast<int>(b.size());
    if (placed != input.total())
        throw DimensionMismatch("input occupation does not match the source mapping");
    return blocks;
}

}  // namespace

OutputDistribution evolve_partition(const InterferometerSpec& spec, const ModeOccupation& input,
                                    const Partition& partition, const SourceSpec& source) {
    if (input.modes() != spec.mode_count)
        throw DimensionMismatch("occupation length does not match mode count");
    const Mat u = transfer_matrix(spec);
    return evolve_blocks(u, blocks_for(input, partition, source), spec.mode_count);
}

OutputDistribution evolve_mixture(const InterferometerSpec& spec, const ModeOccupation& input,
                                  const MixtureModel& mixture, const SourceSpec& source) {
    OutputDistribution out;
    for (const auto& term : mixture.terms()) {
        if (term.weight == 0.0) continue;
        const OutputDistribution part = evolve_partition(spec, input, term.partition, source);
        for (const auto& [occ, prob] : part.p) out.add(occ, term.weight * prob);
    }
    return out;
}

MixtureModel build_rho_source(double v_ab, double v_bc, double v_cd) {
    for (double v : {v_ab, v_bc, v_cd})
        if (!(v >= 0.0 && v <= 1.0)) throw OutOfRangeOverlap("visibility outside [0, 1]");
    std::vector<MixtureTerm> terms;
    for (int coins = 0; coins < 8; ++coins) {
        const bool ab = coins & 1, bc = coins & 2, cd = coins & 4;
        const double w = (ab ? v_ab : 1.0 - v_ab) * (bc ? v_bc : 1.0 - v_bc) *
                         (cd ? v_cd : 1.0 - v_cd);
        if (w == 0.0) continue;
        int cls[4] = {0, 1, 2, 3};
        auto unite = [&](int x, int y) {
            const int from = cls[y], to = cls[x];
            for (int& c : cls)
                if (c == from) c = to;
        };
        if (ab) unite(0, 1);
        if (bc) unite(1, 2);
        if (cd) unite(2, 3);
        std::vector<std::vector<PhotonLabel>> blocks;
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<PhotonLabel> block;
            for (int i = 0; i < 4; ++i)
                if (cls[i] == rep) block.push_back(static_cast<PhotonLabel>('A' + i));
            if (!block.empty()) blocks.push_back(std::move(block));
        }
        terms.push_back({w, Partition(std::move(blocks))});
    }
    return MixtureModel(std::move(terms));
}

// ---------------------------------------------------------------------------
// Reachability and classification
// ---------------------------------------------------------------------------

std::set<ModeOccupation> enumerate_reachable_outputs(const InterferometerSpec& spec,
                                                     const ModeOccupation& input) {
    if (input.modes() != spec.mode_count)
        throw DimensionMismatch("occupation length does not match mode count");
    const Mat u = transfer_matrix(spec);
    const int modes = spec.mode_count;

    // single-photon supports per input mode
    std::vector<std::vector<int>> support(modes);
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j)
            if (std::abs(u(j, i)) > 1e-12) support[i].push_back(j);

    std::vector<int> slots;
    for (int m = 0; m < modes; ++m)
        for (int rep = 0; rep < input.n[m]; ++rep) slots.push_back(m);

    std::set<ModeOccupation> out;
    std::vector<int> occ(modes, 0);
    std::function<void(size_t)> rec = [&](size_t slot) {
        if (slot == slots.size()) {
            out.insert(ModeOccupation(occ));
            return;
        }
        for (int j : support[slots[slot]]) {
            ++occ[j];
            rec(slot + 1);
            --occ[j];
        }
    };
    rec(0);
    return out;
}

OutputClassifier::OutputClassifier(const InterferometerSpec& spec, const SourceSpec& source) {
    const int m = spec.mode_count;
    if (m != 6) throw DimensionMismatch("output classification assumes the six-mode circuit");
    // the double-pair generator inputs assume one source on modes (1,2) and
    // one on (5,6) [1-based], whatever the photon labels
    std::set<int> occupied;
    for (const auto& [label, mode] : source.injected_modes) occupied.insert(mode);
    if (occupied != std::set<int>{0, 1, 4, 5})
        throw DimensionMismatch("source mapping must populate modes 1, 2, 5, 6");
    inputs_[0] = ModeOccupation({1, 1, 0, 0, 1, 1});
    inputs_[1] = ModeOccupation({2, 2, 0, 0, 0, 0});
    inputs_[2] = ModeOccupation({0, 0, 0, 0, 2, 2});
    for (int i = 0; i < 3; ++i) sets_[i] = enumerate_reachable_outputs(spec, inputs_[i]);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (const auto& occ : sets_[i])
                if (sets_[j].count(occ))
                    throw Error("reachable output sets are not disjoint; post-selection "
                                "would be ambiguous");
}

InputClass OutputClassifier::classify(const ModeOccupation& occ) const {
    if (occ.total() != 4)
        throw WrongPhotonNumber("classification needs a four-photon occupation, got " +
                                std::to_string(occ.total()));
    if (sets_[0].count(occ)) return InputClass::input_110011;
    if (sets_[1].count(occ)) return InputClass::input_220000;
    if (sets_[2].count(occ)) return InputClass::input_000022;
    return InputClass::forbidden;
}

const std::set<ModeOccupation>& OutputClassifier::reachable(InputClass c) const {
    return sets_[static_cast<int>(c)];
}

const ModeOccupation& OutputClassifier::generator_input(InputClass c) const {
    return inputs_[static_cast<int>(c)];
}

PostselectResult postselect(const OutputDistribution& dist, const OutputClassifier& classifier) {
    PostselectResult out;
    double retained = 0.0, discarded = 0.0;
    for (const auto& [occ, prob] : dist.p) {
        if (occ.total() == 4 && classifier.classify(occ) == InputClass::input_110011) {
            out.retained.add(occ, prob);
            retained += prob;
        } else {
            discarded += prob;
        }
    }
    if (retained <= 0.0)
        throw EmptyPostselection("no outcome corresponds to the (1,1,0,0,1,1) input");
    out.retained_mass = retained;
    out.discarded_mass = discarded;
    for (auto& [occ, prob] : out.retained.p) prob /= retained;
    return out;
}

// ---------------------------------------------------------------------------
// Losses and detection
// ---------------------------------------------------------------------------

namespace {

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// Distribution over the pair (primary clicked, partner clicked) for one
// output mode holding n photons.
std::array<double, 4> mode_click_distribution(int n, double transmission, double rho,
                                              const DetectionSpec& det) {
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    for (int survivors = 0; survivors <= n; ++survivors) {
        const double p_surv = binom(n, survivors) * std::pow(transmission, survivors) *
                              std::pow(1.0 - transmission, n - survivors);
        if (p_surv == 0.0) continue;
        for (int to_partner = 0; to_partner <= survivors; ++to_partner) {
            const double p_split = binom(survivors, to_partner) * std::pow(rho, to_partner) *
                                   std::pow(1.0 - rho, survivors - to_partner);
            if (p_split == 0.0) continue;
            const double p_primary = det.click_probability(survivors - to_partner);
            const double p_partner = det.click_probability(to_partner);
            const double base = p_surv * p_split;
            out[0] += base * (1.0 - p_primary) * (1.0 - p_partner);
            out[1] += base * p_primary * (1.0 - p_partner);
            out[2] += base * (1.0 - p_primary) * p_partner;
            out[3] += base * p_primary * p_partner;
        }
    }
    return out;
}

ClickDistribution clicks_for_occupation(const ModeOccupation& occ, const DetectionSpec& det,
                                        const std::vector<double>& transmission) {
    ClickDistribution acc;
    acc[0] = 1.0;
    for (int mode = 0; mode < occ.modes(); ++mode) {
        const double eta = transmission.empty() ? 1.0 : transmission[mode];
        const double rho = det.mmfbs_reflectivity[mode];
        const auto per_mode = mode_click_distribution(occ.n[mode], eta, rho, det);
        ClickDistribution next;
        for (const auto& [pattern, prob] : acc)
            for (int bits = 0; bits < 4; ++bits) {
                if (per_mode[bits] == 0.0) continue;
                const ClickPattern extended =
                    pattern | static_cast<ClickPattern>(bits << (2 * mode));
                next[extended] += prob * per_mode[bits];
            }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

ClickDistribution apply_losses_and_detection(const OutputDistribution& dist,
                                             const DetectionSpec& det,
                                             const std::vector<double>& mode_transmission) {
    ClickDistribution out;
    for (const auto& [occ, prob] : dist.p) {
        if (static_cast<int>(det.mmfbs_reflectivity.size()) < occ.modes())
            throw DimensionMismatch("detection spec does not cover all modes");
        for (const auto& [pattern, p] : clicks_for_occupation(occ, det, mode_transmission))
            out[pattern] += prob * p;
    }
    return out;
}

OutputDistribution fourfold_occupations(const ClickDistribution& clicks) {
    OutputDistribution out;
    for (const auto& [pattern, prob] : clicks) {
        if (std::popcount(pattern) != 4) continue;
        std::vector<int> occ(6, 0);
        for (int mode = 0; mode < 6; ++mode)
            occ[mode] = ((pattern >> (2 * mode)) & 1) + ((pattern >> (2 * mode + 1)) & 1);
        out.add(ModeOccupation(std::move(occ)), prob);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full noise pipeline: losses realized between the layers as beam splitters
// into environment modes, so partially distinguishable photons keep their
// coherence through the loss.
// ---------------------------------------------------------------------------

namespace {

Mat lossy_transfer_matrix(const InterferometerSpec& spec) {
    const int m = spec.mode_count;
    auto embed = [&](const std::vector<BeamSplitter>& layer) {
        Mat full = Mat::identity(2 * m);
        for (const auto& bs : layer) {
            const double r = std::sqrt(bs.reflectivity);
            const double t = std::sqrt(1.0 - bs.reflectivity);
            full(bs.mode_a, bs.mode_a) = r;
            full(bs.mode_a, bs.mode_b) = t;
            full(bs.mode_b, bs.mode_a) = t;
            full(bs.mode_b, bs.mode_b) = -r;
        }
        return full;
    };
    Mat loss = Mat::identity(2 * m);
    for (int i = 0; i < m; ++i) {
        const double eta = spec.mode_loss.empty() ? 1.0 : spec.mode_loss[i];
        const double keep = std::sqrt(eta);
        const double leak = std::sqrt(1.0 - eta);
        loss(i, i) = keep;
        loss(i, m + i) = leak;
        loss(m + i, i) = leak;
        loss(m + i, m + i) = -keep;
    }
    return embed(spec.layer2) * (loss * embed(spec.layer1));
}

struct SourceTerm {
    double probability;
    ModeOccupation occupation;
};

std::vector<SourceTerm> source_terms(const SourceSpec& source) {
    std::vector<SourceTerm> terms;
    const double p4 = source.four_photon_probability();
    terms.push_back({p4, ModeOccupation({1, 1, 0, 0, 1, 1})});
    terms.push_back({p4, ModeOccupation({2, 2, 0, 0, 0, 0})});
    terms.push_back({p4, ModeOccupation({0, 0, 0, 0, 2, 2})});
    if (source.include_six_photon_terms) {
        const double p6 = source.six_photon_probability();
        terms.push_back({p6, ModeOccupation({2, 2, 0, 0, 1, 1})});
        terms.push_back({p6, ModeOccupation({1, 1, 0, 0, 2, 2})});
    }
    return terms;
}

}  // namespace

ClickDistribution simulate_noisy(const InterferometerSpec& spec, const SourceSpec& source,
                                 const DetectionSpec& det, const MixtureModel& mixture) {
    spec.validate();
    const int m = spec.mode_count;
    const Mat lossy = lossy_transfer_matrix(spec);
    const std::vector<double> no_extra_loss;  // loss already inside the matrix

    ClickDistribution out;
    double total_weight = 0.0;
    for (const auto& term : source_terms(source)) {
        for (const auto& mix : mixture.terms()) {
            if (mix.weight == 0.0) continue;
            const double weight = term.probability * mix.weight;
            // Evolve each block over system + environment, drop the
            // environment occupation per block (projection commutes with
            // the independent combination), then combine in system space.
            std::map<ModeOccupation, double> system;
            system[ModeOccupation(std::vector<int>(m, 0))] = 1.0;
            for (const auto& block : blocks_for(term.occupation, mix.partition, source)) {
                std::map<ModeOccupation, double> marginal;
                for (const auto& [occ, prob] : evolve_block(lossy, block)) {
                    std::vector<int> sys(occ.n.begin(), occ.n.begin() + m);
                    marginal[ModeOccupation(std::move(sys))] += prob;
                }
                system = convolve(system, marginal);
            }
            OutputDistribution system_dist;
            system_dist.p = std::move(system);
            for (const auto& [pattern, p] :
                 apply_losses_and_detection(system_dist, det, no_extra_loss))
                out[pattern] += weight * p;
            total_weight += weight;
        }
    }
    // conditional on one of the modeled emission events
    for (auto& [pattern, prob] : out) prob /= total_weight;
    return out;
}

// ---------------------------------------------------------------------------
// Overlap estimation
// ---------------------------------------------------------------------------

std::array<PairKey, 3> measured_edges(const SourceSpec& source) {
    std::map<int, PhotonLabel> label_at;
    for (const auto& [label, mode] : source.injected_modes) label_at[mode] = label;
    for (int mode : {0, 1, 4, 5})
        if (!label_at.count(mode))
            throw DimensionMismatch("source mapping must populate modes 1, 2, 5, 6");
    return {PairKey(label_at[0], label_at[1]), PairKey(label_at[1], label_at[4]),
            PairKey(label_at[4], label_at[5])};
}

OverlapGraph estimate_overlaps_from_distribution(const OutputDistribution& dist,
                                                 const SourceSpec& source,
                                                 const EstimatorOptions& options) {
    const auto edges = measured_edges(source);
    OverlapGraph g;
    for (int pair = 0; pair < 3; ++pair) {
        const int m1 = 2 * pair, m2 = 2 * pair + 1;
        double conditioned = 0.0, bunched = 0.0;
        for (const auto& [occ, prob] : dist.p) {
            if (occ.n[m1] + occ.n[m2] != 2) continue;
            conditioned += prob;
            if (occ.n[m1] == 2 || occ.n[m2] == 2) bunched += prob;
        }
        if (conditioned <= 0.0)
            throw NoConditionedEvents("no outcome with exactly two photons in splitter pair " +
                                      std::to_string(pair + 1));
        const double p_b = bunched / conditioned;
        const double r = options.layer2_reflectivity[pair];
        const bool correct =
            options.correction == EstimatorOptions::Correction::on ||
            (options.correction == EstimatorOptions::Correction::automatic &&
             std::abs(r - 0.5) > 0.005);
        if (correct && 2.0 * r * (1.0 - r) < 1e-6)
            throw Error("splitter pair " + std::to_string(pair + 1) +
                        " is too unbalanced for the bunching correction");
        const double raw =
            correct ? p_b / (2.0 * r * (1.0 - r)) - 1.0 : 2.0 * p_b - 1.0;
        g.add_edge_clamped(edges[pair].first, edges[pair].second, raw);
    }
    return g;
}

SourceSpec swap_to_cdab(const SourceSpec& source) {
    SourceSpec swapped = source;
    auto& map = swapped.injected_modes;
    std::swap(map.at('A'), map.at('C'));
    std::swap(map.at('B'), map.at('D'));
    return swapped;
}

}  // namespace indist::sim
