#include "indist/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace indist {

namespace {
constexpr std::array<PhotonLabel, 4> kDefaultPhotons = {'A', 'B', 'C', 'D'};
}

std::span<const PhotonLabel> default_photons() {
    return {kDefaultPhotons.data(), kDefaultPhotons.size()};
}

Clamped clamp01(double raw) {
    if (raw < 0.0) return {0.0, true};
    if (raw > 1.0) return {1.0, true};
    return {raw, false};
}

ClampedInterval ClampedInterval::from_raw(double raw_lo, double raw_hi) {
    ClampedInterval out;
    out.raw_lo = raw_lo;
    out.raw_hi = raw_hi;
    const Clamped lo = clamp01(raw_lo);
    const Clamped hi = clamp01(raw_hi);
    out.value = {lo.value, hi.value};
    out.clamped_lo = lo.was_clamped;
    out.clamped_hi = hi.was_clamped;
    return out;
}

// ---------------------------------------------------------------------------
// OverlapGraph
// ---------------------------------------------------------------------------

OverlapGraph::OverlapGraph(std::span<const PhotonLabel> vertices)
    : vertices_(vertices.begin(), vertices.end()) {}

OverlapGraph OverlapGraph::chain_abcd(double r_ab, double r_bc, double r_cd,
                                      double s_ab, double s_bc, double s_cd) {
    OverlapGraph g(default_photons());
    g.add_edge('A', 'B', r_ab, s_ab);
    g.add_edge('B', 'C', r_bc, s_bc);
    g.add_edge('C', 'D', r_cd, s_cd);
    return g;
}

void OverlapGraph::add_vertex(PhotonLabel v) {
    if (std::find(vertices_.begin(), vertices_.end(), v) == vertices_.end())
        vertices_.push_back(v);
}

void OverlapGraph::add_edge(PhotonLabel a, PhotonLabel b, double value, double sigma) {
    if (a == b) throw SelfLoop(std::string("self-loop edge on photon ") + a);
    add_vertex(a);
    add_vertex(b);
    const PairKey key(a, b);
    if (edges_.count(key))
        throw DuplicateEdge(std::string("edge ") + key.first + key.second + " already present");
    edges_[key] = EdgeValue{value, sigma, false};
}

void OverlapGraph::add_edge_clamped(PhotonLabel a, PhotonLabel b, double raw, double sigma) {
    const Clamped c = clamp01(raw);
    add_edge(a, b, c.value, sigma);
    edges_[PairKey(a, b)].clamped = c.was_clamped;
}

bool OverlapGraph::has_edge(PhotonLabel a, PhotonLabel b) const {
    return edges_.count(PairKey(a, b)) != 0;
}

const EdgeValue& OverlapGraph::edge(PhotonLabel a, PhotonLabel b) const {
    const auto it = edges_.find(PairKey(a, b));
    if (it == edges_.end())
        throw MissingEdge(std::string("no edge ") + a + b + " in overlap graph");
    return it->second;
}

void OverlapGraph::validate() const {
    for (const auto& [key, e] : edges_) {
        if (!(e.value >= 0.0 && e.value <= 1.0))
            throw OutOfRangeOverlap(std::string("overlap ") + key.first + key.second + " = " +
                                    std::to_string(e.value) + " outside [0, 1]");
        if (e.sigma < 0.0)
            throw OutOfRangeOverlap(std::string("negative sigma on edge ") + key.first + key.second);
    }
    // Self-loops and duplicates cannot be constructed through the API, but a
    // default-constructed graph may carry no vertices; both states are valid.
}

void validate_graph(const OverlapGraph& g) { g.validate(); }

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

Partition::Partition(std::vector<std::vector<PhotonLabel>> blocks) : blocks_(std::move(blocks)) {
    for (auto& block : blocks_) std::sort(block.begin(), block.end());
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition Partition::from_letters(std::string_view letters, std::span<const PhotonLabel> photons) {
    if (letters.size() != photons.size())
        throw LengthMismatch("class string length " + std::to_string(letters.size()) +
                             " does not match photon count " + std::to_string(photons.size()));
    std::map<char, std::vector<PhotonLabel>> by_class;
    for (size_t i = 0; i < letters.size(); ++i) by_class[letters[i]].push_back(photons[i]);
    std::vector<std::vector<PhotonLabel>> blocks;
    blocks.reserve(by_class.size());
    for (auto& [cls, members] : by_class) blocks.push_back(std::move(members));
    return Partition(std::move(blocks));
}

std::string Partition::to_letters(std::span<const PhotonLabel> photons) const {
    // Blocks are named X, Y, Z, W, then V, U, ... in canonical block order.
    static constexpr char kNames[] = {'X', 'Y', 'Z', 'W', 'V', 'U', 'T', 'S'};
    std::string out(photons.size(), '?');
    for (size_t b = 0; b < blocks_.size(); ++b) {
        for (PhotonLabel member : blocks_[b]) {
            const auto it = std::find(photons.begin(), photons.end(), member);
            if (it == photons.end())
                throw LengthMismatch("partition member not among the given photons");
            out[static_cast<size_t>(it - photons.begin())] = kNames[b % sizeof(kNames)];
        }
    }
    return out;
}

std::vector<Partition> Partition::all(std::span<const PhotonLabel> photons) {
    // Restricted growth strings: element i may join blocks 0..max_so_far+1.
    std::vector<Partition> out;
    const size_t n = photons.size();
    std::vector<int> assign(n, 0);
    // depth-first over assignments
    struct Frame { size_t i; int next_free; };
    auto emit = [&] {
        int block_count = 0;
        for (size_t i = 0; i < n; ++i) block_count = std::max(block_count, assign[i] + 1);
        std::vector<std::vector<PhotonLabel>> blocks(block_count);
        for (size_t i = 0; i < n; ++i) blocks[assign[i]].push_back(photons[i]);
        out.emplace_back(std::move(blocks));
    };
    auto rec = [&](auto&& self, size_t i, int next_free) -> void {
        if (i == n) {
            emit();
            return;
        }
        for (int b = 0; b <= next_free; ++b) {
            assign[i] = b;
            self(self, i + 1, std::max(next_free, b + 1));
        }
    };
    rec(rec, 0, 0);
    return out;
}

bool Partition::same_block(PhotonLabel a, PhotonLabel b) const {
    for (const auto& block : blocks_) {
        const bool has_a = std::find(block.begin(), block.end(), a) != block.end();
        const bool has_b = std::find(block.begin(), block.end(), b) != block.end();
        if (has_a || has_b) return has_a && has_b;
    }
    return false;
}

std::vector<PhotonLabel> Partition::photons() const {
    std::vector<PhotonLabel> out;
    for (const auto& block : blocks_) out.insert(out.end(), block.begin(), block.end());
    std::sort(out.begin(), out.end());
    return out;
}

Partition canonical_partition(std::string_view letters, std::span<const PhotonLabel> photons) {
    return Partition::from_letters(letters, photons);
}

// ---------------------------------------------------------------------------
// MixtureModel
// ---------------------------------------------------------------------------

MixtureModel::MixtureModel(std::vector<MixtureTerm> terms) {
    std::map<Partition, double> merged;
    double sum = 0.0;
    for (auto& t : terms) {
        if (t.weight < -1e-15)
            throw Error("mixture weight " + std::to_string(t.weight) + " is negative");
        merged[t.partition] += t.weight;
        sum += t.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw Error("mixture weights sum to " + std::to_string(sum) + ", expected 1");
    terms_.reserve(merged.size());
    for (auto& [partition, weight] : merged) terms_.push_back({weight, partition});
}

double MixtureModel::c1() const {
    for (const auto& t : terms_)
        if (t.partition.single_block()) return t.weight;
    return 0.0;
}

double MixtureModel::pair_identity_probability(PhotonLabel a, PhotonLabel b) const {
    double r = 0.0;
    for (const auto& t : terms_)
        if (t.partition.same_block(a, b)) r += t.weight;
    return r;
}

// ---------------------------------------------------------------------------
// ModeOccupation / OutputDistribution
// ---------------------------------------------------------------------------

int ModeOccupation::total() const {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

std::string ModeOccupation::to_string() const {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < n.size(); ++i) {
        if (i) os << ',';
        os << n[i];
    }
    os << ')';
    return os.str();
}

double OutputDistribution::total() const {
    double s = 0.0;
    for (const auto& [occ, prob] : p) s += prob;
    return s;
}

double OutputDistribution::probability(const ModeOccupation& occ) const {
    const auto it = p.find(occ);
    return it == p.end() ? 0.0 : it->second;
}

void OutputDistribution::add(const ModeOccupation& occ, double prob) {
    if (prob == 0.0) return;
    p[occ] += prob;
}

void OutputDistribution::normalize() {
    const double s = total();
    if (s <= 0.0) throw EmptyPostselection("distribution has zero total mass");
    for (auto& [occ, prob] : p) prob /= s;
}

}  // namespace indist
