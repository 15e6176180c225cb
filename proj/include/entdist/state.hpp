#pragma once

// Sparse state-vector core: photons carry (polarization, frequency, spatial
// mode) labels, monitoring parties carry a discrete probe-phase label, and a
// state is a map from composite basis kets to complex amplitudes. Everything
// downstream (optical elements, protocols, measurements) is built on the
// handful of primitives in this header.

#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entdist/errors.hpp"

namespace entdist {

enum class Polarization : std::uint8_t { H, V };

// W0 is the common frequency produced by up-conversion; it never appears in
// a state before frequency_upconvert has run.
enum class FrequencyLabel : std::uint8_t { W1, W2, W0 };

// One discrete label per monitoring party's coherent probe: |alpha>,
// |alpha e^{i theta}>, |alpha e^{i theta'}>.
enum class ProbePhase : std::uint8_t { Zero, Theta, ThetaPrime };

const char* to_string(Polarization p);
const char* to_string(FrequencyLabel f);
const char* to_string(ProbePhase p);

// Short string identifier for a spatial mode ("a", "a2", "c1", ...).
struct SpatialMode {
    std::string label;

    SpatialMode() = default;
    SpatialMode(std::string l) : label(std::move(l)) {}
    SpatialMode(const char* l) : label(l) {}

    auto operator<=>(const SpatialMode&) const = default;
};

using ModeSet = std::set<SpatialMode>;

// One photon's full label triple. All three fields are always present.
struct PhotonKet {
    Polarization pol{Polarization::H};
    FrequencyLabel freq{FrequencyLabel::W1};
    SpatialMode mode;

    auto operator<=>(const PhotonKet&) const = default;
};

// Composite basis ket: photon position is the party index (0 = A, 1 = B, ...),
// probes hold one phase label per monitoring party (empty before the QND
// stage). Photon ordering is never permuted.
struct BasisKet {
    std::vector<PhotonKet> photons;
    std::vector<ProbePhase> probes;

    auto operator<=>(const BasisKet&) const = default;
};

using Amplitude = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kErasureTolerance = 1e-9;
inline constexpr double kSuccessThreshold = 1.0 - 1e-9;

// Seeded RNG handle. Pipelines record the seed in their reports, so the seed
// travels with the engine. Uniform doubles are derived from raw engine output
// directly; the bit stream per seed is fixed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

    // Uniform double in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Derives an independent stream from (seed, point index, trial index) so
// that parallel and serial sweep execution sample identically.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point_index,
                            std::uint64_t trial_index);

// Sparse quantum state. Immutable after construction: operations return new
// states. Terms are held in a std::map keyed by the full ket so iteration
// order (and therefore every amplitude sum in the simulator) is deterministic.
class StateVector {
  public:
    using TermMap = std::map<BasisKet, Amplitude>;

    // Empty placeholder; any real state comes from from_terms.
    StateVector() = default;

    // Builds a state from explicit terms. Colliding kets are summed, terms
    // below the pruning threshold dropped. All kets must agree on photon and
    // probe counts; amplitudes must be finite.
    static StateVector from_terms(std::vector<std::pair<BasisKet, Amplitude>> terms);

    std::size_t photon_count() const { return photon_count_; }
    std::size_t probe_count() const { return probe_count_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    // Amplitude of a ket, zero if not stored.
    Amplitude amplitude(const BasisKet& ket) const;

    // sqrt(sum |amp|^2)
    double norm() const;

  private:
    TermMap terms_;
    std::size_t photon_count_ = 0;
    std::size_t probe_count_ = 0;

    friend StateVector apply_single_photon_map(
        const StateVector&, std::size_t,
        const std::function<std::vector<std::pair<PhotonKet, Amplitude>>(const PhotonKet&)>&,
        const ModeSet*);
    friend StateVector map_terms(const StateVector&,
                                 const std::function<std::pair<BasisKet, Amplitude>(
                                     const BasisKet&, const Amplitude&)>&);
    friend StateVector discard_probes(const StateVector& state);
    friend StateVector attach_probes(const StateVector& state, std::size_t count);
};

// A single-photon transformation rule: one input ket to a weighted list of
// output kets. Must be unitary on the polarization subspace or a pure label
// relabeling; the engine checks label sanity, tests check unitarity.
using PhotonRule =
    std::function<std::vector<std::pair<PhotonKet, Amplitude>>(const PhotonKet&)>;

// Generic engine behind every optical element: replaces the photon at
// `party` in each term according to `rule`, multiplies amplitudes by the
// rule weights, sums colliding kets and prunes. When `allowed_modes` is
// given, any produced mode outside it raises ElementError.
StateVector apply_single_photon_map(const StateVector& state, std::size_t party,
                                    const PhotonRule& rule,
                                    const ModeSet* allowed_modes = nullptr);

// Term-level rewrite (ket relabeling and/or amplitude scaling) preserving
// photon/probe counts. Internal helper shared by elements.
StateVector map_terms(const StateVector& state,
                      const std::function<std::pair<BasisKet, Amplitude>(
                          const BasisKet&, const Amplitude&)>& fn);

// |<target|state>|^2, kets compared by their full label content.
// Photon/probe counts must match.
double fidelity(const StateVector& state, const StateVector& target);

// Exact equality of stored terms: same kets, bitwise-identical amplitudes.
// Holds along pipelines made of pure label rewrites.
bool exactly_equal(const StateVector& a, const StateVector& b);

template <class Label>
struct MeasureOutcome {
    Label label;
    double probability = 0.0;
    StateVector state;
};

// Raw squared-amplitude weight of each classifier subspace. For a normalized
// state these are the outcome probabilities and sum to one. Deterministic;
// no sampling.
template <class Label, class Classifier>
std::map<Label, double> partition_weights(const StateVector& state, Classifier&& classify) {
    if (state.empty())
        throw MeasurementError("partition_weights: state has no terms (vacuum)");
    std::map<Label, double> weights;
    for (const auto& [ket, amp] : state.terms())
        weights[classify(ket)] += std::norm(amp);
    return weights;
}

// Normalized restriction of the state to one classifier subspace, plus the
// subspace weight. Zero-weight labels raise MeasurementError.
template <class Label, class Classifier>
MeasureOutcome<Label> project_onto(const StateVector& state, Classifier&& classify,
                                   const Label& label) {
    if (state.empty())
        throw MeasurementError("project_onto: state has no terms (vacuum)");
    double weight = 0.0;
    double total = 0.0;
    std::vector<std::pair<BasisKet, Amplitude>> kept;
    for (const auto& [ket, amp] : state.terms()) {
        const double w = std::norm(amp);
        total += w;
        if (classify(ket) == label) {
            weight += w;
            kept.emplace_back(ket, amp);
        }
    }
    if (weight <= 0.0)
        throw MeasurementError("project_onto: subspace has zero weight");
    const double scale = 1.0 / std::sqrt(weight);
    for (auto& [ket, amp] : kept)
        amp *= scale;
    MeasureOutcome<Label> out{label, weight / total, StateVector::from_terms(std::move(kept))};
    return out;
}

// Projective measurement onto classifier subspaces: samples an outcome label
// with its subspace weight and returns the renormalized restriction.
template <class Label, class Classifier>
MeasureOutcome<Label> partition_measure(const StateVector& state, Classifier&& classify,
                                        Rng& rng) {
    const auto weights = partition_weights<Label>(state, classify);
    double total = 0.0;
    for (const auto& [label, w] : weights)
        total += w;
    const double u = rng.uniform() * total;
    double cum = 0.0;
    const Label* chosen = nullptr;
    for (const auto& [label, w] : weights) {
        cum += w;
        chosen = &label;
        if (u < cum)
            break;
    }
    // chosen is non-null: weights is nonempty for a nonempty state.
    return project_onto(state, classify, *chosen);
}

// Removes the probe register. Requires every term to carry the same probe
// tuple (i.e. the probes were already collapsed and are classical).
StateVector discard_probes(const StateVector& state);

// Attaches `count` probe labels, all Zero, to a state with no probe register
// yet. Plumbing for the QND stage.
StateVector attach_probes(const StateVector& state, std::size_t count);

} // namespace entdist
