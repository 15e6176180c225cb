#include "entdist/state.hpp"

#include <cmath>

namespace entdist {

const char* to_string(Polarization p) {
    return p == Polarization::H ? "H" : "V";
}

const char* to_string(FrequencyLabel f) {
    switch (f) {
    case FrequencyLabel::W1: return "w1";
    case FrequencyLabel::W2: return "w2";
    case FrequencyLabel::W0: return "w0";
    }
    return "?";
}

const char* to_string(ProbePhase p) {
    switch (p) {
    case ProbePhase::Zero: return "zero";
    case ProbePhase::Theta: return "theta";
    case ProbePhase::ThetaPrime: return "theta_prime";
    }
    return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point_index,
                            std::uint64_t trial_index) {
    std::uint64_t x = seed;
    std::uint64_t h = splitmix64(x);
    x = h ^ point_index;
    h = splitmix64(x);
    x = h ^ trial_index;
    return splitmix64(x);
}

StateVector StateVector::from_terms(std::vector<std::pair<BasisKet, Amplitude>> terms) {
    if (terms.empty())
        throw ParameterError("StateVector: no terms given");

    StateVector s;
    s.photon_count_ = terms.front().first.photons.size();
    s.probe_count_ = terms.front().first.probes.size();
    if (s.photon_count_ == 0)
        throw ParameterError("StateVector: kets must hold at least one photon");

    for (auto& [ket, amp] : terms) {
        if (ket.photons.size() != s.photon_count_ || ket.probes.size() != s.probe_count_)
            throw DimensionError("StateVector: inconsistent photon or probe count across kets");
        if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
            throw ParameterError("StateVector: non-finite amplitude");
        for (const auto& ph : ket.photons)
            if (ph.mode.label.empty())
                throw ParameterError("StateVector: empty spatial-mode label");
        s.terms_[std::move(ket)] += amp;
    }

    for (auto it = s.terms_.begin(); it != s.terms_.end();) {
        if (std::abs(it->second) < kPruneThreshold)
            it = s.terms_.erase(it);
        else
            ++it;
    }
    return s;
}

Amplitude StateVector::amplitude(const BasisKet& ket) const {
    auto it = terms_.find(ket);
    return it == terms_.end() ? Amplitude{0.0, 0.0} : it->second;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& [ket, amp] : terms_)
        sum += std::norm(amp);
    return std::sqrt(sum);
}

StateVector apply_single_photon_map(const StateVector& state, std::size_t party,
                                    const PhotonRule& rule, const ModeSet* allowed_modes) {
    if (party >= state.photon_count())
        throw DimensionError("apply_single_photon_map: party index out of range");

    StateVector out;
    out.photon_count_ = state.photon_count();
    out.probe_count_ = state.probe_count();

    for (const auto& [ket, amp] : state.terms()) {
        const auto images = rule(ket.photons[party]);
        if (images.empty())
            throw ElementError("apply_single_photon_map: rule produced no output kets");
        for (const auto& [photon, weight] : images) {
            if (photon.mode.label.empty())
                throw ElementError("apply_single_photon_map: rule produced an empty mode label");
            if (allowed_modes && !allowed_modes->count(photon.mode))
                throw ElementError("apply_single_photon_map: rule produced mode '" +
                                   photon.mode.label + "' outside the declared alphabet");
            BasisKet image = ket;
            image.photons[party] = photon;
            out.terms_[std::move(image)] += amp * weight;
        }
    }

    for (auto it = out.terms_.begin(); it != out.terms_.end();) {
        if (std::abs(it->second) < kPruneThreshold)
            it = out.terms_.erase(it);
        else
            ++it;
    }
    return out;
}

StateVector map_terms(const StateVector& state,
                      const std::function<std::pair<BasisKet, Amplitude>(
                          const BasisKet&, const Amplitude&)>& fn) {
    StateVector out;
    out.photon_count_ = state.photon_count();
    out.probe_count_ = state.probe_count();
    for (const auto& [ket, amp] : state.terms()) {
        auto [image, value] = fn(ket, amp);
        if (image.photons.size() != state.photon_count() ||
            image.probes.size() != state.probe_count())
            throw DimensionError("map_terms: rewrite changed photon or probe count");
        out.terms_[std::move(image)] += value;
    }
    for (auto it = out.terms_.begin(); it != out.terms_.end();) {
        if (std::abs(it->second) < kPruneThreshold)
            it = out.terms_.erase(it);
        else
            ++it;
    }
    return out;
}

double fidelity(const StateVector& state, const StateVector& target) {
    if (state.photon_count() != target.photon_count())
        throw DimensionError("fidelity: photon counts differ");
    if (state.probe_count() != target.probe_count())
        throw DimensionError("fidelity: probe counts differ");

    Amplitude overlap{0.0, 0.0};
    const auto& small = state.term_count() <= target.term_count() ? state : target;
    const auto& large = state.term_count() <= target.term_count() ? target : state;
    const bool small_is_state = &small == &state;
    for (const auto& [ket, amp] : small.terms()) {
        const Amplitude other = large.amplitude(ket);
        if (small_is_state)
            overlap += std::conj(other) * amp;
        else
            overlap += std::conj(amp) * other;
    }
    return std::norm(overlap);
}

bool exactly_equal(const StateVector& a, const StateVector& b) {
    if (a.term_count() != b.term_count())
        return false;
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    for (; ia != a.terms().end(); ++ia, ++ib) {
        if (ia->first != ib->first)
            return false;
        if (ia->second.real() != ib->second.real() || ia->second.imag() != ib->second.imag())
            return false;
    }
    return true;
}

StateVector discard_probes(const StateVector& state) {
    if (state.empty())
        throw MeasurementError("discard_probes: state has no terms");
    const auto& reference = state.terms().begin()->first.probes;
    for (const auto& [ket, amp] : state.terms())
        if (ket.probes != reference)
            throw MeasurementError("discard_probes: probe register still entangled "
                                   "(differing probe tuples across terms)");

    StateVector out;
    out.photon_count_ = state.photon_count();
    out.probe_count_ = 0;
    for (const auto& [ket, amp] : state.terms()) {
        BasisKet stripped;
        stripped.photons = ket.photons;
        out.terms_[std::move(stripped)] = amp;
    }
    return out;
}

StateVector attach_probes(const StateVector& state, std::size_t count) {
    if (state.probe_count() != 0)
        throw ElementError("attach_probes: state already carries a probe register");
    StateVector out;
    out.photon_count_ = state.photon_count();
    out.probe_count_ = count;
    for (const auto& [ket, amp] : state.terms()) {
        BasisKet extended = ket;
        extended.probes.assign(count, ProbePhase::Zero);
        out.terms_[std::move(extended)] = amp;
    }
    return out;
}

} // namespace entdist
