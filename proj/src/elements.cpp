#include "entdist/elements.hpp"

#include <algorithm>
#include <cmath>

namespace entdist {

NoiseParams::NoiseParams(Amplitude a, Amplitude b) : alpha(a), beta(b) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance)
        throw ParameterError("NoiseParams: |alpha|^2 + |beta|^2 must be 1");
}

QndConfig::QndConfig(std::size_t p, SpatialMode monitored, SpatialMode alt)
    : party(p), monitored_mode(std::move(monitored)), alt_mode(std::move(alt)) {
    if (monitored_mode == alt_mode)
        throw ElementError("QndConfig: monitored and alternate modes must differ");
}

FiberConfig::FiberConfig(double la, double lb, double v, double w1, double w2)
    : length_a(la), length_b(lb), velocity(v), omega1(w1), omega2(w2) {
    if (!(la > 0.0) || !(lb > 0.0))
        throw ParameterError("FiberConfig: fiber lengths must be positive");
    if (!(v > 0.0))
        throw ParameterError("FiberConfig: velocity must be positive");
    if (!(w1 > 0.0) || !(w2 > 0.0))
        throw ParameterError("FiberConfig: frequencies must be positive");
    if (w1 == w2)
        throw ParameterError("FiberConfig: omega1 and omega2 must differ");
}

double FiberConfig::delta_phi() const {
    return ((omega2 - omega1) * length_a + (omega1 - omega2) * length_b) / velocity;
}

HomodyneModel::HomodyneModel(double p) : p_err(p) {
    if (!(p >= 0.0) || !(p <= 0.5))
        throw ParameterError("HomodyneModel: p_err must lie in [0, 0.5]");
}

StateVector apply_collective_noise(const StateVector& state, std::size_t party,
                                   const NoiseParams& noise) {
    const Amplitude a = noise.alpha;
    const Amplitude b = noise.beta;
    return apply_single_photon_map(state, party, [a, b](const PhotonKet& ph) {
        PhotonKet h = ph;
        h.pol = Polarization::H;
        PhotonKet v = ph;
        v.pol = Polarization::V;
        if (ph.pol == Polarization::H)
            return std::vector<std::pair<PhotonKet, Amplitude>>{{h, a}, {v, b}};
        return std::vector<std::pair<PhotonKet, Amplitude>>{{h, -std::conj(b)},
                                                            {v, std::conj(a)}};
    });
}

StateVector apply_pbs(const StateVector& state, std::size_t party, const SpatialMode& in_mode,
                      const SpatialMode& h_out, const SpatialMode& v_out) {
    if (h_out == v_out)
        throw ElementError("apply_pbs: output ports must differ");
    return apply_single_photon_map(state, party, [&](const PhotonKet& ph) {
        PhotonKet out = ph;
        if (ph.mode == in_mode)
            out.mode = ph.pol == Polarization::H ? h_out : v_out;
        return std::vector<std::pair<PhotonKet, Amplitude>>{{out, Amplitude{1.0, 0.0}}};
    });
}

StateVector cross_kerr_qnd(const StateVector& state, const QndConfig& cfg) {
    if (cfg.party >= state.photon_count())
        throw DimensionError("cross_kerr_qnd: party index out of range");
    if (cfg.party >= state.probe_count())
        throw ElementError("cross_kerr_qnd: no probe register for this party "
                           "(attach probes before the QND stage)");
    return map_terms(state, [&](const BasisKet& ket, const Amplitude& amp) {
        if (ket.probes[cfg.party] != ProbePhase::Zero)
            throw ElementError("cross_kerr_qnd: probe already carries a phase for party " +
                               std::to_string(cfg.party));
        const PhotonKet& ph = ket.photons[cfg.party];
        BasisKet tagged = ket;
        if (ph.mode == cfg.monitored_mode)
            tagged.probes[cfg.party] = ProbePhase::Theta;
        else if (ph.mode == cfg.alt_mode)
            tagged.probes[cfg.party] = ProbePhase::ThetaPrime;
        else
            throw RoutingError("cross_kerr_qnd: photon of party " + std::to_string(cfg.party) +
                               " in mode '" + ph.mode.label + "', not in '" +
                               cfg.monitored_mode.label + "' or '" + cfg.alt_mode.label + "'");
        return std::make_pair(std::move(tagged), amp);
    });
}

HomodyneResult homodyne_measure(const StateVector& state, std::size_t party,
                                const HomodyneModel& model, Rng& rng) {
    if (party >= state.probe_count())
        throw MeasurementError("homodyne_measure: no probe register for this party");

    bool any_tagged = false;
    for (const auto& [ket, amp] : state.terms())
        if (ket.probes[party] != ProbePhase::Zero) {
            any_tagged = true;
            break;
        }
    if (!any_tagged)
        throw MeasurementError("homodyne_measure: probe still Zero everywhere for party " +
                               std::to_string(party) + " (QND not applied)");

    auto outcome = partition_measure<ProbePhase>(
        state, [party](const BasisKet& ket) { return ket.probes[party]; }, rng);

    // The flip draw is consumed unconditionally so the RNG stream per trial
    // does not depend on p_err.
    const double flip_u = rng.uniform();
    ProbePhase reported = outcome.label;
    if (flip_u < model.p_err) {
        if (reported == ProbePhase::Theta)
            reported = ProbePhase::ThetaPrime;
        else if (reported == ProbePhase::ThetaPrime)
            reported = ProbePhase::Theta;
    }
    return HomodyneResult{reported, outcome.label, std::move(outcome.state)};
}

StateVector apply_wdm(const StateVector& state, std::size_t party, const SpatialMode& in_mode,
                      const SpatialMode& w1_out, const SpatialMode& w2_out) {
    if (w1_out == w2_out)
        throw ElementError("apply_wdm: output ports must differ");
    return apply_single_photon_map(state, party, [&](const PhotonKet& ph) {
        PhotonKet out = ph;
        if (ph.mode == in_mode) {
            switch (ph.freq) {
            case FrequencyLabel::W1: out.mode = w1_out; break;
            case FrequencyLabel::W2: out.mode = w2_out; break;
            case FrequencyLabel::W0:
                throw ErasureError("apply_wdm: photon already up-converted (W0) at input '" +
                                   in_mode.label + "'");
            }
        }
        return std::vector<std::pair<PhotonKet, Amplitude>>{{out, Amplitude{1.0, 0.0}}};
    });
}

StateVector apply_hwp_r90(const StateVector& state, std::size_t party, const SpatialMode& mode) {
    return apply_single_photon_map(state, party, [&](const PhotonKet& ph) {
        PhotonKet out = ph;
        if (ph.mode == mode)
            out.pol = ph.pol == Polarization::H ? Polarization::V : Polarization::H;
        return std::vector<std::pair<PhotonKet, Amplitude>>{{out, Amplitude{1.0, 0.0}}};
    });
}

namespace {

bool w2_first_pattern(const BasisKet& ket) {
    return ket.photons.size() >= 2 && ket.photons[0].freq == FrequencyLabel::W2 &&
           ket.photons[1].freq == FrequencyLabel::W1;
}

StateVector phase_on_pattern(const StateVector& state, double phi,
                             const std::function<bool(const BasisKet&)>& pattern) {
    const Amplitude rot = std::polar(1.0, phi);
    return map_terms(state, [&](const BasisKet& ket, const Amplitude& amp) {
        return std::make_pair(ket, pattern(ket) ? amp * rot : amp);
    });
}

} // namespace

StateVector fiber_phase(const StateVector& state, const FiberConfig& cfg) {
    return phase_on_pattern(state, cfg.delta_phi(), w2_first_pattern);
}

StateVector compensate_phase(const StateVector& state, const FiberConfig& cfg) {
    bool frequency_domain = false;
    for (const auto& [ket, amp] : state.terms())
        if (w2_first_pattern(ket)) {
            frequency_domain = true;
            break;
        }
    if (frequency_domain)
        return phase_on_pattern(state, -cfg.delta_phi(), w2_first_pattern);

    // Post-conversion: the dispersion phase rides on the all-V term of the
    // polarization entanglement.
    return phase_on_pattern(state, -cfg.delta_phi(), [](const BasisKet& ket) {
        return std::all_of(ket.photons.begin(), ket.photons.end(),
                           [](const PhotonKet& ph) { return ph.pol == Polarization::V; });
    });
}

StateVector frequency_upconvert(const StateVector& state, std::span<const std::size_t> parties) {
    for (const std::size_t p : parties)
        if (p >= state.photon_count())
            throw DimensionError("frequency_upconvert: party index out of range");

    StateVector out = map_terms(state, [&](const BasisKet& ket, const Amplitude& amp) {
        BasisKet erased = ket;
        for (const std::size_t p : parties)
            erased.photons[p].freq = FrequencyLabel::W0;
        return std::make_pair(std::move(erased), amp);
    });

    const double n = out.norm();
    if (std::abs(n - 1.0) > kErasureTolerance)
        throw ErasureError("frequency_upconvert: erased terms interfere, norm " +
                           std::to_string(n) + " after up-conversion");
    return out;
}

} // namespace entdist
