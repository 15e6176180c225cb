#include "entdist/protocols.hpp"

#include <cmath>

namespace entdist {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PhotonKet photon(Polarization pol, FrequencyLabel freq, SpatialMode mode) {
    return PhotonKet{pol, freq, std::move(mode)};
}

const CircuitDescription& default_conversion_2q() {
    static const CircuitDescription circuit = conversion_circuit(2);
    return circuit;
}

const CircuitDescription& default_front_end_2q() {
    static const CircuitDescription circuit = front_end_circuit(2);
    return circuit;
}

bool g_correction_fault = false;

} // namespace

const char* to_string(TwoQubitOutcome o) {
    switch (o) {
    case TwoQubitOutcome::Phi1: return "phi1";
    case TwoQubitOutcome::Phi2: return "phi2";
    case TwoQubitOutcome::Phi3: return "phi3";
    case TwoQubitOutcome::Phi4: return "phi4";
    }
    return "?";
}

std::optional<TwoQubitOutcome> two_qubit_outcome_from_name(const std::string& name) {
    for (const auto o : {TwoQubitOutcome::Phi1, TwoQubitOutcome::Phi2, TwoQubitOutcome::Phi3,
                         TwoQubitOutcome::Phi4})
        if (name == to_string(o))
            return o;
    return std::nullopt;
}

const char* to_string(Pauli p) {
    switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Z: return "Z";
    case Pauli::XZ: return "XZ";
    }
    return "?";
}

std::optional<Pauli> pauli_from_name(const std::string& name) {
    for (const auto p : {Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ})
        if (name == to_string(p))
            return p;
    return std::nullopt;
}

StateVector apply_pauli(const StateVector& state, std::size_t party, Pauli op) {
    if (op == Pauli::I)
        return state;
    return apply_single_photon_map(state, party, [op](const PhotonKet& ph) {
        PhotonKet out = ph;
        Amplitude weight{1.0, 0.0};
        switch (op) {
        case Pauli::I:
            break;
        case Pauli::X:
            out.pol = ph.pol == Polarization::H ? Polarization::V : Polarization::H;
            break;
        case Pauli::Z:
            if (ph.pol == Polarization::V)
                weight = {-1.0, 0.0};
            break;
        case Pauli::XZ: // Z first, then X
            out.pol = ph.pol == Polarization::H ? Polarization::V : Polarization::H;
            if (ph.pol == Polarization::V)
                weight = {-1.0, 0.0};
            break;
        }
        return std::vector<std::pair<PhotonKet, Amplitude>>{{out, weight}};
    });
}

StateVector make_two_photon_source() {
    const PartyWiring wa = party_wiring(2, 0);
    const PartyWiring wb = party_wiring(2, 1);
    BasisKet order12;
    order12.photons = {photon(Polarization::H, FrequencyLabel::W1, wa.input),
                       photon(Polarization::H, FrequencyLabel::W2, wb.input)};
    BasisKet order21;
    order21.photons = {photon(Polarization::H, FrequencyLabel::W2, wa.input),
                       photon(Polarization::H, FrequencyLabel::W1, wb.input)};
    return StateVector::from_terms({{order12, {kInvSqrt2, 0.0}}, {order21, {kInvSqrt2, 0.0}}});
}

TwoQubitOutcome identify_outcome(ProbePhase reported_a, ProbePhase reported_b) {
    if (reported_a == ProbePhase::Zero || reported_b == ProbePhase::Zero)
        throw MeasurementError("identify_outcome: probe phase still Zero (measurement "
                               "incomplete)");
    if (reported_a == ProbePhase::Theta)
        return reported_b == ProbePhase::Theta ? TwoQubitOutcome::Phi1 : TwoQubitOutcome::Phi3;
    return reported_b == ProbePhase::Theta ? TwoQubitOutcome::Phi4 : TwoQubitOutcome::Phi2;
}

std::array<ProbePhase, 2> phases_for_outcome(TwoQubitOutcome o) {
    switch (o) {
    case TwoQubitOutcome::Phi1: return {ProbePhase::Theta, ProbePhase::Theta};
    case TwoQubitOutcome::Phi2: return {ProbePhase::ThetaPrime, ProbePhase::ThetaPrime};
    case TwoQubitOutcome::Phi3: return {ProbePhase::Theta, ProbePhase::ThetaPrime};
    case TwoQubitOutcome::Phi4: return {ProbePhase::ThetaPrime, ProbePhase::Theta};
    }
    throw ParameterError("phases_for_outcome: bad outcome");
}

std::array<SpatialMode, 2> collapse_modes(TwoQubitOutcome o) {
    const PartyWiring wa = party_wiring(2, 0);
    const PartyWiring wb = party_wiring(2, 1);
    switch (o) {
    case TwoQubitOutcome::Phi1: return {wa.lower, wb.lower};
    case TwoQubitOutcome::Phi2: return {wa.upper, wb.upper};
    case TwoQubitOutcome::Phi3: return {wa.lower, wb.upper};
    case TwoQubitOutcome::Phi4: return {wa.upper, wb.lower};
    }
    throw ParameterError("collapse_modes: bad outcome");
}

std::array<SpatialMode, 2> converted_modes(TwoQubitOutcome o) {
    const PartyWiring wa = party_wiring(2, 0);
    const PartyWiring wb = party_wiring(2, 1);
    switch (o) {
    case TwoQubitOutcome::Phi1: return {wa.out_lower, wb.out_lower};
    case TwoQubitOutcome::Phi2: return {wa.out_upper, wb.out_upper};
    case TwoQubitOutcome::Phi3: return {wa.out_lower, wb.out_upper};
    case TwoQubitOutcome::Phi4: return {wa.out_upper, wb.out_lower};
    }
    throw ParameterError("converted_modes: bad outcome");
}

StateVector canonical_branch(TwoQubitOutcome o) {
    const auto modes = collapse_modes(o);
    Polarization pol_a = Polarization::H;
    Polarization pol_b = Polarization::H;
    switch (o) {
    case TwoQubitOutcome::Phi1: break;
    case TwoQubitOutcome::Phi2: pol_a = pol_b = Polarization::V; break;
    case TwoQubitOutcome::Phi3: pol_b = Polarization::V; break;
    case TwoQubitOutcome::Phi4: pol_a = Polarization::V; break;
    }
    BasisKet order12;
    order12.photons = {photon(pol_a, FrequencyLabel::W1, modes[0]),
                       photon(pol_b, FrequencyLabel::W2, modes[1])};
    BasisKet order21;
    order21.photons = {photon(pol_a, FrequencyLabel::W2, modes[0]),
                       photon(pol_b, FrequencyLabel::W1, modes[1])};
    return StateVector::from_terms({{order12, {kInvSqrt2, 0.0}}, {order21, {kInvSqrt2, 0.0}}});
}

StateVector bell_phi_plus(const SpatialMode& mode_a, const SpatialMode& mode_b) {
    BasisKet hh;
    hh.photons = {photon(Polarization::H, FrequencyLabel::W0, mode_a),
                  photon(Polarization::H, FrequencyLabel::W0, mode_b)};
    BasisKet vv;
    vv.photons = {photon(Polarization::V, FrequencyLabel::W0, mode_a),
                  photon(Polarization::V, FrequencyLabel::W0, mode_b)};
    return StateVector::from_terms({{hh, {kInvSqrt2, 0.0}}, {vv, {kInvSqrt2, 0.0}}});
}

StateVector conversion_network(const StateVector& state, TwoQubitOutcome outcome) {
    return conversion_network(state, outcome, default_conversion_2q());
}

StateVector conversion_network(const StateVector& state, TwoQubitOutcome outcome,
                               const CircuitDescription& conversion) {
    if (state.photon_count() != 2)
        throw DimensionError("conversion_network: expected a two-photon state");
    const auto expected = collapse_modes(outcome);
    for (const auto& [ket, amp] : state.terms())
        if (ket.photons[0].mode != expected[0] || ket.photons[1].mode != expected[1])
            throw RoutingError("conversion_network: state occupies modes ('" +
                               ket.photons[0].mode.label + "','" + ket.photons[1].mode.label +
                               "') inconsistent with " + to_string(outcome) + " ('" +
                               expected[0].label + "','" + expected[1].label + "')");
    return run_circuit(state, conversion);
}

const std::array<CorrectionPair, 4>& correction_table() {
    static const std::array<CorrectionPair, 4> table = [] {
        constexpr std::array<Pauli, 4> candidates{Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ};
        std::array<CorrectionPair, 4> result{};
        const std::array<std::size_t, 2> both{0, 1};

        // Marker phase on the w2-first term: a fiber dispersion phase rides
        // exactly there, and the chosen correction must carry it onto the
        // all-V term so the compensated pair ends in (|HH> + |VV>)/sqrt2.
        const Amplitude marker = std::polar(1.0, 1.0);

        for (const auto o : {TwoQubitOutcome::Phi1, TwoQubitOutcome::Phi2,
                             TwoQubitOutcome::Phi3, TwoQubitOutcome::Phi4}) {
            const StateVector branch = canonical_branch(o);
            const StateVector marked =
                map_terms(branch, [&](const BasisKet& ket, const Amplitude& amp) {
                    const bool w2_first = ket.photons[0].freq == FrequencyLabel::W2;
                    return std::make_pair(ket, w2_first ? amp * marker : amp);
                });

            const StateVector converted = frequency_upconvert(
                conversion_network(branch, o), std::span<const std::size_t>(both));
            const StateVector converted_marked = frequency_upconvert(
                conversion_network(marked, o), std::span<const std::size_t>(both));

            const auto ports = converted_modes(o);
            const StateVector target = bell_phi_plus(ports[0], ports[1]);
            const StateVector marked_target =
                map_terms(target, [&](const BasisKet& ket, const Amplitude& amp) {
                    const bool all_v = ket.photons[0].pol == Polarization::V &&
                                       ket.photons[1].pol == Polarization::V;
                    return std::make_pair(ket, all_v ? amp * marker : amp);
                });

            bool found = false;
            for (const Pauli pa : candidates) {
                for (const Pauli pb : candidates) {
                    const StateVector corrected =
                        apply_pauli(apply_pauli(converted, 0, pa), 1, pb);
                    const StateVector corrected_marked =
                        apply_pauli(apply_pauli(converted_marked, 0, pa), 1, pb);
                    if (std::abs(fidelity(corrected, target) - 1.0) <= 1e-12 &&
                        std::abs(fidelity(corrected_marked, marked_target) - 1.0) <= 1e-12) {
                        result[outcome_index(o)] = {pa, pb};
                        found = true;
                        break;
                    }
                }
                if (found)
                    break;
            }
            if (!found)
                throw SimError("correction_table: no Pauli pair maps branch onto |phi+>");
        }
        return result;
    }();
    return table;
}

CorrectionPair correction_for(TwoQubitOutcome outcome) {
    CorrectionPair pair = correction_table()[outcome_index(outcome)];
    if (g_correction_fault)
        pair[0] = pair[0] == Pauli::I ? Pauli::X : Pauli::I;
    return pair;
}

namespace testing {
void set_correction_table_fault(bool enabled) { g_correction_fault = enabled; }
} // namespace testing

StateVector two_qubit_post_qnd_state(const NoiseParams& noise_a, const NoiseParams& noise_b,
                                     const FiberConfig& fiber) {
    StateVector s = make_two_photon_source();
    s = fiber_phase(s, fiber);
    s = apply_collective_noise(s, 0, noise_a);
    s = apply_collective_noise(s, 1, noise_b);
    s = attach_probes(s, 2);
    return run_circuit(s, default_front_end_2q());
}

TwoQubitTail two_qubit_finish(const StateVector& collapsed, TwoQubitOutcome true_outcome,
                              TwoQubitOutcome reported, const FiberConfig& fiber,
                              bool compensate, const CircuitDescription* conversion) {
    StateVector s = conversion ? conversion_network(collapsed, true_outcome, *conversion)
                               : conversion_network(collapsed, true_outcome);
    const std::array<std::size_t, 2> both{0, 1};
    s = frequency_upconvert(s, std::span<const std::size_t>(both));

    const CorrectionPair correction = correction_for(reported);
    s = apply_pauli(s, 0, correction[0]);
    s = apply_pauli(s, 1, correction[1]);
    if (compensate)
        s = compensate_phase(s, fiber);

    const auto ports = converted_modes(reported);
    const StateVector target = bell_phi_plus(ports[0], ports[1]);
    const double fid = fidelity(s, target);
    return TwoQubitTail{std::move(s), fid, correction};
}

ProtocolReport run_two_qubit(const NoiseParams& noise_a, const NoiseParams& noise_b,
                             const FiberConfig& fiber, const HomodyneModel& homodyne,
                             Rng& rng, bool compensate, const CircuitDescription* conversion) {
    const StateVector tagged = two_qubit_post_qnd_state(noise_a, noise_b, fiber);
    const HomodyneResult ha = homodyne_measure(tagged, 0, homodyne, rng);
    const HomodyneResult hb = homodyne_measure(ha.state, 1, homodyne, rng);

    const TwoQubitOutcome true_outcome = identify_outcome(ha.true_outcome, hb.true_outcome);
    const TwoQubitOutcome reported = identify_outcome(ha.reported, hb.reported);

    const StateVector collapsed = discard_probes(hb.state);
    TwoQubitTail tail =
        two_qubit_finish(collapsed, true_outcome, reported, fiber, compensate, conversion);

    ProtocolReport report;
    report.final_state = std::move(tail.final_state);
    report.fidelity = tail.fidelity;
    report.seed = rng.seed();
    report.success = tail.fidelity >= kSuccessThreshold;
    report.record.reported = {ha.reported, hb.reported};
    report.record.true_phases = {ha.true_outcome, hb.true_outcome};
    report.record.outcome = to_string(reported);
    report.record.correction = {tail.correction[0], tail.correction[1]};
    const auto ports = converted_modes(reported);
    report.record.output_modes = {ports[0], ports[1]};
    return report;
}

StateVector make_ghz_source(std::size_t n) {
    if (n < 2)
        throw ParameterError("make_ghz_source: need at least two photons");
    BasisKet leading; // frequencies w1 w2 w1 w2 ...
    BasisKet trailing;
    for (std::size_t i = 0; i < n; ++i) {
        const PartyWiring w = party_wiring(n, i);
        const bool even = (i % 2) == 0;
        leading.photons.push_back(photon(Polarization::H,
                                         even ? FrequencyLabel::W1 : FrequencyLabel::W2,
                                         w.input));
        trailing.photons.push_back(photon(Polarization::H,
                                          even ? FrequencyLabel::W2 : FrequencyLabel::W1,
                                          w.input));
    }
    return StateVector::from_terms({{leading, {kInvSqrt2, 0.0}}, {trailing, {kInvSqrt2, 0.0}}});
}

std::string bits_from_phases(std::span<const ProbePhase> phases) {
    std::string bits;
    bits.reserve(phases.size());
    for (const ProbePhase p : phases) {
        if (p == ProbePhase::Zero)
            throw MeasurementError("bits_from_phases: probe phase still Zero");
        bits.push_back(p == ProbePhase::Theta ? '0' : '1');
    }
    return bits;
}

StateVector ghz_target(std::size_t n) {
    BasisKet all_h;
    BasisKet all_v;
    for (std::size_t i = 0; i < n; ++i) {
        const PartyWiring w = party_wiring(n, i);
        all_h.photons.push_back(photon(Polarization::H, FrequencyLabel::W0, w.out_lower));
        all_v.photons.push_back(photon(Polarization::V, FrequencyLabel::W0, w.out_lower));
    }
    return StateVector::from_terms({{all_h, {kInvSqrt2, 0.0}}, {all_v, {kInvSqrt2, 0.0}}});
}

ProtocolReport run_ghz(std::size_t n, std::span<const NoiseParams> noises,
                       const HomodyneModel& homodyne, Rng& rng, bool experimental_odd_n) {
    if (n < 2)
        throw ParameterError("run_ghz: need at least two parties");
    if (n % 2 != 0 && !experimental_odd_n)
        throw ParameterError("run_ghz: odd party counts extrapolate beyond the alternating "
                             "frequency pattern; pass experimental_odd_n to enable");
    if (noises.size() != n)
        throw ParameterError("run_ghz: expected one NoiseParams per party");

    StateVector s = make_ghz_source(n);
    for (std::size_t i = 0; i < n; ++i)
        s = apply_collective_noise(s, i, noises[i]);
    s = attach_probes(s, n);
    s = run_circuit(s, front_end_circuit(n));

    std::vector<ProbePhase> reported(n);
    std::vector<ProbePhase> true_phases(n);
    for (std::size_t i = 0; i < n; ++i) {
        HomodyneResult h = homodyne_measure(s, i, homodyne, rng);
        reported[i] = h.reported;
        true_phases[i] = h.true_outcome;
        s = std::move(h.state);
    }
    const std::string reported_bits = bits_from_phases(reported);

    s = discard_probes(s);

    // Restore |0...0> from the identified bits, then convert. A wrong bit
    // leaves that party's photon V after restoration; the converter sends V
    // photons to the upper output port, so misidentified runs end at the
    // wrong ports and score fidelity 0 against the target.
    for (std::size_t i = 0; i < n; ++i)
        if (reported_bits[i] == '1')
            s = apply_pauli(s, i, Pauli::X);

    s = run_circuit(s, conversion_circuit(n));

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = i;
    s = frequency_upconvert(s, all);

    // Parties whose leading source term carries W2 exit the converter
    // V-first; flip them back (photons B and D in the four-party case).
    std::vector<Pauli> net_correction(n, Pauli::I);
    for (std::size_t i = 0; i < n; ++i) {
        const bool w2_leading = (i % 2) == 1;
        if (w2_leading)
            s = apply_pauli(s, i, Pauli::X);
        const bool restored = reported_bits[i] == '1';
        net_correction[i] = (restored != w2_leading) ? Pauli::X : Pauli::I;
    }

    const StateVector target = ghz_target(n);
    const double fid = fidelity(s, target);

    ProtocolReport report;
    report.final_state = std::move(s);
    report.fidelity = fid;
    report.seed = rng.seed();
    report.success = fid >= kSuccessThreshold;
    report.record.reported = std::move(reported);
    report.record.true_phases = std::move(true_phases);
    report.record.outcome = reported_bits;
    report.record.correction = std::move(net_correction);
    for (std::size_t i = 0; i < n; ++i)
        report.record.output_modes.push_back(party_wiring(n, i).out_lower);
    return report;
}

} // namespace entdist
