#pragma once

// The two distribution pipelines: two-qubit Bell distribution (noise, PBS,
// cross-Kerr QND, homodyne identification, frequency-to-polarization
// conversion, up-conversion, Pauli correction) and its n-party GHZ
// generalization. Identification always uses the REPORTED homodyne phases
// while the physical collapse follows the TRUE ones, so readout errors
// propagate into wrong corrections and a degraded final fidelity.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entdist/circuit.hpp"
#include "entdist/elements.hpp"
#include "entdist/state.hpp"

namespace entdist {

// Collapse branch of the two-qubit protocol, fixed by the probe-phase pair:
// (theta,theta) -> Phi1, (theta',theta') -> Phi2, (theta,theta') -> Phi3,
// (theta',theta) -> Phi4.
enum class TwoQubitOutcome : std::uint8_t { Phi1, Phi2, Phi3, Phi4 };

const char* to_string(TwoQubitOutcome o);
std::optional<TwoQubitOutcome> two_qubit_outcome_from_name(const std::string& name);
inline std::size_t outcome_index(TwoQubitOutcome o) { return static_cast<std::size_t>(o); }

// Per-party polarization correction: X swaps H and V, Z negates V, XZ is
// Z followed by X.
enum class Pauli : std::uint8_t { I, X, Z, XZ };

const char* to_string(Pauli p);
std::optional<Pauli> pauli_from_name(const std::string& name);

StateVector apply_pauli(const StateVector& state, std::size_t party, Pauli op);

using CorrectionPair = std::array<Pauli, 2>;

// Per-party homodyne results, the identified collapse branch and the
// corrections applied. output_modes lists the spatial modes the identified
// outcome assigns to the photons at the collapse stage.
struct MeasurementRecord {
    std::vector<ProbePhase> reported;
    std::vector<ProbePhase> true_phases;
    std::string outcome; // "phi1".."phi4", or the polarization bitstring for GHZ
    std::vector<Pauli> correction;
    std::vector<SpatialMode> output_modes;
};

struct ProtocolReport {
    StateVector final_state;
    double fidelity = 0.0;
    MeasurementRecord record;
    std::uint64_t seed = 0;
    bool success = false; // fidelity >= 1 - 1e-9
};

// --- two-qubit pipeline ------------------------------------------------

// Frequency-entangled pair source: (1/sqrt2) |H,a>|H,b> (|w1 w2> + |w2 w1>).
StateVector make_two_photon_source();

// Probe-pair to branch mapping. Zero labels raise MeasurementError.
TwoQubitOutcome identify_outcome(ProbePhase reported_a, ProbePhase reported_b);

// The probe pair a given branch imprints (inverse of identify_outcome).
std::array<ProbePhase, 2> phases_for_outcome(TwoQubitOutcome o);

// Spatial modes of the collapsed photons per branch: Phi1 (a2,b2),
// Phi2 (a1,b1), Phi3 (a2,b1), Phi4 (a1,b2).
std::array<SpatialMode, 2> collapse_modes(TwoQubitOutcome o);

// Output ports after the conversion network: Phi1 (c2,d2), Phi2 (c1,d1),
// Phi3 (c2,d1), Phi4 (c1,d2).
std::array<SpatialMode, 2> converted_modes(TwoQubitOutcome o);

// Canonical collapsed branch |phi_i> with exact 1/sqrt2 amplitudes at the
// branch's collapse modes.
StateVector canonical_branch(TwoQubitOutcome o);

// Bell target (|HH> + |VV>)/sqrt2 at the given (already up-converted) modes.
StateVector bell_phi_plus(const SpatialMode& mode_a, const SpatialMode& mode_b);

// Frequency-to-polarization conversion of a collapsed branch. The state must
// occupy the declared outcome's collapse modes (RoutingError otherwise).
// An alternative wiring can be supplied from a circuit-description file.
StateVector conversion_network(const StateVector& state, TwoQubitOutcome outcome);
StateVector conversion_network(const StateVector& state, TwoQubitOutcome outcome,
                               const CircuitDescription& conversion);

// Pauli pair mapping the up-converted branch i onto |phi+>. The table is
// derived once by exhaustive search over Pauli pairs against all four
// branches and verified to reach fidelity 1 before first use.
CorrectionPair correction_for(TwoQubitOutcome outcome);
const std::array<CorrectionPair, 4>& correction_table();

namespace testing {
// Fault-injection hook: corrupts the table correction_for hands out, so the
// correction-soundness acceptance criterion demonstrably fails.
void set_correction_table_fault(bool enabled);
} // namespace testing

// Deterministic front half of the two-qubit run: source, fiber dispersion,
// both collective noises, PBS + QND for both parties. Probes attached.
StateVector two_qubit_post_qnd_state(const NoiseParams& noise_a, const NoiseParams& noise_b,
                                     const FiberConfig& fiber);

struct TwoQubitTail {
    StateVector final_state;
    double fidelity = 0.0;
    CorrectionPair correction{Pauli::I, Pauli::I};
};

// Deterministic back half given a collapsed branch (probes discarded): the
// conversion network runs where the photons really are (true_outcome), the
// correction and the fidelity target are taken from the identified
// (reported) outcome.
TwoQubitTail two_qubit_finish(const StateVector& collapsed, TwoQubitOutcome true_outcome,
                              TwoQubitOutcome reported, const FiberConfig& fiber,
                              bool compensate,
                              const CircuitDescription* conversion = nullptr);

// Full pipeline: source -> fiber_phase -> noise -> PBS -> QND -> homodyne
// (both parties) -> identification from reported phases -> conversion ->
// up-conversion -> correction -> compensation -> fidelity against |phi+>.
ProtocolReport run_two_qubit(const NoiseParams& noise_a, const NoiseParams& noise_b,
                             const FiberConfig& fiber, const HomodyneModel& homodyne,
                             Rng& rng, bool compensate = true,
                             const CircuitDescription* conversion = nullptr);

// --- n-qubit GHZ pipeline ----------------------------------------------

// (1/sqrt2) |H...H> (|w1 w2 w1 ...> + complement), party i in channel mode
// party_wiring(n, i).input. n >= 2.
StateVector make_ghz_source(std::size_t n);

// Polarization bitstring the probe phases identify: theta -> '0' (H),
// theta' -> '1' (V).
std::string bits_from_phases(std::span<const ProbePhase> phases);

// Source -> per-channel noise -> per-party PBS + QND + homodyne -> bit-flip
// restoration of |0...0> from the reported bits -> per-party conversion ->
// up-conversion -> final bit-flips on the W2-leading parties -> fidelity
// against (|H...H> + |V...V>)/sqrt2. Odd n is an extrapolation beyond the
// two source frequency patterns and sits behind `experimental_odd_n`.
ProtocolReport run_ghz(std::size_t n, std::span<const NoiseParams> noises,
                       const HomodyneModel& homodyne, Rng& rng,
                       bool experimental_odd_n = false);

// GHZ target (|H...H> + |V...V>)/sqrt2 at the conversion output ports.
StateVector ghz_target(std::size_t n);

} // namespace entdist
