#pragma once

// One operation per physical device of the distribution setup: collective
// channel noise, polarizing beam splitters, cross-Kerr QND taggers, homodyne
// probe readout, wavelength division multiplexers, half-wave plates, fiber
// dispersion phase and its compensation, and frequency up-conversion.
// All are stateless transformations over immutable StateVectors.

#include <complex>
#include <span>

#include "entdist/state.hpp"

namespace entdist {

// One channel's collective-noise pair. |alpha|^2 + |beta|^2 = 1 within 1e-12.
// Parameters are complex; the constraint fixes only the magnitudes.
struct NoiseParams {
    Amplitude alpha;
    Amplitude beta;

    NoiseParams(Amplitude a, Amplitude b);
    static NoiseParams identity() { return NoiseParams({1.0, 0.0}, {0.0, 0.0}); }
};

// Cross-Kerr QND wiring for one party: photons in monitored_mode (the H path)
// imprint Theta on the party's probe, photons in alt_mode imprint ThetaPrime.
struct QndConfig {
    std::size_t party;
    SpatialMode monitored_mode;
    SpatialMode alt_mode;

    QndConfig(std::size_t p, SpatialMode monitored, SpatialMode alt);
};

// Fiber geometry for the dispersion phase
//   delta_phi = (1/v) * [(w2 - w1) * L_A + (w1 - w2) * L_B].
struct FiberConfig {
    double length_a;
    double length_b;
    double velocity;
    double omega1;
    double omega2;

    FiberConfig(double la, double lb, double v, double w1, double w2);
    double delta_phi() const;
};

// Homodyne readout imperfection: probability that a party's reported phase
// flips Theta <-> ThetaPrime. The flip affects the report only, never the
// physical collapse.
struct HomodyneModel {
    double p_err;

    explicit HomodyneModel(double p);
};

// Collective noise on one party's photon: |H> -> alpha|H> + beta|V>,
// completed to the unitary |V> -> -conj(beta)|H> + conj(alpha)|V>.
// Frequency and mode labels untouched.
StateVector apply_collective_noise(const StateVector& state, std::size_t party,
                                   const NoiseParams& noise);

// Polarizing beam splitter: photons of `party` sitting in `in_mode` are
// relabeled to h_out when H, v_out when V. Terms where the photon is
// elsewhere pass through unchanged.
StateVector apply_pbs(const StateVector& state, std::size_t party, const SpatialMode& in_mode,
                      const SpatialMode& h_out, const SpatialMode& v_out);

// Cross-Kerr QND tag: sets the party's probe label per the photon's mode
// without touching any photon label. The probe must still be Zero.
StateVector cross_kerr_qnd(const StateVector& state, const QndConfig& cfg);

struct HomodyneResult {
    ProbePhase reported;
    ProbePhase true_outcome;
    StateVector state;
};

// X homodyne readout of one party's probe: collapses the probe register at
// `party` onto one phase label (sampling by subspace weight), then reports
// that label, flipped Theta <-> ThetaPrime with probability model.p_err.
HomodyneResult homodyne_measure(const StateVector& state, std::size_t party,
                                const HomodyneModel& model, Rng& rng);

// Wavelength division multiplexer: photons of `party` in `in_mode` are routed
// by frequency, W1 -> w1_out, W2 -> w2_out. A W0 photon at the input is an
// error (frequency already erased).
StateVector apply_wdm(const StateVector& state, std::size_t party, const SpatialMode& in_mode,
                      const SpatialMode& w1_out, const SpatialMode& w2_out);

// Half-wave plate at 45 degrees sitting in `mode`: swaps H <-> V for terms
// where the party's photon occupies that mode, identity elsewhere.
StateVector apply_hwp_r90(const StateVector& state, std::size_t party, const SpatialMode& mode);

// Fiber dispersion on a frequency-anticorrelated photon pair: the
// |w2 w1>-ordered term picks up exp(i * delta_phi), the |w1 w2> term is the
// phase reference.
StateVector fiber_phase(const StateVector& state, const FiberConfig& cfg);

// Inverse of fiber_phase. Before conversion it acts on the |w2 w1> frequency
// pattern; after conversion (no anticorrelated frequencies left) the phase
// has been transferred to polarization and the all-V term is rotated back.
StateVector compensate_phase(const StateVector& state, const FiberConfig& cfg);

// Frequency up-conversion: erases which-frequency information for the listed
// parties by mapping their labels to W0. Newly colliding kets are summed; a
// post-erasure norm off unity by more than 1e-9 raises ErasureError.
StateVector frequency_upconvert(const StateVector& state, std::span<const std::size_t> parties);

} // namespace entdist
