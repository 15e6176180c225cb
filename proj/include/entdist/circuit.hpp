#pragma once

// Circuit-description files: an ordered list of deterministic label-routing
// elements (pbs, qnd, wdm, hwp) with explicit mode wiring, one element per
// line. The protocols module consumes these; the default two-qubit and GHZ
// wirings are generated here and can be serialized, edited and re-loaded so
// alternative wirings stay testable. Format documented in
// docs/circuit_format.md.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "entdist/elements.hpp"
#include "entdist/state.hpp"

namespace entdist {

struct PbsElement {
    std::size_t party;
    SpatialMode in;
    SpatialMode h_out;
    SpatialMode v_out;
};

struct QndElement {
    std::size_t party;
    SpatialMode monitored;
    SpatialMode alt;
};

struct WdmElement {
    std::size_t party;
    SpatialMode in;
    SpatialMode w1_out;
    SpatialMode w2_out;
};

struct HwpElement {
    std::size_t party;
    SpatialMode mode;
};

using CircuitElement = std::variant<PbsElement, QndElement, WdmElement, HwpElement>;

struct CircuitDescription {
    int version = 1;
    std::size_t photon_count = 0;
    ModeSet modes;
    std::vector<CircuitElement> elements;

    // Wiring sanity: every referenced mode declared, party indices in range,
    // per-element port constraints. Throws ElementError / ParameterError.
    void validate() const;
};

// Parses the structured-text format. Line and field positions are reported
// in error messages.
CircuitDescription parse_circuit(const std::string& text);
CircuitDescription load_circuit_file(const std::string& path);

std::string to_text(const CircuitDescription& circuit);

// Applies the elements in order. The circuit's declared mode alphabet bounds
// every produced label.
StateVector run_circuit(const StateVector& state, const CircuitDescription& circuit);

// Per-party mode names used by the built-in wirings. Channel modes are
// 'a', 'b', ...; conversion outputs continue the alphabet after the inputs,
// so the two-party case lands on the a,b -> c,d naming.
struct PartyWiring {
    SpatialMode input;     // channel mode entering the PBS
    SpatialMode upper;     // PBS V port  (<base>1)
    SpatialMode lower;     // PBS H port  (<base>2)
    SpatialMode arm_w1;    // conversion arm carrying W1
    SpatialMode arm_w2;    // conversion arm carrying W2 (R90 plate here)
    SpatialMode out_upper; // conversion output port <out>1
    SpatialMode out_lower; // conversion output port <out>2
};

PartyWiring party_wiring(std::size_t n_parties, std::size_t party);

// PBS + QND for every party: the receive side of the distribution setup.
CircuitDescription front_end_circuit(std::size_t n_parties);

// Frequency-to-polarization converter for every party: WDM from either PBS
// port into shared arms, R90 on the W2 arm, merge PBS into the output ports.
CircuitDescription conversion_circuit(std::size_t n_parties);

} // namespace entdist
