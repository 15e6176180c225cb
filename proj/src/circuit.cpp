#include "entdist/circuit.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace entdist {

namespace {

std::string mode_base(std::size_t index) {
    if (index < 26)
        return std::string(1, static_cast<char>('a' + index));
    return "z" + std::to_string(index);
}

void require_declared(const CircuitDescription& c, const SpatialMode& m, const char* what) {
    if (!c.modes.count(m))
        throw ElementError(std::string("circuit: ") + what + " references undeclared mode '" +
                           m.label + "'");
}

void require_party(const CircuitDescription& c, std::size_t party, const char* what) {
    if (party >= c.photon_count)
        throw ElementError(std::string("circuit: ") + what + " party " + std::to_string(party) +
                           " out of range for " + std::to_string(c.photon_count) + " photons");
}

} // namespace

void CircuitDescription::validate() const {
    if (version != 1)
        throw ParameterError("circuit: unsupported version " + std::to_string(version));
    if (photon_count == 0)
        throw ParameterError("circuit: photon count missing or zero");
    for (const auto& m : modes)
        if (m.label.empty())
            throw ParameterError("circuit: empty mode label in alphabet");

    for (const auto& element : elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, PbsElement>) {
                    require_party(*this, e.party, "pbs");
                    require_declared(*this, e.in, "pbs");
                    require_declared(*this, e.h_out, "pbs");
                    require_declared(*this, e.v_out, "pbs");
                    if (e.h_out == e.v_out)
                        throw ElementError("circuit: pbs output ports must differ");
                } else if constexpr (std::is_same_v<T, QndElement>) {
                    require_party(*this, e.party, "qnd");
                    require_declared(*this, e.monitored, "qnd");
                    require_declared(*this, e.alt, "qnd");
                    if (e.monitored == e.alt)
                        throw ElementError("circuit: qnd modes must differ");
                } else if constexpr (std::is_same_v<T, WdmElement>) {
                    require_party(*this, e.party, "wdm");
                    require_declared(*this, e.in, "wdm");
                    require_declared(*this, e.w1_out, "wdm");
                    require_declared(*this, e.w2_out, "wdm");
                    if (e.w1_out == e.w2_out)
                        throw ElementError("circuit: wdm output ports must differ");
                } else {
                    require_party(*this, e.party, "hwp");
                    require_declared(*this, e.mode, "hwp");
                }
            },
            element);
    }
}

namespace {

struct LineFields {
    std::string kind;
    std::map<std::string, std::string> kv;
};

LineFields split_fields(const std::string& line, std::size_t line_no) {
    LineFields out;
    std::istringstream iss(line);
    iss >> out.kind;
    std::string token;
    while (iss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= token.size())
            throw ParameterError("circuit line " + std::to_string(line_no) +
                                 ": expected key=value, got '" + token + "'");
        out.kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return out;
}

std::string field(const LineFields& f, const char* key, std::size_t line_no) {
    auto it = f.kv.find(key);
    if (it == f.kv.end())
        throw ParameterError("circuit line " + std::to_string(line_no) + ": element '" + f.kind +
                             "' missing field '" + key + "'");
    return it->second;
}

std::size_t uint_field(const LineFields& f, const char* key, std::size_t line_no) {
    const std::string v = field(f, key, line_no);
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
        throw ParameterError("circuit line " + std::to_string(line_no) + ": field '" + key +
                             "' is not an unsigned integer: '" + v + "'");
    }
}

} // namespace

CircuitDescription parse_circuit(const std::string& text) {
    CircuitDescription circuit;
    bool saw_version = false;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;

        std::string keyword;
        {
            std::istringstream iss(line);
            iss >> keyword;
        }
        if (keyword == "version") {
            std::istringstream iss(line);
            std::string kw;
            iss >> kw >> circuit.version;
            if (!iss)
                throw ParameterError("circuit line " + std::to_string(line_no) +
                                     ": unreadable version");
            saw_version = true;
            continue;
        }
        if (keyword == "photons") {
            std::istringstream iss(line);
            std::string kw;
            iss >> kw >> circuit.photon_count;
            if (!iss)
                throw ParameterError("circuit line " + std::to_string(line_no) +
                                     ": unreadable photon count");
            continue;
        }
        if (keyword == "modes") {
            std::istringstream iss(line);
            std::string kw, m;
            iss >> kw;
            while (iss >> m)
                circuit.modes.insert(SpatialMode{m});
            continue;
        }

        const LineFields f = split_fields(line, line_no);
        if (f.kind == "pbs") {
            circuit.elements.push_back(PbsElement{uint_field(f, "party", line_no),
                                                  field(f, "in", line_no),
                                                  field(f, "h", line_no),
                                                  field(f, "v", line_no)});
        } else if (f.kind == "qnd") {
            circuit.elements.push_back(QndElement{uint_field(f, "party", line_no),
                                                  field(f, "monitored", line_no),
                                                  field(f, "alt", line_no)});
        } else if (f.kind == "wdm") {
            circuit.elements.push_back(WdmElement{uint_field(f, "party", line_no),
                                                  field(f, "in", line_no),
                                                  field(f, "w1", line_no),
                                                  field(f, "w2", line_no)});
        } else if (f.kind == "hwp") {
            circuit.elements.push_back(HwpElement{uint_field(f, "party", line_no),
                                                  field(f, "mode", line_no)});
        } else {
            throw ParameterError("circuit line " + std::to_string(line_no) +
                                 ": unknown element '" + f.kind + "'");
        }
    }
    if (!saw_version)
        throw ParameterError("circuit: missing 'version' line");
    circuit.validate();
    return circuit;
}

CircuitDescription load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParameterError("circuit: cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_circuit(buf.str());
}

std::string to_text(const CircuitDescription& circuit) {
    std::ostringstream out;
    out << "version " << circuit.version << "\n";
    out << "photons " << circuit.photon_count << "\n";
    out << "modes";
    for (const auto& m : circuit.modes)
        out << ' ' << m.label;
    out << "\n";
    for (const auto& element : circuit.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, PbsElement>) {
                    out << "pbs party=" << e.party << " in=" << e.in.label
                        << " h=" << e.h_out.label << " v=" << e.v_out.label << "\n";
                } else if constexpr (std::is_same_v<T, QndElement>) {
                    out << "qnd party=" << e.party << " monitored=" << e.monitored.label
                        << " alt=" << e.alt.label << "\n";
                } else if constexpr (std::is_same_v<T, WdmElement>) {
                    out << "wdm party=" << e.party << " in=" << e.in.label
                        << " w1=" << e.w1_out.label << " w2=" << e.w2_out.label << "\n";
                } else {
                    out << "hwp party=" << e.party << " mode=" << e.mode.label << "\n";
                }
            },
            element);
    }
    return out.str();
}

StateVector run_circuit(const StateVector& state, const CircuitDescription& circuit) {
    circuit.validate();
    if (state.photon_count() != circuit.photon_count)
        throw DimensionError("run_circuit: state photon count differs from circuit");

    StateVector current = state;
    for (const auto& element : circuit.elements) {
        current = std::visit(
            [&](const auto& e) -> StateVector {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, PbsElement>) {
                    return apply_pbs(current, e.party, e.in, e.h_out, e.v_out);
                } else if constexpr (std::is_same_v<T, QndElement>) {
                    return cross_kerr_qnd(current, QndConfig(e.party, e.monitored, e.alt));
                } else if constexpr (std::is_same_v<T, WdmElement>) {
                    return apply_wdm(current, e.party, e.in, e.w1_out, e.w2_out);
                } else {
                    return apply_hwp_r90(current, e.party, e.mode);
                }
            },
            element);
    }
    return current;
}

PartyWiring party_wiring(std::size_t n_parties, std::size_t party) {
    const std::string base = mode_base(party);
    const std::string out = mode_base(n_parties + party);
    PartyWiring w;
    w.input = SpatialMode{base};
    w.upper = SpatialMode{base + "1"};
    w.lower = SpatialMode{base + "2"};
    w.arm_w1 = SpatialMode{base + "w1"};
    w.arm_w2 = SpatialMode{base + "w2"};
    w.out_upper = SpatialMode{out + "1"};
    w.out_lower = SpatialMode{out + "2"};
    return w;
}

CircuitDescription front_end_circuit(std::size_t n_parties) {
    CircuitDescription circuit;
    circuit.photon_count = n_parties;
    for (std::size_t i = 0; i < n_parties; ++i) {
        const PartyWiring w = party_wiring(n_parties, i);
        circuit.modes.insert(w.input);
        circuit.modes.insert(w.upper);
        circuit.modes.insert(w.lower);
        // H transmits to the lower port, V reflects to the upper port; the
        // QND then tags the H path with Theta.
        circuit.elements.push_back(PbsElement{i, w.input, w.lower, w.upper});
        circuit.elements.push_back(QndElement{i, w.lower, w.upper});
    }
    circuit.validate();
    return circuit;
}

CircuitDescription conversion_circuit(std::size_t n_parties) {
    CircuitDescription circuit;
    circuit.photon_count = n_parties;
    for (std::size_t i = 0; i < n_parties; ++i) {
        const PartyWiring w = party_wiring(n_parties, i);
        circuit.modes.insert(w.upper);
        circuit.modes.insert(w.lower);
        circuit.modes.insert(w.arm_w1);
        circuit.modes.insert(w.arm_w2);
        circuit.modes.insert(w.out_upper);
        circuit.modes.insert(w.out_lower);
        // Both PBS ports feed the same pair of frequency arms; the photon
        // occupies exactly one port per term.
        circuit.elements.push_back(WdmElement{i, w.upper, w.arm_w1, w.arm_w2});
        circuit.elements.push_back(WdmElement{i, w.lower, w.arm_w1, w.arm_w2});
        circuit.elements.push_back(HwpElement{i, w.arm_w2});
        // Merge PBS: H from the W1 arm and V from the W2 arm exit the lower
        // port; the orthogonal combinations exit the upper port.
        circuit.elements.push_back(PbsElement{i, w.arm_w1, w.out_lower, w.out_upper});
        circuit.elements.push_back(PbsElement{i, w.arm_w2, w.out_upper, w.out_lower});
    }
    circuit.validate();
    return circuit;
}

} // namespace entdist
