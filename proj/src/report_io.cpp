#include "entdist/report_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entdist {

namespace {

using nlohmann::json;

json state_to_json(const StateVector& state) {
    json terms = json::array();
    for (const auto& [ket, amp] : state.terms()) {
        json photons = json::array();
        for (const auto& ph : ket.photons)
            photons.push_back({to_string(ph.pol), to_string(ph.freq), ph.mode.label});
        json probes = json::array();
        for (const auto& p : ket.probes)
            probes.push_back(to_string(p));
        terms.push_back({{"photons", photons},
                         {"probes", probes},
                         {"re", amp.real()},
                         {"im", amp.imag()}});
    }
    return {{"photon_count", state.photon_count()}, {"terms", terms}};
}

Polarization parse_pol(const std::string& s) {
    if (s == "H")
        return Polarization::H;
    if (s == "V")
        return Polarization::V;
    throw ParameterError("report parse: bad polarization '" + s + "'");
}

FrequencyLabel parse_freq(const std::string& s) {
    if (s == "w1")
        return FrequencyLabel::W1;
    if (s == "w2")
        return FrequencyLabel::W2;
    if (s == "w0")
        return FrequencyLabel::W0;
    throw ParameterError("report parse: bad frequency '" + s + "'");
}

ProbePhase parse_probe(const std::string& s) {
    if (s == "zero")
        return ProbePhase::Zero;
    if (s == "theta")
        return ProbePhase::Theta;
    if (s == "theta_prime")
        return ProbePhase::ThetaPrime;
    throw ParameterError("report parse: bad probe phase '" + s + "'");
}

StateVector state_from_json(const json& j) {
    std::vector<std::pair<BasisKet, Amplitude>> terms;
    for (const auto& term : j.at("terms")) {
        BasisKet ket;
        for (const auto& ph : term.at("photons"))
            ket.photons.push_back(PhotonKet{parse_pol(ph.at(0).get<std::string>()),
                                            parse_freq(ph.at(1).get<std::string>()),
                                            SpatialMode{ph.at(2).get<std::string>()}});
        for (const auto& p : term.at("probes"))
            ket.probes.push_back(parse_probe(p.get<std::string>()));
        terms.emplace_back(std::move(ket),
                           Amplitude{term.at("re").get<double>(), term.at("im").get<double>()});
    }
    return StateVector::from_terms(std::move(terms));
}

json phases_to_json(const std::vector<ProbePhase>& phases) {
    json out = json::array();
    for (const auto p : phases)
        out.push_back(to_string(p));
    return out;
}

std::vector<ProbePhase> phases_from_json(const json& j) {
    std::vector<ProbePhase> out;
    for (const auto& p : j)
        out.push_back(parse_probe(p.get<std::string>()));
    return out;
}

} // namespace

std::string report_record_to_json_line(const ReportRecord& record) {
    const ProtocolReport& r = record.report;
    json corrections = json::array();
    for (const auto p : r.record.correction)
        corrections.push_back(to_string(p));
    json modes = json::array();
    for (const auto& m : r.record.output_modes)
        modes.push_back(m.label);

    const json j = {{"schema_version", kSchemaVersion},
                    {"protocol", record.protocol},
                    {"trial", record.trial},
                    {"seed", r.seed},
                    {"outcome", r.record.outcome},
                    {"fidelity", r.fidelity},
                    {"success", r.success},
                    {"reported_phases", phases_to_json(r.record.reported)},
                    {"true_phases", phases_to_json(r.record.true_phases)},
                    {"correction", corrections},
                    {"output_modes", modes},
                    {"final_state", state_to_json(r.final_state)}};
    return j.dump();
}

ReportRecord parse_report_record(const std::string& json_line) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw ParameterError(std::string("report parse: ") + e.what());
    }
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw ParameterError("report parse: unsupported schema_version");

    ReportRecord record;
    record.protocol = j.at("protocol").get<std::string>();
    record.trial = j.at("trial").get<std::size_t>();
    ProtocolReport& r = record.report;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.fidelity = j.at("fidelity").get<double>();
    r.success = j.at("success").get<bool>();
    r.record.outcome = j.at("outcome").get<std::string>();
    r.record.reported = phases_from_json(j.at("reported_phases"));
    r.record.true_phases = phases_from_json(j.at("true_phases"));
    for (const auto& p : j.at("correction")) {
        const auto parsed = pauli_from_name(p.get<std::string>());
        if (!parsed)
            throw ParameterError("report parse: bad correction label");
        r.record.correction.push_back(*parsed);
    }
    for (const auto& m : j.at("output_modes"))
        r.record.output_modes.push_back(SpatialMode{m.get<std::string>()});
    r.final_state = state_from_json(j.at("final_state"));
    return record;
}

void write_report_file(const std::string& path, const std::vector<ReportRecord>& records) {
    std::ofstream out(path);
    if (!out)
        throw ParameterError("cannot open output file '" + path + "'");
    for (const auto& record : records)
        out << report_record_to_json_line(record) << "\n";
}

std::vector<ReportRecord> read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParameterError("cannot open report file '" + path + "'");
    std::vector<ReportRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        records.push_back(parse_report_record(line));
    }
    return records;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "value,mean_fidelity,success_rate,phi1,phi2,phi3,phi4,std_error\n";
    for (const auto& point : result.points) {
        const double trials = static_cast<double>(point.stats.trials);
        out << format_double(point.value) << ',' << format_double(point.stats.mean_fidelity)
            << ',' << format_double(point.stats.success_rate);
        for (const auto count : point.stats.outcome_counts)
            out << ',' << format_double(static_cast<double>(count) / trials);
        out << ',' << format_double(point.stats.std_error) << "\n";
    }
    return out.str();
}

std::vector<SweepCsvRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ParameterError("sweep csv: empty file");
    if (line.rfind("value,mean_fidelity", 0) != 0)
        throw ParameterError("sweep csv: unexpected header '" + line + "'");

    std::vector<SweepCsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(fields, field, ','))
            try {
                values.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ParameterError("sweep csv line " + std::to_string(line_no) +
                                     ": bad number '" + field + "'");
            }
        if (values.size() != 8)
            throw ParameterError("sweep csv line " + std::to_string(line_no) +
                                 ": expected 8 columns, got " + std::to_string(values.size()));
        SweepCsvRow row;
        row.value = values[0];
        row.mean_fidelity = values[1];
        row.success_rate = values[2];
        row.outcome_freq = {values[3], values[4], values[5], values[6]};
        row.std_error = values[7];
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv_file(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out)
        throw ParameterError("cannot open output file '" + path + "'");
    out << sweep_to_csv(result);
}

std::vector<SweepCsvRow> read_sweep_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParameterError("cannot open sweep csv file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sweep_csv(buf.str());
}

std::string sweep_point_to_json_line(const SweepResult& result, std::size_t index) {
    const SweepPoint& point = result.points.at(index);
    const json j = {{"schema_version", kSchemaVersion},
                    {"variable", to_string(result.spec.variable)},
                    {"point_index", index},
                    {"value", point.value},
                    {"trials", point.stats.trials},
                    {"seed", result.spec.seed},
                    {"mean_fidelity", point.stats.mean_fidelity},
                    {"success_rate", point.stats.success_rate},
                    {"outcome_counts", point.stats.outcome_counts},
                    {"std_error", point.stats.std_error}};
    return j.dump();
}

void write_sweep_jsonl_file(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out)
        throw ParameterError("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < result.points.size(); ++i)
        out << sweep_point_to_json_line(result, i) << "\n";
}

SweepPointRecord parse_sweep_point_record(const std::string& json_line) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw ParameterError(std::string("sweep record parse: ") + e.what());
    }
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw ParameterError("sweep record parse: unsupported schema_version");

    SweepPointRecord record;
    record.variable = j.at("variable").get<std::string>();
    record.point_index = j.at("point_index").get<std::size_t>();
    record.value = j.at("value").get<double>();
    record.seed = j.at("seed").get<std::uint64_t>();
    record.point.value = record.value;
    record.point.stats.trials = j.at("trials").get<std::size_t>();
    record.point.stats.mean_fidelity = j.at("mean_fidelity").get<double>();
    record.point.stats.success_rate = j.at("success_rate").get<double>();
    record.point.stats.std_error = j.at("std_error").get<double>();
    const auto& counts = j.at("outcome_counts");
    if (!counts.is_array() || counts.size() != 4)
        throw ParameterError("sweep record parse: outcome_counts must hold four entries");
    for (std::size_t i = 0; i < 4; ++i)
        record.point.stats.outcome_counts[i] = counts.at(i).get<std::uint64_t>();
    return record;
}

std::vector<SweepPointRecord> read_sweep_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParameterError("cannot open sweep records file '" + path + "'");
    std::vector<SweepPointRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        records.push_back(parse_sweep_point_record(line));
    }
    return records;
}

} // namespace entdist
