#pragma once

// Serialization of protocol reports (JSON, one record per line) and sweep
// results (fixed-column CSV plus JSONL records), with parsers that read back
// every file the CLI writes. Formats documented in docs/file_formats.md;
// records carry a schema_version field.

#include <string>
#include <vector>

#include "entdist/analysis.hpp"
#include "entdist/protocols.hpp"

namespace entdist {

inline constexpr int kSchemaVersion = 1;

struct ReportRecord {
    std::string protocol; // "two-qubit" or "ghz"
    std::size_t trial = 0;
    ProtocolReport report;
};

std::string report_record_to_json_line(const ReportRecord& record);
ReportRecord parse_report_record(const std::string& json_line);

void write_report_file(const std::string& path, const std::vector<ReportRecord>& records);
std::vector<ReportRecord> read_report_file(const std::string& path);

// CSV columns, fixed order:
//   value,mean_fidelity,success_rate,phi1,phi2,phi3,phi4,std_error
// phi1..phi4 are relative outcome frequencies (counts / trials).
std::string sweep_to_csv(const SweepResult& result);

struct SweepCsvRow {
    double value = 0.0;
    double mean_fidelity = 0.0;
    double success_rate = 0.0;
    std::array<double, 4> outcome_freq{};
    double std_error = 0.0;
};

std::vector<SweepCsvRow> parse_sweep_csv(const std::string& text);
void write_sweep_csv_file(const std::string& path, const SweepResult& result);
std::vector<SweepCsvRow> read_sweep_csv_file(const std::string& path);

// JSONL sweep records: one per grid point with raw counts and the spec that
// produced them.
std::string sweep_point_to_json_line(const SweepResult& result, std::size_t index);
void write_sweep_jsonl_file(const std::string& path, const SweepResult& result);

struct SweepPointRecord {
    std::string variable;
    std::size_t point_index = 0;
    double value = 0.0;
    std::uint64_t seed = 0;
    SweepPoint point;
};

SweepPointRecord parse_sweep_point_record(const std::string& json_line);
std::vector<SweepPointRecord> read_sweep_jsonl_file(const std::string& path);

} // namespace entdist
