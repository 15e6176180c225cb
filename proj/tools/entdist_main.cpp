// entdist: command-line front end for the entanglement-distribution
// simulator. Subcommands: run-two-qubit, run-ghz, sweep, verify. Each run is
// configured by a JSON file plus flag overrides (flags win) and is fully
// deterministic given that configuration; seeds live in the config.
//
// Exit codes: 0 success, 1 simulation/acceptance failure, 2 usage/config
// error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entdist/acceptance.hpp"
#include "entdist/analysis.hpp"
#include "entdist/protocols.hpp"
#include "entdist/report_io.hpp"

namespace {

using nlohmann::json;
using namespace entdist;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json load_config(const std::string& path) {
    if (path.empty())
        return json::object();
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

double number_field(const json& j, const std::string& field, double fallback) {
    if (!j.contains(field))
        return fallback;
    if (!j.at(field).is_number())
        throw ConfigError("config field '" + field + "': expected a number");
    return j.at(field).get<double>();
}

std::uint64_t uint_field(const json& j, const std::string& field, std::uint64_t fallback) {
    if (!j.contains(field))
        return fallback;
    if (!j.at(field).is_number_unsigned() && !j.at(field).is_number_integer())
        throw ConfigError("config field '" + field + "': expected a nonnegative integer");
    const auto v = j.at(field).get<std::int64_t>();
    if (v < 0)
        throw ConfigError("config field '" + field + "': must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

bool bool_field(const json& j, const std::string& field, bool fallback) {
    if (!j.contains(field))
        return fallback;
    if (!j.at(field).is_boolean())
        throw ConfigError("config field '" + field + "': expected true or false");
    return j.at(field).get<bool>();
}

std::string string_field(const json& j, const std::string& field, const std::string& fallback) {
    if (!j.contains(field))
        return fallback;
    if (!j.at(field).is_string())
        throw ConfigError("config field '" + field + "': expected a string");
    return j.at(field).get<std::string>();
}

Amplitude complex_field(const json& j, const std::string& field) {
    if (!j.contains(field))
        throw ConfigError("config field '" + field + "': missing");
    const json& v = j.at(field);
    if (!v.is_array() || v.size() != 2 || !v.at(0).is_number() || !v.at(1).is_number())
        throw ConfigError("config field '" + field + "': expected [re, im]");
    return Amplitude{v.at(0).get<double>(), v.at(1).get<double>()};
}

FiberConfig fiber_from_config(const json& j) {
    const FiberConfig base = default_fiber();
    if (!j.contains("fiber"))
        return base;
    const json& f = j.at("fiber");
    if (!f.is_object())
        throw ConfigError("config field 'fiber': expected an object");
    const double la = number_field(f, "length_a", base.length_a);
    const double lb = number_field(f, "length_b", base.length_b);
    const double v = number_field(f, "velocity", base.velocity);
    const double w1 = number_field(f, "omega1", base.omega1);
    const double w2 = number_field(f, "omega2", base.omega2);
    if (!(la > 0.0))
        throw ConfigError("config field 'fiber.length_a': must be positive");
    if (!(lb > 0.0))
        throw ConfigError("config field 'fiber.length_b': must be positive");
    if (!(v > 0.0))
        throw ConfigError("config field 'fiber.velocity': must be positive");
    if (!(w1 > 0.0))
        throw ConfigError("config field 'fiber.omega1': must be positive");
    if (!(w2 > 0.0))
        throw ConfigError("config field 'fiber.omega2': must be positive");
    if (w1 == w2)
        throw ConfigError("config field 'fiber.omega2': must differ from omega1");
    return FiberConfig(la, lb, v, w1, w2);
}

NoiseParams noise_pair_from_json(const json& j, const std::string& a_key,
                                 const std::string& b_key) {
    const Amplitude a = complex_field(j, a_key);
    const Amplitude b = complex_field(j, b_key);
    try {
        return NoiseParams(a, b);
    } catch (const ParameterError&) {
        throw ConfigError("config fields '" + a_key + "'/'" + b_key +
                          "': |" + a_key + "|^2 + |" + b_key + "|^2 must equal 1");
    }
}

double checked_p_err(double p, const std::string& field) {
    if (!(p >= 0.0) || !(p <= 0.5))
        throw ConfigError("config field '" + field + "': must lie in [0, 0.5]");
    return p;
}

void print_summary(const char* what, std::size_t trials, double success_rate,
                   double mean_fidelity, const std::string& output) {
    std::cout << what << ": trials " << trials << ", success rate " << fmt(success_rate)
              << ", mean fidelity " << fmt(mean_fidelity) << ", reports written to " << output
              << "\n";
}

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double p_err = 0.0;
    std::string output;
    bool seed_set = false;
    bool trials_set = false;
    bool p_err_set = false;
    bool output_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_p_err = true) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--trials", flags.trials, "trial count (overrides config)")
        ->each([&](const std::string&) { flags.trials_set = true; });
    if (with_p_err)
        cmd->add_option("--p-err", flags.p_err, "homodyne flip probability (overrides config)")
            ->each([&](const std::string&) { flags.p_err_set = true; });
    cmd->add_option("--output", flags.output, "output file path (overrides config)")
        ->each([&](const std::string&) { flags.output_set = true; });
}

int cmd_run_two_qubit(const CommonFlags& flags) {
    const json cfg = load_config(flags.config_path);

    const std::uint64_t seed = flags.seed_set ? flags.seed : uint_field(cfg, "seed", 1);
    const std::size_t trials =
        flags.trials_set ? flags.trials
                         : static_cast<std::size_t>(uint_field(cfg, "trials", 1));
    const double p_err = checked_p_err(
        flags.p_err_set ? flags.p_err : number_field(cfg, "p_err", 0.0), "p_err");
    const std::string output = flags.output_set
                                   ? flags.output
                                   : string_field(cfg, "output", "two-qubit-reports.jsonl");
    if (trials < 1)
        throw ConfigError("config field 'trials': must be at least 1");

    MonteCarloOptions options;
    options.homodyne = HomodyneModel(p_err);
    options.fiber = fiber_from_config(cfg);
    options.compensate = bool_field(cfg, "compensate", true);

    if (cfg.contains("noise") && cfg.at("noise").is_object()) {
        const json& n = cfg.at("noise");
        options.fixed_noise = std::make_pair(noise_pair_from_json(n, "alpha", "beta"),
                                             noise_pair_from_json(n, "delta", "gamma"));
    } else if (cfg.contains("noise") && cfg.at("noise") != json("random")) {
        throw ConfigError("config field 'noise': expected \"random\" or an object with "
                          "alpha/beta/delta/gamma");
    }

    std::vector<ReportRecord> records;
    records.reserve(trials);
    options.sink = [&](std::size_t trial, const ProtocolReport& report) {
        records.push_back(ReportRecord{"two-qubit", trial, report});
    };

    const MonteCarloPoint point = run_monte_carlo(trials, options, seed);
    write_report_file(output, records);
    print_summary("run-two-qubit", trials, point.success_rate, point.mean_fidelity, output);
    return 0;
}

int cmd_run_ghz(const CommonFlags& flags, std::size_t n, bool n_set, bool experimental_odd_n) {
    const json cfg = load_config(flags.config_path);

    const std::size_t parties =
        n_set ? n : static_cast<std::size_t>(uint_field(cfg, "n", 4));
    const std::uint64_t seed = flags.seed_set ? flags.seed : uint_field(cfg, "seed", 1);
    const std::size_t trials =
        flags.trials_set ? flags.trials
                         : static_cast<std::size_t>(uint_field(cfg, "trials", 1));
    const double p_err = checked_p_err(
        flags.p_err_set ? flags.p_err : number_field(cfg, "p_err", 0.0), "p_err");
    const std::string output =
        flags.output_set ? flags.output : string_field(cfg, "output", "ghz-reports.jsonl");
    if (parties < 2)
        throw ConfigError("config field 'n': must be at least 2");
    if (trials < 1)
        throw ConfigError("config field 'trials': must be at least 1");

    GhzMonteCarloOptions options;
    options.homodyne = HomodyneModel(p_err);
    options.experimental_odd_n =
        experimental_odd_n || bool_field(cfg, "experimental_odd_n", false);
    if (parties % 2 != 0 && !options.experimental_odd_n)
        throw ConfigError("config field 'n': odd party counts need --experimental-odd-n "
                          "(the frequency pattern extrapolates beyond the even-n scheme)");

    if (cfg.contains("noises") && cfg.at("noises").is_array()) {
        const json& list = cfg.at("noises");
        if (list.size() != parties)
            throw ConfigError("config field 'noises': expected " + std::to_string(parties) +
                              " [beta0, beta1] pairs");
        for (const auto& entry : list) {
            if (!entry.is_object())
                throw ConfigError("config field 'noises': each entry must be an object with "
                                  "beta0/beta1");
            options.fixed_noises.push_back(noise_pair_from_json(entry, "beta0", "beta1"));
        }
    } else if (cfg.contains("noises") && cfg.at("noises") != json("random")) {
        throw ConfigError("config field 'noises': expected \"random\" or a list of "
                          "beta0/beta1 objects");
    }

    std::vector<ReportRecord> records;
    records.reserve(trials);
    options.sink = [&](std::size_t trial, const ProtocolReport& report) {
        records.push_back(ReportRecord{"ghz", trial, report});
    };

    const GhzMonteCarloPoint point = run_ghz_monte_carlo(trials, parties, options, seed);
    write_report_file(output, records);
    print_summary("run-ghz", trials, point.success_rate, point.mean_fidelity, output);
    return 0;
}

int cmd_sweep(const CommonFlags& flags) {
    const json cfg = load_config(flags.config_path);

    SweepSpec spec;
    const std::string variable_name = string_field(cfg, "variable", "homodyne-err");
    const auto variable = sweep_variable_from_name(variable_name);
    if (!variable)
        throw ConfigError("config field 'variable': unknown sweep variable '" + variable_name +
                          "' (expected homodyne-err, fiber-delta or noise-angle)");
    spec.variable = *variable;

    if (!cfg.contains("grid") || !cfg.at("grid").is_array())
        throw ConfigError("config field 'grid': expected an array of numbers");
    for (const auto& v : cfg.at("grid")) {
        if (!v.is_number())
            throw ConfigError("config field 'grid': expected an array of numbers");
        spec.grid.push_back(v.get<double>());
    }

    spec.trials_per_point =
        flags.trials_set ? flags.trials
                         : static_cast<std::size_t>(uint_field(cfg, "trials_per_point", 1000));
    spec.seed = flags.seed_set ? flags.seed : uint_field(cfg, "seed", 1);
    spec.base_p_err = checked_p_err(
        flags.p_err_set ? flags.p_err : number_field(cfg, "p_err", 0.0), "p_err");
    spec.fiber = fiber_from_config(cfg);
    spec.compensate = bool_field(cfg, "compensate", true);
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }

    const std::string output =
        flags.output_set ? flags.output : string_field(cfg, "output", "sweep.csv");
    std::string jsonl = output;
    if (jsonl.size() > 4 && jsonl.substr(jsonl.size() - 4) == ".csv")
        jsonl = jsonl.substr(0, jsonl.size() - 4) + ".jsonl";
    else
        jsonl += ".jsonl";

    const SweepResult result = sweep(spec);
    write_sweep_csv_file(output, result);
    write_sweep_jsonl_file(jsonl, result);

    std::cout << "sweep: " << result.points.size() << " grid points, "
              << spec.trials_per_point << " trials each, table written to " << output
              << ", records to " << jsonl << "\n";
    return 0;
}

int cmd_verify(bool corrupt_correction_table) {
    if (corrupt_correction_table)
        entdist::testing::set_correction_table_fault(true);
    const auto results = acceptance::run_all();
    for (const auto& result : results)
        std::cout << acceptance::format_line(result) << "\n";
    if (!acceptance::all_passed(results)) {
        std::cout << "verify: FAILED criteria:";
        for (const auto& result : results)
            if (!result.passed)
                std::cout << ' ' << result.name;
        std::cout << "\n";
        return 1;
    }
    std::cout << "verify: all criteria passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entdist: deterministic entanglement distribution over collective-noise "
                 "channels, simulated"};
    app.require_subcommand(1);

    CommonFlags two_qubit_flags;
    CLI::App* two_qubit = app.add_subcommand(
        "run-two-qubit", "run the two-photon Bell distribution pipeline");
    add_common_flags(two_qubit, two_qubit_flags);

    CommonFlags ghz_flags;
    std::size_t ghz_n = 4;
    bool ghz_n_set = false;
    bool odd_flag = false;
    CLI::App* ghz = app.add_subcommand("run-ghz", "run the n-party GHZ distribution pipeline");
    add_common_flags(ghz, ghz_flags);
    ghz->add_option("--n", ghz_n, "party count (overrides config)")
        ->each([&](const std::string&) { ghz_n_set = true; });
    ghz->add_flag("--experimental-odd-n", odd_flag,
                  "allow odd party counts (extrapolates the frequency pattern)");

    CommonFlags sweep_flags;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "sweep a parameter grid over the two-qubit pipeline");
    add_common_flags(sweep_cmd, sweep_flags);

    bool corrupt_table = false;
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite (fixed seeds)");
    verify->add_flag("--corrupt-correction-table", corrupt_table,
                     "fault-injection hook: corrupt the correction table")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (two_qubit->parsed())
            return cmd_run_two_qubit(two_qubit_flags);
        if (ghz->parsed())
            return cmd_run_ghz(ghz_flags, ghz_n, ghz_n_set, odd_flag);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_flags);
        if (verify->parsed())
            return cmd_verify(corrupt_table);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
