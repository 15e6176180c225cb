#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "entdist/report_io.hpp"

using namespace entdist;

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "entdist_cli_tests";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    const fs::path out = temp_dir() / "stdout.txt";
    const fs::path err = temp_dir() / "stderr.txt";
    const std::string cmd = std::string(ENTDIST_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
#ifdef WEXITSTATUS
    result.exit_code = WEXITSTATUS(status);
#else
    result.exit_code = status;
#endif
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::string write_config(const char* name, const std::string& body) {
    const fs::path path = temp_dir() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

} // namespace

TEST_CASE("run-two-qubit: identity noise, one trial, Phi1 with fidelity 1") {
    const std::string reports = (temp_dir() / "identity.jsonl").string();
    const std::string config = write_config("identity.json", R"({
        "noise": {"alpha": [1, 0], "beta": [0, 0], "delta": [1, 0], "gamma": [0, 0]},
        "trials": 1,
        "seed": 7,
        "p_err": 0.0
    })");
    const CliResult r =
        run_cli("run-two-qubit --config " + config + " --output " + reports);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("success rate 1") != std::string::npos);

    const auto loaded = read_report_file(reports);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].report.record.outcome == "phi1");
    CHECK(loaded[0].report.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(loaded[0].report.success);
}

TEST_CASE("run-two-qubit: 1000 random-noise trials at perfect readout all succeed") {
    const std::string reports = (temp_dir() / "random.jsonl").string();
    const CliResult r = run_cli("run-two-qubit --trials 1000 --seed 20 --p-err 0 --output " +
                                reports);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("success rate 1") != std::string::npos);
    const auto loaded = read_report_file(reports);
    CHECK(loaded.size() == 1000);
}

TEST_CASE("run-two-qubit: a negative fiber length is refused naming the field") {
    const std::string config = write_config("badfiber.json", R"({
        "fiber": {"length_a": -5.0}
    })");
    const CliResult r = run_cli("run-two-qubit --config " + config);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("fiber.length_a") != std::string::npos);
}

TEST_CASE("run-two-qubit: malformed noise object is refused naming the fields") {
    const std::string config = write_config("badnoise.json", R"({
        "noise": {"alpha": [1, 0], "beta": [1, 0], "delta": [1, 0], "gamma": [0, 0]}
    })");
    const CliResult r = run_cli("run-two-qubit --config " + config);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("run-ghz: four parties, identity noise, fidelity 1") {
    const std::string reports = (temp_dir() / "ghz4.jsonl").string();
    const std::string config = write_config("ghz4.json", R"({
        "n": 4,
        "noises": [{"beta0": [1, 0], "beta1": [0, 0]}, {"beta0": [1, 0], "beta1": [0, 0]},
                   {"beta0": [1, 0], "beta1": [0, 0]}, {"beta0": [1, 0], "beta1": [0, 0]}],
        "trials": 1,
        "seed": 9
    })");
    const CliResult r = run_cli("run-ghz --config " + config + " --output " + reports);
    REQUIRE(r.exit_code == 0);
    const auto loaded = read_report_file(reports);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].protocol == "ghz");
    CHECK(loaded[0].report.record.outcome == "0000");
    CHECK(loaded[0].report.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("run-ghz: odd n needs the experimental flag") {
    const std::string reports = (temp_dir() / "ghz3.jsonl").string();
    const CliResult refused = run_cli("run-ghz --n 3 --trials 1 --output " + reports);
    CHECK(refused.exit_code == 2);
    CHECK(refused.err.find("experimental") != std::string::npos);

    const CliResult allowed =
        run_cli("run-ghz --n 3 --trials 1 --experimental-odd-n --output " + reports);
    CHECK(allowed.exit_code == 0);
}

TEST_CASE("run-ghz with n=2 reproduces run-two-qubit trial-for-trial") {
    const std::string two = (temp_dir() / "pair.jsonl").string();
    const std::string ghz = (temp_dir() / "ghz2.jsonl").string();
    REQUIRE(run_cli("run-two-qubit --trials 50 --seed 303 --p-err 0.25 --output " + two)
                .exit_code == 0);
    REQUIRE(run_cli("run-ghz --n 2 --trials 50 --seed 303 --p-err 0.25 --output " + ghz)
                .exit_code == 0);

    const auto pair_reports = read_report_file(two);
    const auto ghz_reports = read_report_file(ghz);
    REQUIRE(pair_reports.size() == ghz_reports.size());
    for (std::size_t i = 0; i < pair_reports.size(); ++i) {
        CHECK(pair_reports[i].report.fidelity == ghz_reports[i].report.fidelity);
        CHECK(pair_reports[i].report.record.true_phases ==
              ghz_reports[i].report.record.true_phases);
        CHECK(pair_reports[i].report.record.reported ==
              ghz_reports[i].report.record.reported);
    }
}

TEST_CASE("sweep: homodyne endpoints land on 1 and about a quarter") {
    const std::string csv = (temp_dir() / "sweep.csv").string();
    const std::string config = write_config("sweep.json", R"({
        "variable": "homodyne-err",
        "grid": [0.0, 0.5],
        "trials_per_point": 4000,
        "seed": 17
    })");
    const CliResult r = run_cli("sweep --config " + config + " --output " + csv);
    REQUIRE(r.exit_code == 0);

    const auto rows = read_sweep_csv_file(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].success_rate == 1.0);
    CHECK(std::abs(rows[1].success_rate - 0.25) < 0.03);
    CHECK(fs::exists(temp_dir() / "sweep.jsonl"));
}

TEST_CASE("sweep: compensated fiber-delta grid keeps fidelity 1") {
    const std::string csv = (temp_dir() / "fiber.csv").string();
    const std::string config = write_config("fiber.json", R"({
        "variable": "fiber-delta",
        "grid": [-0.05, 0.0, 0.1],
        "trials_per_point": 100,
        "seed": 23,
        "compensate": true
    })");
    const CliResult r = run_cli("sweep --config " + config + " --output " + csv);
    REQUIRE(r.exit_code == 0);
    for (const auto& row : read_sweep_csv_file(csv)) {
        CHECK(row.success_rate == 1.0);
        CHECK(row.mean_fidelity >= 1.0 - 1e-9);
    }
}

TEST_CASE("sweep: an empty grid is a config error") {
    const std::string config = write_config("empty.json", R"({
        "variable": "homodyne-err",
        "grid": []
    })");
    const CliResult r = run_cli("sweep --config " + config);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("grid") != std::string::npos);
}

TEST_CASE("unknown subcommands and missing subcommand are usage errors") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("verify passes on a fresh build and its output is reproducible") {
    const CliResult first = run_cli("verify");
    REQUIRE(first.exit_code == 0);
    CHECK(first.out.find("PASS  1  noise-independence") != std::string::npos);
    CHECK(first.out.find("all criteria passed") != std::string::npos);

    const CliResult second = run_cli("verify");
    CHECK(second.exit_code == 0);
    CHECK(second.out == first.out);
}

TEST_CASE("verify with a corrupted correction table fails naming the criterion") {
    const CliResult r = run_cli("verify --corrupt-correction-table");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("FAIL  4  conversion-and-correction-soundness") != std::string::npos);
    CHECK(r.out.find("FAILED criteria:") != std::string::npos);
    CHECK(r.out.find("conversion-and-correction-soundness") != std::string::npos);
}
