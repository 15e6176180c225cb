#pragma once

// Monte Carlo harness and parameter sweeps over the two-qubit pipeline, plus
// the exact (non-sampled) checks the sampled statistics are held against:
// the closed-form outcome distribution and the brute-forced report/truth
// success-rate table.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "entdist/elements.hpp"
#include "entdist/protocols.hpp"

namespace entdist {

// Haar-uniform unit-norm complex pair: |alpha|^2 uniform on [0,1], phases
// uniform on [0, 2pi).
NoiseParams sample_noise(Rng& rng);

// Equal-arm reference fiber: 25 km both ways, v = 2e8 m/s, channel spacing
// 2 pi x 1e9 rad/s.
FiberConfig default_fiber();

struct MonteCarloPoint {
    std::size_t trials = 0;
    double mean_fidelity = 0.0;
    double success_rate = 0.0;
    std::array<std::uint64_t, 4> outcome_counts{}; // Phi1..Phi4
    double std_error = 0.0;                        // of the mean fidelity
};

using ReportSink = std::function<void(std::size_t trial, const ProtocolReport&)>;

struct MonteCarloOptions {
    HomodyneModel homodyne{0.0};
    FiberConfig fiber = default_fiber();
    bool compensate = true;
    // When set, every trial runs this noise pair; otherwise noise is sampled
    // per trial.
    std::optional<std::pair<NoiseParams, NoiseParams>> fixed_noise;
    std::uint64_t point_index = 0;
    ReportSink sink;
};

// Runs `trials` two-qubit trials, one derived RNG stream per trial, and
// aggregates fidelity, success and the outcome histogram.
MonteCarloPoint run_monte_carlo(std::size_t trials, const MonteCarloOptions& options,
                                std::uint64_t seed);

// Convenience overload: fresh Haar noise per trial, compensation on.
MonteCarloPoint run_monte_carlo(std::size_t trials, const HomodyneModel& homodyne,
                                const FiberConfig& fiber, std::uint64_t seed);

enum class SweepVariable { HomodyneErr, FiberDelta, NoiseAngle };

const char* to_string(SweepVariable v);
std::optional<SweepVariable> sweep_variable_from_name(const std::string& name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::HomodyneErr;
    std::vector<double> grid; // nonempty, strictly increasing
    std::size_t trials_per_point = 1;
    std::uint64_t seed = 0;
    double base_p_err = 0.0;          // FiberDelta / NoiseAngle sweeps
    FiberConfig fiber = default_fiber();
    bool compensate = true;           // FiberDelta sweeps honor this

    void validate() const;
};

struct SweepPoint {
    double value = 0.0;
    MonteCarloPoint stats;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
};

// One Monte Carlo point per grid value. HomodyneErr sweeps p_err, FiberDelta
// sweeps L_A - L_B (meters, L_B fixed at the base fiber's), NoiseAngle fixes
// both channels at (cos phi, sin phi).
SweepResult sweep(const SweepSpec& spec);

struct OutcomeDistribution {
    std::array<double, 4> simulated; // exact partition weights of the state
    std::array<double, 4> analytic;  // |alpha delta|^2, |beta gamma|^2, ...
};

// Exact branch probabilities from the post-QND state against the closed-form
// coefficient products. No sampling.
OutcomeDistribution outcome_distribution_check(const NoiseParams& noise_a,
                                               const NoiseParams& noise_b);

// Expected success probability at a given readout error, brute-forced over
// the 4x4 (true outcome, reported outcome) table: partition weights times
// per-party flip probabilities times the deterministic tail's verdict for
// each forced combination, averaged over `noise_draws` Haar noise pairs.
double expected_success_rate(double p_err, std::size_t noise_draws, std::uint64_t seed,
                             const FiberConfig& fiber, bool compensate = true);

// --- GHZ Monte Carlo (drives the run-ghz CLI command) -------------------

struct GhzMonteCarloOptions {
    HomodyneModel homodyne{0.0};
    bool experimental_odd_n = false;
    // When nonempty, must hold one pair per party; otherwise sampled per trial.
    std::vector<NoiseParams> fixed_noises;
    std::uint64_t point_index = 0;
    ReportSink sink;
};

struct GhzMonteCarloPoint {
    std::size_t trials = 0;
    double mean_fidelity = 0.0;
    double success_rate = 0.0;
    double std_error = 0.0;
};

GhzMonteCarloPoint run_ghz_monte_carlo(std::size_t trials, std::size_t n,
                                       const GhzMonteCarloOptions& options,
                                       std::uint64_t seed);

} // namespace entdist
