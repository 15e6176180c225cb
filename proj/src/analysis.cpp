#include "entdist/analysis.hpp"

#include <cmath>
#include <numbers>

namespace entdist {

NoiseParams sample_noise(Rng& rng) {
    const double u = rng.uniform();
    const double phase_a = 2.0 * std::numbers::pi * rng.uniform();
    const double phase_b = 2.0 * std::numbers::pi * rng.uniform();
    return NoiseParams(std::polar(std::sqrt(u), phase_a),
                       std::polar(std::sqrt(1.0 - u), phase_b));
}

FiberConfig default_fiber() {
    const double omega1 = 1.2e15;
    const double omega2 = omega1 + 2.0 * std::numbers::pi * 1e9;
    return FiberConfig(25e3, 25e3, 2e8, omega1, omega2);
}

MonteCarloPoint run_monte_carlo(std::size_t trials, const MonteCarloOptions& options,
                                std::uint64_t seed) {
    if (trials < 1)
        throw ParameterError("run_monte_carlo: need at least one trial");

    MonteCarloPoint point;
    point.trials = trials;
    double fid_sum = 0.0;
    double fid_sq_sum = 0.0;
    std::size_t successes = 0;

    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_stream(seed, options.point_index, t));
        const NoiseParams noise_a =
            options.fixed_noise ? options.fixed_noise->first : sample_noise(rng);
        const NoiseParams noise_b =
            options.fixed_noise ? options.fixed_noise->second : sample_noise(rng);
        const ProtocolReport report = run_two_qubit(noise_a, noise_b, options.fiber,
                                                    options.homodyne, rng, options.compensate);

        fid_sum += report.fidelity;
        fid_sq_sum += report.fidelity * report.fidelity;
        if (report.success)
            ++successes;
        if (const auto o = two_qubit_outcome_from_name(report.record.outcome))
            ++point.outcome_counts[outcome_index(*o)];
        if (options.sink)
            options.sink(t, report);
    }

    point.mean_fidelity = fid_sum / static_cast<double>(trials);
    point.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    if (trials > 1) {
        const double n = static_cast<double>(trials);
        const double var = (fid_sq_sum - n * point.mean_fidelity * point.mean_fidelity) /
                           (n - 1.0);
        point.std_error = std::sqrt(std::max(var, 0.0) / n);
    }
    return point;
}

MonteCarloPoint run_monte_carlo(std::size_t trials, const HomodyneModel& homodyne,
                                const FiberConfig& fiber, std::uint64_t seed) {
    MonteCarloOptions options;
    options.homodyne = homodyne;
    options.fiber = fiber;
    return run_monte_carlo(trials, options, seed);
}

const char* to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::HomodyneErr: return "homodyne-err";
    case SweepVariable::FiberDelta: return "fiber-delta";
    case SweepVariable::NoiseAngle: return "noise-angle";
    }
    return "?";
}

std::optional<SweepVariable> sweep_variable_from_name(const std::string& name) {
    for (const auto v : {SweepVariable::HomodyneErr, SweepVariable::FiberDelta,
                         SweepVariable::NoiseAngle})
        if (name == to_string(v))
            return v;
    return std::nullopt;
}

void SweepSpec::validate() const {
    if (grid.empty())
        throw ParameterError("sweep: grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ParameterError("sweep: grid must be strictly increasing");
    if (trials_per_point < 1)
        throw ParameterError("sweep: trials_per_point must be at least 1");
    if (variable == SweepVariable::HomodyneErr)
        for (const double v : grid)
            if (v < 0.0 || v > 0.5)
                throw ParameterError("sweep: homodyne-err grid values must lie in [0, 0.5]");
    if (variable == SweepVariable::FiberDelta)
        for (const double v : grid)
            if (fiber.length_b + v <= 0.0)
                throw ParameterError("sweep: fiber-delta grid value makes L_A nonpositive");
    if (base_p_err < 0.0 || base_p_err > 0.5)
        throw ParameterError("sweep: base p_err must lie in [0, 0.5]");
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double value = spec.grid[i];
        MonteCarloOptions options;
        options.fiber = spec.fiber;
        options.compensate = spec.compensate;
        options.point_index = i;
        switch (spec.variable) {
        case SweepVariable::HomodyneErr:
            options.homodyne = HomodyneModel(value);
            break;
        case SweepVariable::FiberDelta:
            options.homodyne = HomodyneModel(spec.base_p_err);
            options.fiber = FiberConfig(spec.fiber.length_b + value, spec.fiber.length_b,
                                        spec.fiber.velocity, spec.fiber.omega1,
                                        spec.fiber.omega2);
            break;
        case SweepVariable::NoiseAngle: {
            options.homodyne = HomodyneModel(spec.base_p_err);
            const NoiseParams fixed(Amplitude{std::cos(value), 0.0},
                                    Amplitude{std::sin(value), 0.0});
            options.fixed_noise = std::make_pair(fixed, fixed);
            break;
        }
        }
        result.points.push_back(
            SweepPoint{value, run_monte_carlo(spec.trials_per_point, options, spec.seed)});
    }
    return result;
}

OutcomeDistribution outcome_distribution_check(const NoiseParams& noise_a,
                                               const NoiseParams& noise_b) {
    const StateVector tagged = two_qubit_post_qnd_state(noise_a, noise_b, default_fiber());
    const auto weights = partition_weights<TwoQubitOutcome>(tagged, [](const BasisKet& ket) {
        return identify_outcome(ket.probes[0], ket.probes[1]);
    });

    OutcomeDistribution dist{};
    for (const auto& [outcome, w] : weights)
        dist.simulated[outcome_index(outcome)] = w;
    dist.analytic = {std::norm(noise_a.alpha * noise_b.alpha),
                     std::norm(noise_a.beta * noise_b.beta),
                     std::norm(noise_a.alpha * noise_b.beta),
                     std::norm(noise_a.beta * noise_b.alpha)};
    return dist;
}

double expected_success_rate(double p_err, std::size_t noise_draws, std::uint64_t seed,
                             const FiberConfig& fiber, bool compensate) {
    if (noise_draws < 1)
        throw ParameterError("expected_success_rate: need at least one noise draw");
    const HomodyneModel model(p_err); // range check

    constexpr std::array<TwoQubitOutcome, 4> outcomes{
        TwoQubitOutcome::Phi1, TwoQubitOutcome::Phi2, TwoQubitOutcome::Phi3,
        TwoQubitOutcome::Phi4};

    double total = 0.0;
    Rng rng(seed);
    for (std::size_t d = 0; d < noise_draws; ++d) {
        const NoiseParams noise_a = sample_noise(rng);
        const NoiseParams noise_b = sample_noise(rng);
        const StateVector tagged = two_qubit_post_qnd_state(noise_a, noise_b, fiber);
        const auto classify = [](const BasisKet& ket) {
            return identify_outcome(ket.probes[0], ket.probes[1]);
        };
        const auto weights = partition_weights<TwoQubitOutcome>(tagged, classify);

        double draw_success = 0.0;
        for (const auto& [truth, weight] : weights) {
            const StateVector collapsed =
                discard_probes(project_onto(tagged, classify, truth).state);
            const auto true_phases = phases_for_outcome(truth);
            for (const TwoQubitOutcome reported : outcomes) {
                const auto rep_phases = phases_for_outcome(reported);
                double prob = 1.0;
                for (std::size_t party = 0; party < 2; ++party)
                    prob *= rep_phases[party] == true_phases[party] ? (1.0 - model.p_err)
                                                                    : model.p_err;
                if (prob == 0.0)
                    continue;
                const TwoQubitTail tail =
                    two_qubit_finish(collapsed, truth, reported, fiber, compensate);
                if (tail.fidelity >= kSuccessThreshold)
                    draw_success += weight * prob;
            }
        }
        total += draw_success;
    }
    return total / static_cast<double>(noise_draws);
}

GhzMonteCarloPoint run_ghz_monte_carlo(std::size_t trials, std::size_t n,
                                       const GhzMonteCarloOptions& options,
                                       std::uint64_t seed) {
    if (trials < 1)
        throw ParameterError("run_ghz_monte_carlo: need at least one trial");
    if (!options.fixed_noises.empty() && options.fixed_noises.size() != n)
        throw ParameterError("run_ghz_monte_carlo: fixed noises must match party count");

    GhzMonteCarloPoint point;
    point.trials = trials;
    double fid_sum = 0.0;
    double fid_sq_sum = 0.0;
    std::size_t successes = 0;

    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_stream(seed, options.point_index, t));
        std::vector<NoiseParams> noises;
        noises.reserve(n);
        if (options.fixed_noises.empty())
            for (std::size_t i = 0; i < n; ++i)
                noises.push_back(sample_noise(rng));
        else
            noises = options.fixed_noises;

        const ProtocolReport report =
            run_ghz(n, noises, options.homodyne, rng, options.experimental_odd_n);
        fid_sum += report.fidelity;
        fid_sq_sum += report.fidelity * report.fidelity;
        if (report.success)
            ++successes;
        if (options.sink)
            options.sink(t, report);
    }

    point.mean_fidelity = fid_sum / static_cast<double>(trials);
    point.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    if (trials > 1) {
        const double nt = static_cast<double>(trials);
        const double var = (fid_sq_sum - nt * point.mean_fidelity * point.mean_fidelity) /
                           (nt - 1.0);
        point.std_error = std::sqrt(std::max(var, 0.0) / nt);
    }
    return point;
}

} // namespace entdist
