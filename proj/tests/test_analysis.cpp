#include <doctest.h>

#include <cmath>
#include <complex>

#include "entdist/analysis.hpp"
#include "entdist/report_io.hpp"

using namespace entdist;

TEST_CASE("sample_noise: unit norm, uniform |alpha|^2, reproducible") {
    Rng rng(12);
    double mean_sq = 0.0;
    const std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) {
        const NoiseParams n = sample_noise(rng);
        const double norm_sq = std::norm(n.alpha) + std::norm(n.beta);
        REQUIRE(std::abs(norm_sq - 1.0) < 1e-12);
        mean_sq += std::norm(n.alpha);
    }
    CHECK(std::abs(mean_sq / draws - 0.5) < 0.01);

    Rng a(987);
    Rng b(987);
    for (int i = 0; i < 100; ++i) {
        const NoiseParams na = sample_noise(a);
        const NoiseParams nb = sample_noise(b);
        CHECK(na.alpha == nb.alpha);
        CHECK(na.beta == nb.beta);
    }
}

TEST_CASE("monte carlo: perfect readout gives success rate exactly 1") {
    const MonteCarloPoint point =
        run_monte_carlo(1000, HomodyneModel(0.0), default_fiber(), 2718);
    CHECK(point.success_rate == 1.0);
    CHECK(point.mean_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    std::uint64_t histogram_total = 0;
    for (const auto c : point.outcome_counts)
        histogram_total += c;
    CHECK(histogram_total == 1000);
}

TEST_CASE("monte carlo: single trial yields a single histogram count") {
    const MonteCarloPoint point = run_monte_carlo(1, HomodyneModel(0.0), default_fiber(), 3);
    std::uint64_t total = 0;
    for (const auto c : point.outcome_counts)
        total += c;
    CHECK(total == 1);
    CHECK(point.std_error == 0.0);
}

TEST_CASE("monte carlo at p_err=0.5 approaches the quarter success rate") {
    const MonteCarloPoint point =
        run_monte_carlo(20000, HomodyneModel(0.5), default_fiber(), 1618);
    CHECK(std::abs(point.success_rate - 0.25) < 0.02);
}

TEST_CASE("homodyne-error sweep is monotone from 1 to about a quarter") {
    SweepSpec spec;
    spec.variable = SweepVariable::HomodyneErr;
    spec.grid = {0.0, 0.1, 0.25, 0.5};
    spec.trials_per_point = 4000;
    spec.seed = 99;
    const SweepResult result = sweep(spec);
    REQUIRE(result.points.size() == 4);
    CHECK(result.points.front().stats.success_rate == 1.0);
    CHECK(std::abs(result.points.back().stats.success_rate - 0.25) < 0.03);
    for (std::size_t i = 1; i < result.points.size(); ++i)
        CHECK(result.points[i].stats.success_rate <=
              result.points[i - 1].stats.success_rate + 0.02);

    // Every point within 4 sigma of the brute-forced truth-table rate.
    for (const auto& point : result.points) {
        const double p = expected_success_rate(point.value, 16, 7, spec.fiber);
        const double n = static_cast<double>(point.stats.trials);
        const double sigma = std::sqrt(std::max(n * p * (1.0 - p), 1e-9));
        CHECK(std::abs(point.stats.success_rate * n - p * n) <= 4.0 * sigma);
    }
}

TEST_CASE("fiber-delta sweep with compensation holds fidelity 1 everywhere") {
    SweepSpec spec;
    spec.variable = SweepVariable::FiberDelta;
    spec.grid = {-0.1, 0.0, 0.05, 0.2};
    spec.trials_per_point = 200;
    spec.seed = 41;
    const SweepResult result = sweep(spec);
    for (const auto& point : result.points) {
        CHECK(point.stats.success_rate == 1.0);
        CHECK(point.stats.mean_fidelity >= 1.0 - 1e-9);
    }

    // Without compensation the success rate collapses away from delta = 0.
    SweepSpec raw = spec;
    raw.compensate = false;
    const SweepResult uncompensated = sweep(raw);
    CHECK(uncompensated.points[1].stats.success_rate == 1.0); // delta = 0
    CHECK(uncompensated.points[2].stats.success_rate < 0.5);  // pi/2 phase
}

TEST_CASE("noise-angle sweep at perfect readout succeeds at every angle") {
    SweepSpec spec;
    spec.variable = SweepVariable::NoiseAngle;
    spec.grid = {0.0, 0.3, 0.7, 1.1, 1.5};
    spec.trials_per_point = 100;
    spec.seed = 5;
    const SweepResult result = sweep(spec);
    for (const auto& point : result.points)
        CHECK(point.stats.success_rate == 1.0);
}

TEST_CASE("sweep validation rejects malformed specs") {
    SweepSpec spec;
    spec.variable = SweepVariable::HomodyneErr;
    spec.grid = {};
    CHECK_THROWS_AS(sweep(spec), ParameterError);
    spec.grid = {0.4, 0.1};
    CHECK_THROWS_AS(sweep(spec), ParameterError);
    spec.grid = {0.0, 0.9};
    CHECK_THROWS_AS(sweep(spec), ParameterError);
    spec.grid = {0.0, 0.5};
    spec.trials_per_point = 0;
    CHECK_THROWS_AS(sweep(spec), ParameterError);
}

TEST_CASE("outcome distribution check: endpoints and random agreement") {
    const OutcomeDistribution identity =
        outcome_distribution_check(NoiseParams::identity(), NoiseParams::identity());
    CHECK(identity.simulated[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(identity.simulated[1] == 0.0);
    CHECK(identity.simulated[2] == 0.0);
    CHECK(identity.simulated[3] == 0.0);

    const double k = 1.0 / std::sqrt(2.0);
    const NoiseParams balanced({k, 0.0}, {k, 0.0});
    const OutcomeDistribution quarter = outcome_distribution_check(balanced, balanced);
    for (int i = 0; i < 4; ++i)
        CHECK(quarter.simulated[i] == doctest::Approx(0.25).epsilon(1e-12));

    Rng rng(2020);
    for (int t = 0; t < 100; ++t) {
        const NoiseParams na = sample_noise(rng);
        const NoiseParams nb = sample_noise(rng);
        const OutcomeDistribution dist = outcome_distribution_check(na, nb);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(dist.simulated[i] - dist.analytic[i]) < 1e-12);
    }
}

TEST_CASE("sampled outcome histogram converges to the exact weights") {
    Rng rng(606);
    const NoiseParams na = sample_noise(rng);
    const NoiseParams nb = sample_noise(rng);
    const OutcomeDistribution exact = outcome_distribution_check(na, nb);

    MonteCarloOptions options;
    options.fixed_noise = std::make_pair(na, nb);
    const std::size_t trials = 20000;
    const MonteCarloPoint point = run_monte_carlo(trials, options, 607);
    for (int i = 0; i < 4; ++i) {
        const double expect = exact.analytic[i] * trials;
        const double sigma =
            std::sqrt(std::max(trials * exact.analytic[i] * (1.0 - exact.analytic[i]), 1e-9));
        CHECK(std::abs(static_cast<double>(point.outcome_counts[i]) - expect) <= 4.0 * sigma);
    }
}

TEST_CASE("brute-forced success-rate oracle hits both published endpoints") {
    CHECK(expected_success_rate(0.0, 8, 1, default_fiber()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expected_success_rate(0.5, 8, 1, default_fiber()) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("identical sweep specs give bit-identical results") {
    SweepSpec spec;
    spec.variable = SweepVariable::HomodyneErr;
    spec.grid = {0.0, 0.2, 0.4};
    spec.trials_per_point = 500;
    spec.seed = 31415;
    const SweepResult a = sweep(spec);
    const SweepResult b = sweep(spec);
    CHECK(sweep_to_csv(a) == sweep_to_csv(b));
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].stats.mean_fidelity == b.points[i].stats.mean_fidelity);
        CHECK(a.points[i].stats.outcome_counts == b.points[i].stats.outcome_counts);
    }
}

TEST_CASE("standard error shrinks like one over the square root of trials") {
    MonteCarloOptions options;
    options.homodyne = HomodyneModel(0.3); // nonzero fidelity variance
    const MonteCarloPoint small = run_monte_carlo(2000, options, 14142);
    const MonteCarloPoint large = run_monte_carlo(8000, options, 14142);
    REQUIRE(large.std_error > 0.0);
    const double ratio = small.std_error / large.std_error;
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
}

TEST_CASE("GHZ monte carlo: perfect readout succeeds, reports flow to the sink") {
    GhzMonteCarloOptions options;
    std::size_t seen = 0;
    options.sink = [&](std::size_t, const ProtocolReport& r) {
        ++seen;
        CHECK(r.record.outcome.size() == 4);
    };
    const GhzMonteCarloPoint point = run_ghz_monte_carlo(100, 4, options, 2222);
    CHECK(point.success_rate == 1.0);
    CHECK(seen == 100);

    GhzMonteCarloOptions bad;
    bad.fixed_noises = std::vector<NoiseParams>(3, NoiseParams::identity());
    CHECK_THROWS_AS(run_ghz_monte_carlo(10, 4, bad, 1), ParameterError);
}
