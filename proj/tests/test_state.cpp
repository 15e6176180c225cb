#include <doctest.h>

#include <cmath>
#include <complex>

#include "entdist/state.hpp"

using namespace entdist;

namespace {

const double kInv2 = 1.0 / std::sqrt(2.0);

PhotonKet ph(Polarization pol, FrequencyLabel freq, const char* mode) {
    return PhotonKet{pol, freq, SpatialMode{mode}};
}

BasisKet ket2(PhotonKet a, PhotonKet b) {
    BasisKet k;
    k.photons = {std::move(a), std::move(b)};
    return k;
}

StateVector bell_hh_vv() {
    return StateVector::from_terms(
        {{ket2(ph(Polarization::H, FrequencyLabel::W0, "c2"),
               ph(Polarization::H, FrequencyLabel::W0, "d2")),
          {kInv2, 0.0}},
         {ket2(ph(Polarization::V, FrequencyLabel::W0, "c2"),
               ph(Polarization::V, FrequencyLabel::W0, "d2")),
          {kInv2, 0.0}}});
}

// The noisy two-photon state written directly from its coefficient products:
// amplitude (pol_a ? beta : alpha) * (pol_b ? gamma : delta) / sqrt(2) on
// each of the eight (pol_a, pol_b, frequency-order) kets.
StateVector noisy_pair_state(Amplitude alpha, Amplitude beta, Amplitude delta,
                             Amplitude gamma, bool with_probes = false) {
    std::vector<std::pair<BasisKet, Amplitude>> terms;
    for (const Polarization pa : {Polarization::H, Polarization::V})
        for (const Polarization pb : {Polarization::H, Polarization::V})
            for (const bool w1_first : {true, false}) {
                BasisKet k = ket2(
                    ph(pa, w1_first ? FrequencyLabel::W1 : FrequencyLabel::W2, "a"),
                    ph(pb, w1_first ? FrequencyLabel::W2 : FrequencyLabel::W1, "b"));
                if (with_probes)
                    k.probes = {pa == Polarization::H ? ProbePhase::Theta : ProbePhase::ThetaPrime,
                                pb == Polarization::H ? ProbePhase::Theta : ProbePhase::ThetaPrime};
                const Amplitude ca = pa == Polarization::H ? alpha : beta;
                const Amplitude cb = pb == Polarization::H ? delta : gamma;
                terms.emplace_back(std::move(k), ca * cb * kInv2);
            }
    return StateVector::from_terms(std::move(terms));
}

} // namespace

TEST_CASE("from_terms sums collisions and prunes below threshold") {
    const BasisKet k = ket2(ph(Polarization::H, FrequencyLabel::W1, "a"),
                            ph(Polarization::H, FrequencyLabel::W2, "b"));
    const BasisKet other = ket2(ph(Polarization::V, FrequencyLabel::W1, "a"),
                                ph(Polarization::H, FrequencyLabel::W2, "b"));
    const StateVector s = StateVector::from_terms(
        {{k, {0.5, 0.0}}, {k, {0.5, 0.0}}, {other, {1e-16, 0.0}}});
    CHECK(s.term_count() == 1);
    CHECK(s.amplitude(k) == Amplitude{1.0, 0.0});
    CHECK(s.amplitude(other) == Amplitude{0.0, 0.0});
}

TEST_CASE("from_terms rejects inconsistent kets and bad amplitudes") {
    BasisKet two = ket2(ph(Polarization::H, FrequencyLabel::W1, "a"),
                        ph(Polarization::H, FrequencyLabel::W2, "b"));
    BasisKet one;
    one.photons = {ph(Polarization::H, FrequencyLabel::W1, "a")};
    CHECK_THROWS_AS(StateVector::from_terms({{two, {1.0, 0.0}}, {one, {1.0, 0.0}}}),
                    DimensionError);
    CHECK_THROWS_AS(StateVector::from_terms({{two, {std::nan(""), 0.0}}}), ParameterError);
    CHECK_THROWS_AS(StateVector::from_terms({}), ParameterError);
    BasisKet empty_mode = two;
    empty_mode.photons[0].mode = SpatialMode{""};
    CHECK_THROWS_AS(StateVector::from_terms({{empty_mode, {1.0, 0.0}}}), ParameterError);
}

TEST_CASE("norm of a single 0.5-amplitude term is 0.5") {
    const StateVector s = StateVector::from_terms(
        {{ket2(ph(Polarization::H, FrequencyLabel::W1, "a"),
               ph(Polarization::H, FrequencyLabel::W2, "b")),
          {0.5, 0.0}}});
    CHECK(s.norm() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("noisy pair state stays normalized for random unit parameters") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform();
        const Amplitude alpha = std::polar(std::sqrt(u), rng.uniform() * 6.28);
        const Amplitude beta = std::polar(std::sqrt(1.0 - u), rng.uniform() * 6.28);
        const double v = rng.uniform();
        const Amplitude delta = std::polar(std::sqrt(v), rng.uniform() * 6.28);
        const Amplitude gamma = std::polar(std::sqrt(1.0 - v), rng.uniform() * 6.28);
        CHECK(std::abs(noisy_pair_state(alpha, beta, delta, gamma).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("apply_single_photon_map: identity and Hadamard involution") {
    const StateVector s = bell_hh_vv();
    const PhotonRule identity = [](const PhotonKet& p) {
        return std::vector<std::pair<PhotonKet, Amplitude>>{{p, {1.0, 0.0}}};
    };
    CHECK(exactly_equal(apply_single_photon_map(s, 0, identity), s));

    const PhotonRule hadamard = [](const PhotonKet& p) {
        PhotonKet h = p;
        h.pol = Polarization::H;
        PhotonKet v = p;
        v.pol = Polarization::V;
        const double w = p.pol == Polarization::H ? kInv2 : kInv2;
        const double sign = p.pol == Polarization::V ? -1.0 : 1.0;
        return std::vector<std::pair<PhotonKet, Amplitude>>{{h, {w, 0.0}},
                                                            {v, {sign * w, 0.0}}};
    };
    const StateVector twice =
        apply_single_photon_map(apply_single_photon_map(s, 0, hadamard), 0, hadamard);
    CHECK(fidelity(twice, s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_single_photon_map validates parties and produced labels") {
    const StateVector s = bell_hh_vv();
    const PhotonRule bad_mode = [](const PhotonKet& p) {
        PhotonKet out = p;
        out.mode = SpatialMode{"rogue"};
        return std::vector<std::pair<PhotonKet, Amplitude>>{{out, {1.0, 0.0}}};
    };
    const ModeSet allowed{SpatialMode{"c2"}, SpatialMode{"d2"}};
    CHECK_THROWS_AS(apply_single_photon_map(s, 0, bad_mode, &allowed), ElementError);
    const PhotonRule identity = [](const PhotonKet& p) {
        return std::vector<std::pair<PhotonKet, Amplitude>>{{p, {1.0, 0.0}}};
    };
    CHECK_THROWS_AS(apply_single_photon_map(s, 5, identity), DimensionError);
}

TEST_CASE("fidelity: self, orthogonal, Bell-vs-product") {
    const StateVector bell = bell_hh_vv();
    CHECK(fidelity(bell, bell) == doctest::Approx(1.0).epsilon(1e-12));

    const StateVector hh = StateVector::from_terms(
        {{ket2(ph(Polarization::H, FrequencyLabel::W0, "c2"),
               ph(Polarization::H, FrequencyLabel::W0, "d2")),
          {1.0, 0.0}}});
    const StateVector vv = StateVector::from_terms(
        {{ket2(ph(Polarization::V, FrequencyLabel::W0, "c2"),
               ph(Polarization::V, FrequencyLabel::W0, "d2")),
          {1.0, 0.0}}});
    CHECK(fidelity(hh, vv) == 0.0);
    CHECK(fidelity(bell, hh) == doctest::Approx(0.5).epsilon(1e-12));

    StateVector single = StateVector::from_terms(
        {{BasisKet{{ph(Polarization::H, FrequencyLabel::W0, "c2")}, {}}, {1.0, 0.0}}});
    CHECK_THROWS_AS(fidelity(bell, single), DimensionError);
}

TEST_CASE("partition_measure: constant classifier returns the input with probability 1") {
    const StateVector s = bell_hh_vv();
    Rng rng(7);
    const auto outcome = partition_measure<int>(s, [](const BasisKet&) { return 0; }, rng);
    CHECK(outcome.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(outcome.state, s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partition weights on the noisy pair: Alice polarization carries |alpha|^2") {
    Rng rng(11);
    const double u = 0.37;
    const Amplitude alpha = std::polar(std::sqrt(u), 1.1);
    const Amplitude beta = std::polar(std::sqrt(1.0 - u), -0.4);
    const Amplitude delta = std::polar(std::sqrt(0.81), 2.2);
    const Amplitude gamma = std::polar(std::sqrt(0.19), 0.9);
    const StateVector s = noisy_pair_state(alpha, beta, delta, gamma);

    const auto weights = partition_weights<int>(s, [](const BasisKet& k) {
        return k.photons[0].pol == Polarization::H ? 0 : 1;
    });
    CHECK(weights.at(0) == doctest::Approx(u).epsilon(1e-12));
    CHECK(weights.at(1) == doctest::Approx(1.0 - u).epsilon(1e-12));

    double sum = 0.0;
    for (const auto& [label, w] : weights)
        sum += w;
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("identity-noise probe classifier collapses to (theta, theta) with certainty") {
    const StateVector s =
        noisy_pair_state({1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, true);
    Rng rng(3);
    const auto outcome = partition_measure<std::pair<ProbePhase, ProbePhase>>(
        s, [](const BasisKet& k) { return std::make_pair(k.probes[0], k.probes[1]); }, rng);
    CHECK(outcome.label == std::make_pair(ProbePhase::Theta, ProbePhase::Theta));
    CHECK(outcome.probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("collapse is idempotent: remeasuring yields the same outcome with certainty") {
    Rng state_rng(19);
    for (int i = 0; i < 100; ++i) {
        const double u = state_rng.uniform();
        const Amplitude alpha = std::polar(std::sqrt(u), state_rng.uniform() * 6.28);
        const Amplitude beta = std::polar(std::sqrt(1.0 - u), state_rng.uniform() * 6.28);
        const StateVector s = noisy_pair_state(alpha, beta, {kInv2, 0.0}, {kInv2, 0.0});
        const auto classify = [](const BasisKet& k) {
            return k.photons[0].pol == Polarization::H ? 0 : 1;
        };
        Rng rng(derive_stream(23, 0, static_cast<std::uint64_t>(i)));
        const auto first = partition_measure<int>(s, classify, rng);
        const auto second = partition_measure<int>(first.state, classify, rng);
        CHECK(second.label == first.label);
        CHECK(second.probability == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pruning at 1e-15 moves fidelity by less than 1e-12") {
    const BasisKet main_ket = ket2(ph(Polarization::H, FrequencyLabel::W1, "a"),
                                   ph(Polarization::H, FrequencyLabel::W2, "b"));
    const BasisKet tiny_ket = ket2(ph(Polarization::V, FrequencyLabel::W1, "a"),
                                   ph(Polarization::V, FrequencyLabel::W2, "b"));
    const double tiny = 5e-16; // below the pruning threshold
    const StateVector pruned =
        StateVector::from_terms({{main_ket, {1.0, 0.0}}, {tiny_ket, {tiny, 0.0}}});
    CHECK(pruned.term_count() == 1);

    // Unpruned overlap with the pure main ket, computed by hand.
    const double unpruned_fidelity = std::norm(Amplitude{1.0, 0.0}); // tiny term orthogonal
    const StateVector reference = StateVector::from_terms({{main_ket, {1.0, 0.0}}});
    CHECK(std::abs(fidelity(pruned, reference) - unpruned_fidelity) < 1e-12);
}

TEST_CASE("discard_probes strips classical probe labels and rejects entangled ones") {
    StateVector collapsed =
        noisy_pair_state({1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, true);
    const StateVector stripped = discard_probes(collapsed);
    CHECK(stripped.probe_count() == 0);
    CHECK(stripped.term_count() == collapsed.term_count());
    CHECK(std::abs(stripped.norm() - 1.0) < 1e-12);

    // Pre-measurement state with four distinct probe tuples across terms.
    const StateVector entangled =
        noisy_pair_state({0.6, 0.0}, {0.8, 0.0}, {0.6, 0.0}, {0.8, 0.0}, true);
    CHECK_THROWS_AS(discard_probes(entangled), MeasurementError);

    const StateVector single = StateVector::from_terms(
        {{BasisKet{{ph(Polarization::H, FrequencyLabel::W1, "a")},
                   {ProbePhase::ThetaPrime}},
          {0.3, 0.4}}});
    const StateVector single_stripped = discard_probes(single);
    CHECK(single_stripped.terms().begin()->second == Amplitude{0.3, 0.4});
}

TEST_CASE("attach_probes adds a Zero register exactly once") {
    const StateVector s = bell_hh_vv();
    const StateVector probed = attach_probes(s, 2);
    CHECK(probed.probe_count() == 2);
    for (const auto& [k, amp] : probed.terms())
        for (const auto p : k.probes)
            CHECK(p == ProbePhase::Zero);
    CHECK_THROWS_AS(attach_probes(probed, 2), ElementError);
}

TEST_CASE("measurement on a fully pruned state raises the vacuum error") {
    const BasisKet k = ket2(ph(Polarization::H, FrequencyLabel::W1, "a"),
                            ph(Polarization::H, FrequencyLabel::W2, "b"));
    const StateVector vacuum = StateVector::from_terms({{k, {1e-17, 0.0}}});
    CHECK(vacuum.empty());
    Rng rng(1);
    CHECK_THROWS_AS(partition_measure<int>(vacuum, [](const BasisKet&) { return 0; }, rng),
                    MeasurementError);
}

TEST_CASE("identical seeds give bit-identical outcome sequences") {
    const StateVector s = noisy_pair_state({0.6, 0.0}, {0.0, 0.8}, {kInv2, 0.0}, {0.0, kInv2});
    const auto classify = [](const BasisKet& k) {
        return (k.photons[0].pol == Polarization::H ? 0 : 1) * 2 +
               (k.photons[1].pol == Polarization::H ? 0 : 1);
    };
    for (const std::uint64_t seed : {1ull, 99ull, 123456789ull}) {
        Rng a(seed);
        Rng b(seed);
        for (int i = 0; i < 50; ++i) {
            const auto ra = partition_measure<int>(s, classify, a);
            const auto rb = partition_measure<int>(s, classify, b);
            CHECK(ra.label == rb.label);
            CHECK(ra.probability == rb.probability);
        }
    }
}
