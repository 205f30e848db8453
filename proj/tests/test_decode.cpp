#include <doctest.h>

#include <cmath>

#include "lcgadget/decode.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/fixtures.hpp"

using namespace lcg;

TEST_CASE("decoder draws top labels half the time") {
    auto [inst, sigma] = build_planted_instance(8, 4, 2, 4, 2, 2, 1);
    const Decoder dec(inst, {dictator_halfspace(inst, sigma, 2)}, 2, 0.1, 2);
    Rng rng(3);
    const int n = 40000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += dec.draw_vertex(0, rng) == sigma[0];
    // 1/2 from the top set plus 1/(2M) from the uniform fallback.
    CHECK(wilson_interval(hits, n, 3.29).contains(0.5 + 0.5 / 4));
}

TEST_CASE("decoder samples residual labels by squared mass") {
    const Instance inst = build_random_instance(4, 1, 2, 4, 2, 2, 1);
    Halfspace h;
    h.coeffs = {{{Side::X, 0, 0, 0}, 1.0}, {{Side::X, 0, 1, 0}, std::sqrt(3.0)}};
    h.normalize();
    const Decoder dec(inst, {h}, 1, 0.9, 2);
    Rng rng(4);
    const int n = 40000;
    std::vector<int> count(4, 0);
    for (int i = 0; i < n; ++i) count[dec.draw_vertex(0, rng)]++;
    // Side X with prob 1/2 (mass 1:3), side Y empty -> uniform over M = 4.
    const std::vector<double> want = {0.125 + 0.125, 0.375 + 0.125, 0.125, 0.125};
    for (int i = 0; i < 4; ++i) CHECK(wilson_interval(count[i], n, 3.29).contains(want[i]));
    CHECK_THROWS_AS(Decoder(inst, {}, 1, 0.1, 1), ParameterError);
}

TEST_CASE("decode and score") {
    auto [inst, sigma] = build_planted_instance(16, 8, 2, 8, 4, 2, 7);
    const auto h = dictator_halfspace(inst, sigma, 2);
    const auto rep = decode_and_score(inst, {h}, 2, 0.1, 2, 0.1, 100, 5);
    CHECK(rep.best_weak >= 0.9);
    CHECK(rep.mean_strong <= rep.mean_weak);
    CHECK(rep.edge_weak_freq.size() == 8);
    const double want = 0.1 / 4 / 16 * std::min(1.0 / 4, std::pow(0.1, 4) / 2);
    CHECK(rep.bound == doctest::Approx(want));
    CHECK(rep.bound_vacuous);
    const auto again = decode_and_score(inst, {h}, 2, 0.1, 2, 0.1, 100, 5, 3);
    CHECK(again.mean_weak == rep.mean_weak);
    CHECK(again.edge_weak_freq == rep.edge_weak_freq);
    CHECK_THROWS_AS(decode_and_score(inst, {h}, 2, 0.1, 2, 0.1, 0, 5), ParameterError);
}

TEST_CASE("random coefficients decode like uniform labels") {
    const Instance inst = build_random_instance(16, 8, 2, 8, 4, 2, 9);
    Rng rng(2);
    const auto h = gaussian_halfspace(inst, 4, rng);
    const auto rep = decode_and_score(inst, {h}, 4, 0.1, 2, 0.1, 2000, 3);
    const auto base = uniform_labeling_baseline(inst, 2000, 4);
    CHECK(base.samples == 2000);
    const double se = std::hypot(rep.stderr_weak, base.stderr_weak);
    CHECK(std::abs(rep.mean_weak - base.mean_weak) <= 4 * se + 0.05);
    CHECK_THROWS_AS(uniform_labeling_baseline(inst, 1, 4), ParameterError);
}
