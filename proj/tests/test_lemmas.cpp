#include <doctest.h>

#include <cmath>
#include <string>

#include "lcgadget/error.hpp"
#include "lcgadget/fixtures.hpp"
#include "lcgadget/lemmas.hpp"

using namespace lcg;

namespace {

GadgetParams params_for(std::uint32_t k, std::uint32_t t, std::uint32_t Q, double tau, std::uint64_t K) {
    GadgetParams p;
    p.zeta = 0.25;
    p.k = k;
    p.t = t;
    p.Q = Q;
    p.tau = tau;
    p.K = K;
    p.gate_policy = GatePolicy::clamp;
    return p;
}

} // namespace

TEST_CASE("regular parts drop top labels and their projections") {
    auto [inst, sigma] = build_planted_instance(8, 2, 2, 8, 4, 2, 3);
    const auto p = params_for(2, 1, 2, 0.1, 2);
    const auto parts = regular_parts(inst, 0, p, dictator_halfspace(inst, sigma, 2));
    REQUIRE(parts.size() == 4);
    for (const auto& rp : parts) CHECK(rp.total == 0.0);

    Rng rng(1);
    const auto g = gaussian_edge_halfspace(inst, 0, 2, 1.0, rng);
    const auto loose = params_for(2, 1, 2, 0.9, 2);
    double sum = 0.0;
    for (const auto& rp : regular_parts(inst, 0, loose, g)) {
        CHECK(rp.side == (inst.edges[0].in_x(rp.vertex) ? Side::X : Side::Y));
        double by_j = 0.0;
        for (double x : rp.mass_by_j) by_j += x;
        CHECK(by_j == doctest::Approx(rp.total));
        sum += rp.total;
    }
    CHECK(sum <= 1.0 + 1e-9);
}

TEST_CASE("noisy mass: one projected block has a closed form") {
    const Instance inst = build_random_instance(4, 1, 2, 8, 4, 2, 2);
    const Edge& ed = inst.edges[0];
    const std::uint32_t v = ed.ex[0];
    const std::size_t pos = ed.position(v);
    std::uint32_t i2 = 1;
    while (ed.proj[pos][i2] != ed.proj[pos][0]) ++i2;
    Halfspace h;
    h.coeffs = {{{Side::X, v, 0, 0}, 1.0}, {{Side::X, v, i2, 0}, 1.0}};
    h.normalize();
    const auto p = params_for(2, 1, 1, 0.6, 2);
    const auto rep = noisy_mass_concentration(inst, 0, p, h, 40000, 5);
    const NoisyMassRow* row = nullptr;
    for (const auto& r : rep.rows) {
        if (r.vertex == v) row = &r;
    }
    REQUIRE(row != nullptr);
    CHECK(row->creg_sq == doctest::Approx(2.0));
    CHECK(row->alpha == doctest::Approx(0.25 * 0.5));
    CHECK(wilson_interval(row->shortfalls, rep.trials, 3.29).contains(1.0 - row->alpha));
    CHECK(rep.bound == doctest::Approx(std::exp(-0.0625 / (64 * 0.6))));
}

TEST_CASE("noisy mass: spread mass never falls short") {
    const Instance inst = build_random_instance(4, 1, 2, 64, 64, 1, 3);
    const Edge& ed = inst.edges[0];
    Halfspace h;
    for (auto v : ed.ey) {
        for (std::uint32_t i = 0; i < 64; ++i) h.coeffs.emplace_back(Coord{Side::Y, v, i, 0}, 1.0);
    }
    h.normalize();
    const auto p = params_for(2, 1, 1, 0.5, 2);
    const auto rep = noisy_mass_concentration(inst, 0, p, h, 20000, 7, 2);
    for (const auto& r : rep.rows) {
        if (r.creg_sq == 0.0) continue;
        CHECK(r.alpha * r.creg_sq > p.zeta / 4 * r.creg_sq);
        CHECK(r.shortfalls == 0);
    }
    CHECK(noisy_mass_concentration(inst, 0, p, h, 20000, 7, 1).rows[2].shortfalls == rep.rows[2].shortfalls);
}

TEST_CASE("variance of the paired difference") {
    const Instance inst = build_random_instance(16, 1, 8, 8, 8, 1, 4);
    const auto p = params_for(8, 6, 64, 0.3, 2);
    Rng rng(3);
    const auto h = gaussian_edge_halfspace(inst, 0, p.Q, 1.0, rng);
    const auto rep = variance_diff_mc(inst, 0, p, h, 20000, 6);
    CHECK(rep.creg_sq == doctest::Approx(1.0));
    CHECK(rep.bound == doctest::Approx(2.0 / 8.0));
    CHECK(rep.variance <= rep.bound + 3 * rep.stderr_variance);
    CHECK(std::abs(rep.mean) <= 4 * rep.stderr_mean);
    const auto again = variance_diff_mc(inst, 0, p, h, 20000, 6, 3);
    CHECK(again.variance == rep.variance);

    SUBCASE("needs a valid gate") {
        auto bad = p;
        bad.t = 1;
        CHECK_THROWS_AS(variance_diff_mc(inst, 0, bad, h, 100, 1), PreconditionError);
    }
    SUBCASE("needs a truncated halfspace") {
        Halfspace steep;
        for (std::uint32_t i = 0; i < 8; ++i) {
            steep.coeffs.emplace_back(Coord{Side::X, inst.edges[0].ex[0], i, 0}, std::pow(10.0, -static_cast<double>(i)));
        }
        steep.normalize();
        CHECK_THROWS_AS(variance_diff_mc(inst, 0, p, steep, 100, 1), PreconditionError);
    }
}

TEST_CASE("pointwise deviation") {
    SUBCASE("structural conditions are reported") {
        auto [inst, sigma] = build_planted_instance(8, 2, 2, 8, 4, 2, 3);
        const auto p = params_for(2, 1, 2, 0.1, 2);
        try {
            pointwise_deviation_mc(inst, 0, p, dictator_halfspace(inst, sigma, 2), 10, 1);
            FAIL("expected a precondition error");
        } catch (const PreconditionError& e) {
            CHECK(std::string(e.what()).find("Condition I holds") != std::string::npos);
        }
    }
    SUBCASE("regular fixture") {
        const Instance inst = build_random_instance(16, 1, 8, 8, 8, 1, 4);
        const auto p = params_for(8, 6, 64, 0.3, 2);
        Rng rng(3);
        const auto h = gaussian_edge_halfspace(inst, 0, p.Q, 1.0, rng);
        const auto rep = pointwise_deviation_mc(inst, 0, p, h, 5000, 2);
        CHECK(rep.estimate < 0.5);
        CHECK(rep.ci.contains(rep.estimate));
        CHECK(rep.bound_vacuous);
        CHECK(rep.bound == doctest::Approx(1.56 * 0.3 + 16 * std::exp(-0.0625 / (64 * 0.3)) +
                                           8192.0 / (0.09 * 0.25 * 8)));
    }
}

TEST_CASE("truncation disagreement") {
    SUBCASE("dictator: nothing to truncate") {
        auto [inst, sigma] = build_planted_instance(8, 2, 2, 8, 4, 2, 3);
        const auto p = params_for(2, 1, 2, 0.1, 2);
        const auto rep = truncation_disagreement_mc(inst, 0, p, dictator_halfspace(inst, sigma, 2), 1000, 1);
        CHECK(rep.zeroed_blocks == 0);
        CHECK(rep.disagreements == 0);
        CHECK(rep.bound == doctest::Approx(std::pow(0.1, 0.25) / 8));
        CHECK(rep.union_bound == doctest::Approx(std::pow(0.1, 0.25) / 2));
    }
    SUBCASE("geometric decay: large K removes the tail effect") {
        const Instance inst = build_random_instance(8, 1, 2, 16, 16, 1, 5);
        auto p = params_for(2, 1, 1, 0.1, 1);
        Rng rng(2);
        const auto h = geometric_edge_halfspace(inst, 0, 1, 0.5, rng);
        const auto small = truncation_disagreement_mc(inst, 0, p, h, 4000, 3);
        CHECK(small.zeroed_blocks > 0);
        p.K = 64;
        const auto big = truncation_disagreement_mc(inst, 0, p, h, 4000, 3);
        CHECK(big.zeroed_blocks == 0);
        CHECK(big.estimate == 0.0);
        CHECK(small.estimate >= big.estimate);
    }
    SUBCASE("not nice") {
        const Instance inst = build_random_instance(4, 1, 2, 8, 4, 2, 2);
        const Edge& ed = inst.edges[0];
        const std::uint32_t v = ed.ex[0];
        const std::size_t pos = ed.position(v);
        std::uint32_t i2 = 1;
        while (ed.proj[pos][i2] != ed.proj[pos][0]) ++i2;
        Halfspace h;
        h.coeffs = {{{Side::X, v, 0, 0}, 10.0}, {{Side::X, v, i2, 0}, 3.0}};
        h.normalize();
        CHECK_THROWS_AS(truncation_disagreement_mc(inst, 0, params_for(2, 1, 1, 0.1, 2), h, 10, 1),
                        PreconditionError);
    }
}
