#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "lcgadget/anticonc.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/rng.hpp"

using namespace lcg;

TEST_CASE("exact small-ball probability") {
    SUBCASE("hand examples") {
        CHECK(lo_exact({1.0}, 0.0, 0.0) == 0.5);
        CHECK(lo_exact({1.0, 1.0}, -1.0, 0.0) == 0.5);
        CHECK(lo_exact({1.0, 1.0}, -1.0, 1.0) == 1.0);
        CHECK(lo_exact({1.0, 2.0, 4.0}, -3.0, 0.5) == 0.125);
        CHECK(lo_exact({}, 0.0, 0.0) == 1.0);
        CHECK(lo_exact({}, 1.0, 0.5) == 0.0);
    }
    SUBCASE("meet-in-the-middle equals enumeration") {
        Rng rng(7);
        for (int n = 0; n < 200; ++n) {
            const auto len = static_cast<std::size_t>(1 + rng.below(12));
            std::vector<double> a(len);
            for (auto& x : a) x = static_cast<double>(static_cast<std::int64_t>(rng.below(7)) - 3);
            const double theta = static_cast<double>(static_cast<std::int64_t>(rng.below(9)) - 4);
            const double r = static_cast<double>(rng.below(3));
            CHECK(lo_exact(a, theta, r) == lo_brute(a, theta, r));
        }
        for (int n = 0; n < 50; ++n) {
            std::vector<double> a(16);
            for (auto& x : a) x = rng.normal();
            const double theta = rng.normal(), r = rng.uniform();
            CHECK(lo_exact(a, theta, r) == lo_brute(a, theta, r));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(lo_exact(std::vector<double>(31, 1.0), 0, 1), ParameterError);
        CHECK_THROWS_AS(lo_brute(std::vector<double>(25, 1.0), 0, 1), ParameterError);
        CHECK_THROWS_AS(lo_exact({NAN}, 0, 1), ParameterError);
        CHECK_THROWS_AS(lo_exact({1.0}, 0, -1), ParameterError);
    }
}

TEST_CASE("sup over theta") {
    CHECK(lo_exact_sup({1.0}, 0.0) == 0.5);
    CHECK(lo_exact_sup({1.0}, 0.5) == 1.0);
    CHECK(lo_exact_sup({1.0, 1.0, 1.0, 1.0}, 0.0) == doctest::Approx(6.0 / 16));
    CHECK(lo_exact_sup({1.0, 1.0, 1.0, 1.0}, 1.0) == doctest::Approx(14.0 / 16));
    Rng rng(3);
    for (int n = 0; n < 30; ++n) {
        std::vector<double> a(8);
        for (auto& x : a) x = static_cast<double>(1 + rng.below(4));
        const double r = static_cast<double>(rng.below(3));
        const double sup = lo_exact_sup(a, r);
        double best = 0.0;
        for (int t = -80; t <= 0; ++t) best = std::max(best, lo_brute(a, 0.5 * t, r));
        CHECK(sup == doctest::Approx(best));
    }
}

TEST_CASE("Littlewood-Offord scaling") {
    const auto rep = lo_scaling_check({16, 64, 256, 1024});
    CHECK(rep.pass);
    CHECK(rep.slope >= -0.6);
    CHECK(rep.slope <= -0.4);
    CHECK(rep.probabilities[0] == doctest::Approx(lo_exact_sup(std::vector<double>(16, 1.0), 1.0)));
    CHECK_THROWS_AS(lo_scaling_check({16}), ParameterError);
}

TEST_CASE("block small-ball Monte Carlo") {
    SUBCASE("one unit block: both outcomes fit in the closed window") {
        const auto rep = block_lo_mc({{1.0, 0.0, 0.0, 0.0}}, 2000, 1);
        CHECK(rep.radius == 1.0);
        CHECK(rep.estimate == 1.0);
    }
    SUBCASE("Q = 1 agrees with the exact sup") {
        Rng rng(5);
        int inside = 0;
        const int cases = 20;
        for (int n = 0; n < cases; ++n) {
            std::vector<double> a(10);
            for (auto& x : a) x = static_cast<double>(1 + rng.below(3));
            std::sort(a.begin(), a.end(), std::greater<>());
            std::vector<std::vector<double>> blocks;
            for (double x : a) blocks.push_back({x});
            const auto rep = block_lo_mc(blocks, 40000, 100 + n);
            const double exact = lo_exact_sup(a, a.back() / std::sqrt(static_cast<double>(a.size())));
            inside += rep.ci.lo - 0.01 <= exact && exact <= rep.ci.hi + 0.01;
        }
        CHECK(inside >= cases - 1);
    }
    SUBCASE("decay in T") {
        const auto s = block_lo_slope({16, 64, 256}, 4, 20000, 9);
        CHECK(s.slope >= -0.65);
        CHECK(s.slope <= -0.35);
    }
    SUBCASE("worker count does not change the result") {
        std::vector<std::vector<double>> blocks(12, {1.0, 0.5});
        const auto a = block_lo_mc(blocks, 8000, 3, 1);
        const auto b = block_lo_mc(blocks, 8000, 3, 4);
        CHECK(a.hits == b.hits);
        CHECK(a.theta == b.theta);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(block_lo_mc({}, 100, 1), ParameterError);
        CHECK_THROWS_AS(block_lo_mc({{1.0}, {2.0}}, 100, 1), ParameterError);
        CHECK_THROWS_AS(block_lo_mc({{1.0}}, 2, 1), ParameterError);
    }
}

TEST_CASE("Berry-Esseen gap") {
    auto bernoullis = [](std::size_t n) { return std::vector<Atoms>(n, Atoms{{0.0, 1.0}, {0.5, 0.5}}); };
    SUBCASE("symmetric bits: exact gap shrinks like 1/sqrt(n)") {
        const auto r4 = berry_esseen_gap(bernoullis(4));
        const auto r16 = berry_esseen_gap(bernoullis(16));
        const auto r64 = berry_esseen_gap(bernoullis(64));
        CHECK(r4.exact);
        CHECK(r4.gap == doctest::Approx(0.1875).epsilon(1e-6));
        CHECK(r16.gap < r4.gap);
        CHECK(r64.gap < r16.gap);
        CHECK(r64.gap * 8 == doctest::Approx(r4.gap * 2).epsilon(0.25));
        CHECK(r16.gamma == doctest::Approx(16 * 0.125 / std::pow(4.0, 1.5)));
        CHECK(r16.gap <= 0.56 * r16.gamma);
    }
    SUBCASE("Monte Carlo path agrees with the exact path") {
        std::vector<Atoms> v;
        for (int i = 0; i < 12; ++i) v.push_back({{0.0, 1.0 + 0.1 * i, 3.0}, {0.5, 0.3, 0.2}});
        const auto exact = berry_esseen_gap(v);
        const auto mc = berry_esseen_gap(v, 200000, 4, 16);
        CHECK(exact.exact);
        CHECK_FALSE(mc.exact);
        CHECK(std::abs(exact.gap - mc.gap) <= mc.tolerance);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(berry_esseen_gap({}), ParameterError);
        CHECK_THROWS_AS(berry_esseen_gap({Atoms{{1.0}, {0.5}}}), ParameterError);
        CHECK_THROWS_AS(berry_esseen_gap({Atoms{{1.0}, {1.0}}}), ParameterError);
    }
}
