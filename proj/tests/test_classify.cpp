#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lcgadget/classify.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/gadget.hpp"

using namespace lcg;

namespace {

SamplePoint point(std::vector<Coord> bits) {
    SamplePoint p;
    std::sort(bits.begin(), bits.end());
    p.bits = std::move(bits);
    return p;
}

Coord X(std::uint32_t v, std::uint32_t i, std::uint32_t q = 0) { return {Side::X, v, i, q}; }
Coord Y(std::uint32_t v, std::uint32_t i, std::uint32_t q = 0) { return {Side::Y, v, i, q}; }

} // namespace

TEST_CASE("halfspace evaluation") {
    Halfspace h;
    h.coeffs = {{X(0, 1), 2.0}, {X(0, 0), 1.0}, {X(0, 1), -1.0}, {Y(1, 0), 0.0}};
    h.theta = -1.5;
    h.normalize();
    CHECK(h.coeffs.size() == 2);
    CHECK(h.coefficient(X(0, 1)) == 1.0);
    CHECK(h.coefficient(Y(1, 0)) == 0.0);
    CHECK_FALSE(h.integral());
    CHECK(h.eval(point({})) == 0);
    CHECK(h.eval(point({X(0, 0)})) == 0);
    CHECK(h.eval(point({X(0, 0), X(0, 1)})) == 1);
    CHECK(h.value(point({X(0, 0), X(0, 1), Y(3, 3)})) == doctest::Approx(0.5));

    SUBCASE("pos(0) = 1") {
        Halfspace z;
        z.coeffs = {{X(0, 0), 1.0}};
        z.theta = -1.0;
        z.normalize();
        CHECK(z.integral());
        CHECK(z.eval(point({X(0, 0)})) == 1);
        CHECK(z.eval(point({})) == 0);
    }
    SUBCASE("integral sums are exact where doubles cancel badly") {
        Halfspace big;
        big.coeffs = {{X(0, 0), std::ldexp(1.0, 60)}, {X(0, 1), 1.0}, {X(0, 2), -std::ldexp(1.0, 60)}};
        big.theta = -1.0;
        big.normalize();
        CHECK(big.integral());
        CHECK(big.value(point({X(0, 0), X(0, 1), X(0, 2)})) == 0.0);
        CHECK(big.eval(point({X(0, 0), X(0, 1), X(0, 2)})) == 1);
    }
    SUBCASE("non-finite input") {
        Halfspace bad;
        bad.coeffs = {{X(0, 0), NAN}};
        CHECK_THROWS_AS(bad.normalize(), ParameterError);
    }
    SUBCASE("lopsided lookup path agrees with the merge path") {
        Halfspace wide;
        for (std::uint32_t i = 0; i < 100; ++i) wide.coeffs.emplace_back(X(0, i), i + 1.0);
        wide.theta = -10.0;
        wide.normalize();
        CHECK(wide.value(point({X(0, 4)})) == -5.0);
        CHECK(wide.value(point({X(0, 4), X(0, 50), Y(0, 1)})) == 46.0);
    }
}

TEST_CASE("CNF, DNF and negation") {
    Dnf f;
    f.terms = {{{X(0, 0), false}, {X(0, 1), false}}, {{Y(0, 0), false}, {Y(0, 1), true}}};
    const Cnf g = negate(f);
    const std::vector<Coord> universe = {X(0, 0), X(0, 1), Y(0, 0), Y(0, 1)};
    for (unsigned mask = 0; mask < 16; ++mask) {
        std::vector<Coord> bits;
        for (unsigned b = 0; b < 4; ++b) {
            if (mask >> b & 1u) bits.push_back(universe[b]);
        }
        const auto p = point(bits);
        const bool t1 = p.has(X(0, 0)) && p.has(X(0, 1));
        const bool t2 = p.has(Y(0, 0)) && !p.has(Y(0, 1));
        CHECK(eval(f, p) == (t1 || t2));
        CHECK(eval(g, p) == 1 - eval(f, p));
    }
    CHECK(eval(Cnf{}, point({})) == 1);
    CHECK(eval(Dnf{}, point({})) == 0);
}

TEST_CASE("boolean combination of halfspaces") {
    Halfspace a, b;
    a.coeffs = {{X(0, 0), 1.0}};
    a.theta = -0.5;
    b.coeffs = {{X(0, 1), 1.0}};
    b.theta = -0.5;
    a.normalize();
    b.normalize();
    BooleanOfHalfspaces xr{{a, b}, {0, 1, 1, 0}};
    CHECK(sign_pattern(xr.halfspaces, point({X(0, 1)})) == 2u);
    CHECK(eval(xr, point({})) == 0);
    CHECK(eval(xr, point({X(0, 0)})) == 1);
    CHECK(eval(xr, point({X(0, 1)})) == 1);
    CHECK(eval(xr, point({X(0, 0), X(0, 1)})) == 0);
    BooleanOfHalfspaces broken{{a, b}, {0, 1}};
    CHECK_THROWS_AS(eval(broken, point({})), ParameterError);
    CHECK(eval(Classifier{Constant{0}}, point({X(0, 0)})) == 0);
    CHECK(eval(Classifier{xr}, point({X(0, 0)})) == 1);
}

TEST_CASE("moment attack separates the basic distribution") {
    const std::uint32_t M = 200;
    const Halfspace h = moment_attack_halfspace(M);
    Rng rng(4);
    int correct = 0;
    for (int n = 0; n < 2000; ++n) {
        const auto p = sample_basic_I(M, 3, rng);
        correct += h.eval(p) == p.a;
    }
    CHECK(correct >= 1996);
}

TEST_CASE("pathological pair on the basic distribution") {
    const std::uint32_t M = 6, k = 2;
    const auto f = pathological_pair(M, k);
    CHECK_THROWS_AS(pathological_pair(51, 2), ParameterError);
    // Every a=0 support: per i, X_i or one of the k Y_{r,i}.
    std::uint64_t supports = 0;
    std::vector<std::uint32_t> choice(M, 0);
    while (true) {
        std::vector<Coord> bits;
        for (std::uint32_t i = 0; i < M; ++i) {
            if (choice[i] == 0) {
                bits.push_back(X(0, i));
            } else {
                bits.push_back(Y(choice[i] - 1, i));
            }
        }
        const auto p = point(bits);
        CHECK(f.halfspaces[0].value(p) != 0.0);
        CHECK(eval(f, p) == 0);
        ++supports;
        std::uint32_t i = 0;
        while (i < M && ++choice[i] == k + 1) choice[i++] = 0;
        if (i == M) break;
    }
    CHECK(supports == static_cast<std::uint64_t>(std::pow(k + 1, M)));
    Rng rng(6);
    for (int n = 0; n < 500; ++n) {
        const auto p = sample_basic_I(M, k, rng);
        CHECK(eval(f, p) == p.a);
    }
}

TEST_CASE("completeness CNF") {
    auto [inst, sigma] = build_planted_instance(8, 4, 2, 4, 2, 2, 1);
    const auto cnf = build_completeness_cnf(inst, sigma, 3);
    CHECK(cnf.c1.clauses.size() == 1);
    CHECK(cnf.c1.clauses[0].size() == 8 * 3);
    CHECK(cnf.both.clauses.size() == 2);
    CHECK(eval(cnf.c1, point({X(0, sigma[0], 2)})) == 1);
    CHECK(eval(cnf.both, point({X(0, sigma[0], 2)})) == 0);
    CHECK(eval(cnf.both, point({X(0, sigma[0], 2), Y(5, sigma[5], 0)})) == 1);
    CHECK_THROWS_AS(build_completeness_cnf(inst, Labeling(2, 0), 3), ParameterError);
}
