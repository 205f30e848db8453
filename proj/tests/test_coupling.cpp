#include <doctest.h>

#include <cmath>
#include <map>

#include "lcgadget/error.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/stats.hpp"

using namespace lcg;

namespace {

GadgetParams valid_params() {
    GadgetParams p;
    p.zeta = 0.25;
    p.k = 8;
    p.t = 6;
    p.Q = 2;
    p.gate_policy = GatePolicy::strict;
    return p;
}

// One X-side and one Y-side vertex get a top label, with distinct projections.
TopSets two_tops(const Instance& inst, std::uint32_t edge) {
    const Edge& ed = inst.edges[edge];
    TopSets top(ed.vids.size());
    const std::size_t px = ed.position(ed.ex[0]);
    const std::size_t py = ed.position(ed.ey[0]);
    top[px] = {0};
    for (std::uint32_t i = 0; i < inst.M; ++i) {
        if (ed.proj[py][i] != ed.proj[px][0]) {
            top[py] = {i};
            break;
        }
    }
    return top;
}

struct Counts {
    std::uint64_t n = 0;
    std::map<Coord, std::uint64_t> hits;
    void add(const SamplePoint& p) {
        ++n;
        for (const auto& c : p.bits) hits[c]++;
    }
    double mean(const Coord& c) const {
        auto it = hits.find(c);
        return it == hits.end() ? 0.0 : static_cast<double>(it->second) / n;
    }
};

double max_z(const Counts& a, const Counts& b, const std::vector<Coord>& coords) {
    double worst = 0.0;
    for (const auto& c : coords) {
        const double pa = a.mean(c), pb = b.mean(c);
        const double var = pa * (1 - pa) / a.n + pb * (1 - pb) / b.n;
        if (var > 0) worst = std::max(worst, std::abs(pa - pb) / std::sqrt(var));
    }
    return worst;
}

std::vector<Coord> block_bits(const SamplePoint& p, const Coord& block) {
    std::vector<Coord> out;
    for (const auto& c : p.bits) {
        if (block_of(c) == block) out.push_back(c);
    }
    return out;
}

} // namespace

TEST_CASE("paired outputs have the class marginals of the edge distribution") {
    const Instance inst = build_random_instance(16, 1, 8, 4, 4, 1, 3);
    const auto params = valid_params();
    const TopSets top = two_tops(inst, 0);
    Counts c0, c1, d0, d1;
    const std::uint64_t n = 60000;
    for (std::uint64_t i = 0; i < n; ++i) {
        Rng rng = Rng::stream(21, i);
        const auto [p0, p1] = sample_paired(inst, 0, params, top, rng);
        CHECK(p0.a == 0);
        CHECK(p1.a == 1);
        c0.add(p0);
        c1.add(p1);
        Rng r0 = Rng::stream(22, i), r1 = Rng::stream(23, i);
        d0.add(sample_edge(inst, 0, params, r0, 0));
        d1.add(sample_edge(inst, 0, params, r1, 1));
    }
    const auto coords = edge_coordinates(inst, params.Q);
    const double thr = normal_upper_quantile(0.001 / (2.0 * coords.size()));
    CHECK(max_z(c0, d0, coords) <= thr);
    CHECK(max_z(c1, d1, coords) <= thr);
    CHECK(max_z(c0, c1, coords) <= thr);
}

TEST_CASE("top blocks and shared noise agree between the two outputs") {
    const Instance inst = build_random_instance(16, 1, 8, 4, 4, 1, 5);
    const auto params = valid_params();
    const TopSets top = two_tops(inst, 0);
    const Edge& ed = inst.edges[0];
    std::vector<Coord> top_blocks;
    for (std::size_t pos = 0; pos < top.size(); ++pos) {
        const Side s = ed.in_x(ed.vids[pos]) ? Side::X : Side::Y;
        for (auto i : top[pos]) top_blocks.push_back({s, ed.vids[pos], i, 0});
    }
    REQUIRE(top_blocks.size() == 2);
    Rng rng(8);
    std::uint64_t shared_b = 0, total_b = 0;
    for (int n = 0; n < 5000; ++n) {
        const auto [p0, p1] = sample_paired(inst, 0, params, top, rng);
        for (const auto& b : top_blocks) CHECK(block_bits(p0, b) == block_bits(p1, b));
        for (std::uint32_t j = 0; j < inst.m; ++j) {
            const auto& b0 = p0.transcript->blocks[j];
            const auto& b1 = p1.transcript->blocks[j];
            CHECK(b0.S == b1.S);
            CHECK(b0.Sp == b1.Sp);
            ++total_b;
            if (b0.b == b1.b) {
                ++shared_b;
                CHECK(b0.noise_key == b1.noise_key);
            }
        }
    }
    // Only owned blocks can disagree on b, and then rarely.
    CHECK(static_cast<double>(shared_b) / total_b > 0.8);
}

TEST_CASE("coupling preconditions") {
    const Instance inst = build_random_instance(16, 1, 8, 4, 4, 1, 3);
    auto params = valid_params();
    Rng rng(1);
    SUBCASE("invalid gate") {
        params.t = 1;
        params.gate_policy = GatePolicy::clamp;
        CHECK_THROWS_AS(sample_paired(inst, 0, params, two_tops(inst, 0), rng), PreconditionError);
    }
    SUBCASE("two top labels of different vertices on one projection") {
        const Edge& ed = inst.edges[0];
        TopSets top(ed.vids.size());
        top[0] = {0};
        for (std::uint32_t i = 0; i < inst.M; ++i) {
            if (ed.proj[1][i] == ed.proj[0][0]) top[1] = {i};
        }
        CHECK_THROWS_AS(sample_paired(inst, 0, params, top, rng), PreconditionError);
    }
    SUBCASE("wrong number of top sets") {
        CHECK_THROWS_AS(sample_paired(inst, 0, params, TopSets(3), rng), ParameterError);
    }
    SUBCASE("two top labels of one vertex on one projection") {
        const Instance wide = build_random_instance(16, 1, 8, 8, 4, 2, 3);
        const Edge& ed = wide.edges[0];
        TopSets top(ed.vids.size());
        for (std::uint32_t i = 1; i < wide.M; ++i) {
            if (ed.proj[0][i] == ed.proj[0][0]) top[0] = {0, i};
        }
        REQUIRE(top[0].size() == 2);
        CHECK_THROWS_AS(sample_paired(wide, 0, params, top, rng), PreconditionError);
    }
}
