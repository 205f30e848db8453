#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "lcgadget/error.hpp"
#include "lcgadget/fixtures.hpp"
#include "lcgadget/io.hpp"

using namespace lcg;

TEST_CASE("instance and labeling round trip") {
    auto [inst, sigma] = build_planted_instance(10, 5, 2, 6, 3, 2, 4);
    const json j = instance_to_json(inst);
    const Instance back = instance_from_json(json::parse(j.dump()));
    CHECK(instance_to_json(back) == j);
    CHECK(back.max_preimage() == inst.max_preimage());
    CHECK(labeling_from_json(labeling_to_json(sigma), 10) == sigma);

    SUBCASE("malformed") {
        json bad = j;
        bad.erase("k");
        CHECK_THROWS_AS(instance_from_json(bad), FormatError);
        bad = j;
        bad["edges"][0]["proj"].erase(std::to_string(inst.edges[0].vids[0]));
        CHECK_THROWS_AS(instance_from_json(bad), FormatError);
        CHECK_THROWS_AS(labeling_from_json(json{{"0", 1}}, 10), FormatError);
        CHECK_THROWS_AS(labeling_from_json(json{{"x", 1}}, 1), FormatError);
        CHECK_THROWS_AS(labeling_from_json(json::array(), 1), FormatError);
    }
    SUBCASE("invalid projections are rejected on load") {
        json bad = j;
        bad["edges"][0]["proj"][std::to_string(inst.edges[0].vids[0])][0] = 99;
        CHECK_THROWS_AS(instance_from_json(bad), Error);
    }
}

TEST_CASE("params round trip and override rules") {
    const auto p = derive_params(0.2, 0.1, 2, 1);
    const auto q = params_from_json(params_to_json(p), p);
    CHECK(q.faithful);
    CHECK(q.k == p.k);
    CHECK(q.K == p.K);
    CHECK(params_from_json(json{{"gate", "clamp"}}, p).gate_policy == GatePolicy::clamp);
    CHECK_FALSE(params_from_json(json{{"Q", 3}}, p).faithful);
    CHECK_FALSE(params_from_json(json{{"faithful", false}}, p).faithful);
    CHECK_THROWS_AS(params_from_json(json{{"gate", "maybe"}}, p), FormatError);
    CHECK_THROWS_AS(params_from_json(json{{"Q", "many"}}, p), FormatError);
    CHECK_THROWS_AS(params_from_json(json::array(), p), FormatError);
}

TEST_CASE("points and transcripts") {
    auto [inst, sigma] = build_planted_instance(8, 4, 2, 4, 2, 2, 1);
    GadgetParams params;
    params.k = 2;
    params.t = 1;
    params.Q = 4;
    params.gate_policy = GatePolicy::clamp;
    Rng rng(2);
    for (int n = 0; n < 50; ++n) {
        const auto p = sample_global(inst, params, rng);
        const auto back = point_from_json(json::parse(point_to_json(p, true).dump()));
        CHECK(back.bits == p.bits);
        CHECK(back.a == p.a);
        CHECK(back.edge == p.edge);
        REQUIRE(back.transcript.has_value());
        CHECK(materialize_global(inst, params.Q, *back.transcript).bits == p.bits);
        CHECK_FALSE(point_from_json(point_to_json(p, false)).transcript.has_value());
    }
    const auto b = sample_basic_I(5, 2, rng);
    CHECK(materialize_basic(5, 2, transcript_from_json(transcript_to_json(*b.transcript))).bits == b.bits);
    const auto s = sample_simplified_D(2, 2, 4, 3, rng);
    CHECK(materialize_simplified(2, 2, 4, 3, transcript_from_json(transcript_to_json(*s.transcript))).bits == s.bits);
    CHECK_THROWS_AS(point_from_json(json{{"a", 1}, {"edge", 0}, {"x", {{1, 2}}}, {"y", json::array()}}), FormatError);
    CHECK_THROWS_AS(transcript_from_json(json{{"kind", "other"}}), FormatError);
}

TEST_CASE("classifiers") {
    auto [inst, sigma] = build_planted_instance(8, 4, 2, 4, 2, 2, 1);
    const Halfspace h = dictator_halfspace(inst, sigma, 2, 1.5);
    const Halfspace hb = halfspace_from_json(json::parse(halfspace_to_json(h).dump()));
    CHECK(hb.coeffs == h.coeffs);
    CHECK(hb.theta == h.theta);
    CHECK(halfspaces_from_json(json{{"halfspaces", {halfspace_to_json(h), halfspace_to_json(h)}}}).size() == 2);
    CHECK(halfspaces_from_json(halfspace_to_json(h)).size() == 1);
    CHECK_THROWS_AS(halfspaces_from_json(json{{"halfspaces", json::array()}}), FormatError);

    const auto cnf = build_completeness_cnf(inst, sigma, 2);
    Dnf dnf;
    dnf.terms = {{{{Side::X, 1, 2, 0}, true}}};
    const std::vector<Classifier> all = {Constant{0}, cnf.both, dnf, h,
                                         BooleanOfHalfspaces{{h, h}, {0, 1, 1, 1}}};
    GadgetParams params;
    params.k = 2;
    params.t = 1;
    params.Q = 2;
    params.gate_policy = GatePolicy::clamp;
    Rng rng(5);
    for (const auto& c : all) {
        const json j = classifier_to_json(c);
        const Classifier back = classifier_from_json(json::parse(j.dump()));
        CHECK(back.index() == c.index());
        CHECK(classifier_to_json(back) == j);
        for (int n = 0; n < 20; ++n) {
            const auto p = sample_global(inst, params, rng);
            CHECK(eval(back, p) == eval(c, p));
        }
    }
    CHECK_THROWS_AS(classifier_from_json(json{{"type", "tree"}}), FormatError);
    CHECK_THROWS_AS(halfspace_from_json(json{{"type", "halfspace"}, {"theta", 0}, {"coeffs", {{"X", 1}}}}),
                    FormatError);
}

TEST_CASE("files and CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "lcgadget-test-io";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "a.json").string();
    write_text_file(path, "{\"b\": [1, 2], \"a\": {\"c\": \"x,y\"}}\n");
    const json j = read_json_file(path);
    CHECK(j.at("b").size() == 2);
    CHECK(json_to_csv(j) == "key,value\na.c,\"x,y\"\nb.0,1\nb.1,2\n");
    const std::string lines = (dir / "b.jsonl").string();
    write_text_file(lines, "{\"a\":1}\n\n{\"a\":2}\n");
    CHECK(read_jsonl_file(lines).size() == 2);
    write_text_file(lines, "{\"a\":1}\nnope\n");
    CHECK_THROWS_AS(read_jsonl_file(lines), FormatError);
    CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), FormatError);
    std::filesystem::remove_all(dir);
}
