#include <doctest.h>

#include "lcgadget/classify.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/probe.hpp"

using namespace lcg;

namespace {

// Linearly separable: label 1 iff feature (X,0,0,0) is set; noise features 1..9.
SamplePoint separable(Rng& rng) {
    SamplePoint p;
    p.a = static_cast<std::uint8_t>(rng.below(2));
    if (p.a) p.bits.push_back({Side::X, 0, 0, 0});
    for (std::uint32_t i = 1; i < 10; ++i) {
        if (rng.bernoulli(0.5)) p.bits.push_back({Side::X, 0, i, 0});
    }
    return p;
}

} // namespace

TEST_CASE("datasets") {
    const PointSampler s = separable;
    const auto a = sample_dataset(s, 3000, 4, 1);
    const auto b = sample_dataset(s, 3000, 4, 3);
    REQUIRE(a.points.size() == 3000);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].bits == b.points[i].bits);
    CHECK(a.features.size() == 10);
    CHECK(a.feature_id({Side::X, 0, 3, 0}) == 3);
    CHECK(a.feature_id({Side::Y, 0, 3, 0}) == a.features.size());
    CHECK_FALSE(a.points[0].transcript.has_value());
}

TEST_CASE("training methods separate a separable sample") {
    const PointSampler s = separable;
    const auto train = sample_dataset(s, 2000, 1);
    for (auto m : {TrainMethod::perceptron, TrainMethod::averaged_perceptron, TrainMethod::logistic_sgd}) {
        CAPTURE(method_name(m));
        const Halfspace h = train_halfspace(train, m, 5, 2);
        const auto rep = accuracy(Classifier{h}, s, 5000, 99);
        CHECK(rep.estimate >= 0.99);
        CHECK(rep.ci.contains(rep.estimate));
        CHECK(train_halfspace(train, m, 5, 2).coeffs == h.coeffs);
    }
    CHECK(parse_method("averaged_perceptron") == TrainMethod::averaged_perceptron);
    CHECK(parse_method(method_name(TrainMethod::logistic_sgd)) == TrainMethod::logistic_sgd);
    CHECK_THROWS_AS(parse_method("svm"), ParameterError);
    CHECK_THROWS_AS(train_halfspace(Dataset{}, TrainMethod::perceptron, 1, 1), ParameterError);
    CHECK_THROWS_AS(train_halfspace(train, TrainMethod::perceptron, 0, 1), ParameterError);
}

TEST_CASE("perceptron learns the moment attack on the basic distribution") {
    const PointSampler s = [](Rng& rng) { return sample_basic_I(200, 3, rng); };
    const auto train = sample_dataset(s, 2000, 5);
    const Halfspace h = train_halfspace(train, TrainMethod::perceptron, 10, 1);
    CHECK(accuracy(Classifier{h}, s, 4000, 6).estimate >= 0.95);
}

TEST_CASE("combiner is a majority vote per sign pattern") {
    Halfspace a, b;
    a.coeffs = {{{Side::X, 0, 0, 0}, 1.0}};
    a.theta = -0.5;
    b.coeffs = {{{Side::X, 0, 1, 0}, 1.0}};
    b.theta = -0.5;
    a.normalize();
    b.normalize();
    // Label = XOR of the two features: no single halfspace gets it, the table does.
    const PointSampler s = [](Rng& rng) {
        SamplePoint p;
        const bool x0 = rng.bernoulli(0.5), x1 = rng.bernoulli(0.5);
        if (x0) p.bits.push_back({Side::X, 0, 0, 0});
        if (x1) p.bits.push_back({Side::X, 0, 1, 0});
        p.a = x0 != x1;
        return p;
    };
    const auto ds = sample_dataset(s, 1000, 2);
    const auto f = fit_combiner({a, b}, ds);
    CHECK(f.table == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(accuracy(Classifier{f}, ds).estimate == 1.0);
    // Unseen patterns and ties map to 1.
    const auto g = fit_combiner({a, b}, make_dataset({}));
    CHECK(g.table == std::vector<std::uint8_t>{1, 1, 1, 1});
    CHECK_THROWS_AS(fit_combiner({}, ds), ParameterError);
    CHECK_THROWS_AS(fit_combiner(std::vector<Halfspace>(21, a), ds), ParameterError);
}

TEST_CASE("accuracy estimates") {
    const PointSampler s = separable;
    const auto rep = accuracy(Classifier{Constant{1}}, s, 20000, 3, 2);
    CHECK(rep.n == 20000);
    CHECK(rep.ci.contains(0.5));
    CHECK(accuracy(Classifier{Constant{1}}, s, 20000, 3, 1).correct == rep.correct);
    CHECK_THROWS_AS(accuracy(Classifier{Constant{1}}, s, 0, 3), ParameterError);
}
