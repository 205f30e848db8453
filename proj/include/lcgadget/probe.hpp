#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcgadget/classify.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

struct Dataset {
    std::vector<SamplePoint> points;
    // Sorted union of every set bit in `points`.
    std::vector<Coord> features;

    std::size_t feature_id(const Coord& c) const;  // features.size() if absent
};

Dataset make_dataset(std::vector<SamplePoint> points);
// n points from `sampler`, point i drawn from Rng::stream(seed, i).
Dataset sample_dataset(const PointSampler& sampler, std::uint64_t n, std::uint64_t seed, unsigned workers = 1);

enum class TrainMethod { perceptron, averaged_perceptron, logistic_sgd };

TrainMethod parse_method(const std::string& s);
std::string method_name(TrainMethod m);

Halfspace train_halfspace(const Dataset& ds, TrainMethod method, std::uint32_t epochs, std::uint64_t seed);

BooleanOfHalfspaces fit_combiner(const std::vector<Halfspace>& hs, const Dataset& ds);

struct AccuracyReport {
    std::uint64_t n = 0;
    std::uint64_t correct = 0;
    double estimate = 0.0;
    Interval ci;
};

AccuracyReport accuracy(const Classifier& f, const PointSampler& sampler, std::uint64_t n, std::uint64_t seed,
                        unsigned workers = 1);
AccuracyReport accuracy(const Classifier& f, const Dataset& ds);

} // namespace lcg
