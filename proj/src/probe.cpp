#include "lcgadget/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcgadget/error.hpp"
#include "lcgadget/parallel.hpp"

namespace lcg {

std::size_t Dataset::feature_id(const Coord& c) const {
    auto it = std::lower_bound(features.begin(), features.end(), c);
    return (it != features.end() && *it == c) ? static_cast<std::size_t>(it - features.begin()) : features.size();
}

Dataset make_dataset(std::vector<SamplePoint> points) {
    Dataset ds;
    ds.points = std::move(points);
    for (const auto& p : ds.points) ds.features.insert(ds.features.end(), p.bits.begin(), p.bits.end());
    std::sort(ds.features.begin(), ds.features.end());
    ds.features.erase(std::unique(ds.features.begin(), ds.features.end()), ds.features.end());
    return ds;
}

Dataset sample_dataset(const PointSampler& sampler, std::uint64_t n, std::uint64_t seed, unsigned workers) {
    auto pts = parallel_chunks<Collect<SamplePoint>>(n, workers, [&](std::uint64_t b, std::uint64_t e) {
        Collect<SamplePoint> out;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng = Rng::stream(seed, i);
            SamplePoint p = sampler(rng);
            p.transcript.reset();
            out.v.push_back(std::move(p));
        }
        return out;
    });
    return make_dataset(std::move(pts.v));
}

TrainMethod parse_method(const std::string& s) {
    if (s == "perceptron") return TrainMethod::perceptron;
    if (s == "averaged_perceptron") return TrainMethod::averaged_perceptron;
    if (s == "logistic_sgd") return TrainMethod::logistic_sgd;
    throw ParameterError("unknown training method: " + s);
}

std::string method_name(TrainMethod m) {
    switch (m) {
        case TrainMethod::perceptron: return "perceptron";
        case TrainMethod::averaged_perceptron: return "averaged_perceptron";
        case TrainMethod::logistic_sgd: return "logistic_sgd";
    }
    return "?";
}

namespace {

// Points as lists of dense feature ids.
std::vector<std::vector<std::uint32_t>> encode(const Dataset& ds) {
    std::vector<std::vector<std::uint32_t>> rows;
    rows.reserve(ds.points.size());
    for (const auto& p : ds.points) {
        std::vector<std::uint32_t> r;
        r.reserve(p.bits.size());
        for (const auto& b : p.bits) r.push_back(static_cast<std::uint32_t>(ds.feature_id(b)));
        rows.push_back(std::move(r));
    }
    return rows;
}

Halfspace to_halfspace(const Dataset& ds, const std::vector<double>& w, double theta) {
    Halfspace h;
    for (std::size_t f = 0; f < w.size(); ++f) {
        if (w[f] != 0.0) h.coeffs.emplace_back(ds.features[f], w[f]);
    }
    h.theta = theta;
    h.normalize();
    return h;
}

} // namespace

Halfspace train_halfspace(const Dataset& ds, TrainMethod method, std::uint32_t epochs, std::uint64_t seed) {
    if (ds.points.empty()) throw ParameterError("empty dataset");
    if (epochs == 0) throw ParameterError("epochs must be positive");
    const auto rows = encode(ds);
    const std::size_t F = ds.features.size();
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);

    std::vector<double> w(F, 0.0);
    double theta = 0.0;
    auto score = [&](std::size_t n) {
        double s = theta;
        for (auto f : rows[n]) s += w[f];
        return s;
    };

    if (method == TrainMethod::logistic_sgd) {
        const double lambda = 1e-6;
        std::uint64_t step = 0;
        for (std::uint32_t ep = 0; ep < epochs; ++ep) {
            rng.shuffle(std::span<std::size_t>(order));
            for (auto n : order) {
                const double lr = 0.5 / std::sqrt(1.0 + static_cast<double>(step++) / rows.size());
                const double y = ds.points[n].a ? 1.0 : 0.0;
                const double s = std::clamp(score(n), -50.0, 50.0);
                const double g = 1.0 / (1.0 + std::exp(-s)) - y;
                for (auto f : rows[n]) w[f] -= lr * (g + lambda * w[f]);
                theta -= lr * g;
            }
        }
        return to_halfspace(ds, w, theta);
    }

    // Averaging uses the usual lazy trick: keep u = sum_c c * update_c and
    // return w - u / c at the end.
    std::vector<double> u(F, 0.0);
    double u_theta = 0.0;
    double c = 1.0;
    for (std::uint32_t ep = 0; ep < epochs; ++ep) {
        rng.shuffle(std::span<std::size_t>(order));
        for (auto n : order) {
            const int y = ds.points[n].a ? 1 : -1;
            const int pred = pos(score(n)) ? 1 : -1;
            if (pred != y) {
                for (auto f : rows[n]) {
                    w[f] += y;
                    u[f] += y * c;
                }
                theta += y;
                u_theta += y * c;
            }
            c += 1.0;
        }
    }
    if (method == TrainMethod::averaged_perceptron) {
        for (std::size_t f = 0; f < F; ++f) w[f] -= u[f] / c;
        theta -= u_theta / c;
    }
    return to_halfspace(ds, w, theta);
}

BooleanOfHalfspaces fit_combiner(const std::vector<Halfspace>& hs, const Dataset& ds) {
    if (hs.empty()) throw ParameterError("need at least one halfspace");
    if (hs.size() > 20) throw ParameterError("ell must be <= 20");
    const std::size_t patterns = std::size_t{1} << hs.size();
    std::vector<std::int64_t> vote(patterns, 0);
    for (const auto& p : ds.points) vote[sign_pattern(hs, p)] += p.a ? 1 : -1;
    BooleanOfHalfspaces f;
    f.halfspaces = hs;
    f.table.resize(patterns);
    for (std::size_t s = 0; s < patterns; ++s) f.table[s] = vote[s] >= 0 ? 1 : 0;
    return f;
}

namespace {

struct Count {
    std::uint64_t n = 0, correct = 0;
    Count& operator+=(const Count& o) {
        n += o.n;
        correct += o.correct;
        return *this;
    }
};

AccuracyReport finish_report(const Count& c) {
    AccuracyReport r;
    r.n = c.n;
    r.correct = c.correct;
    r.estimate = c.n ? static_cast<double>(c.correct) / c.n : 0.0;
    r.ci = wilson_interval(c.correct, c.n);
    return r;
}

} // namespace

AccuracyReport accuracy(const Classifier& f, const PointSampler& sampler, std::uint64_t n, std::uint64_t seed,
                        unsigned workers) {
    if (n == 0) throw ParameterError("n must be positive");
    const Count c = parallel_chunks<Count>(n, workers, [&](std::uint64_t b, std::uint64_t e) {
        Count out;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng = Rng::stream(seed, i);
            const SamplePoint p = sampler(rng);
            ++out.n;
            out.correct += eval(f, p) == p.a;
        }
        return out;
    });
    return finish_report(c);
}

AccuracyReport accuracy(const Classifier& f, const Dataset& ds) {
    Count c;
    for (const auto& p : ds.points) {
        ++c.n;
        c.correct += eval(f, p) == p.a;
    }
    return finish_report(c);
}

} // namespace lcg
