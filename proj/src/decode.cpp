#include "lcgadget/decode.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lcgadget/criticalindex.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/parallel.hpp"

namespace lcg {

Decoder::Decoder(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau,
                 std::uint64_t K)
    : M_(inst.M), n_(inst.num_vertices), ell_(hs.size()) {
    if (hs.empty()) throw ParameterError("need at least one halfspace");
    if (inst.M == 0) throw ParameterError("instance has no labels");
    tables_.resize(ell_ * n_);
    for (std::size_t s = 0; s < ell_; ++s) {
        for (std::uint32_t v = 0; v < n_; ++v) {
            Table& tb = tables_[s * n_ + v];
            std::set<std::uint32_t> top;
            for (int side = 0; side < 2; ++side) {
                const BlockVector bv = block_vector(hs[s], static_cast<Side>(side), v, inst.M, Q);
                const auto rep = critical_index(bv, tau, K);
                top.insert(rep.C_tau_leK.begin(), rep.C_tau_leK.end());
                Residual& res = tb.side[side];
                double acc = 0.0;
                for (const auto& [label, sq] : bv.sq_norms()) {
                    if (rep.critical(label)) continue;
                    acc += sq;
                    res.labels.push_back(label);
                    res.cumulative.push_back(acc);
                }
            }
            tb.top.assign(top.begin(), top.end());
        }
    }
}

std::uint32_t Decoder::draw_vertex(std::uint32_t v, Rng& rng) const {
    const Table& tb = tables_[rng.below(ell_) * n_ + v];
    if (rng.bernoulli(0.5) && !tb.top.empty()) {
        return tb.top[rng.below(tb.top.size())];
    }
    const Residual& res = tb.side[rng.below(2)];
    if (res.labels.empty() || !(res.cumulative.back() > 0.0)) {
        return static_cast<std::uint32_t>(rng.below(M_));
    }
    const double u = rng.uniform() * res.cumulative.back();
    auto it = std::upper_bound(res.cumulative.begin(), res.cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - res.cumulative.begin()), res.labels.size() - 1);
    return res.labels[idx];
}

Labeling Decoder::draw(Rng& rng) const {
    Labeling sigma(n_);
    for (std::uint32_t v = 0; v < n_; ++v) sigma[v] = draw_vertex(v, rng);
    return sigma;
}

Labeling randomized_labeling(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau,
                             std::uint64_t K, Rng& rng) {
    return Decoder(inst, hs, Q, tau, K).draw(rng);
}

namespace {

struct ScoreAcc {
    Moments weak;
    CompensatedSum strong;
    double best = 0.0;
    SumVector<std::uint64_t> edge_hits;
    ScoreAcc& operator+=(const ScoreAcc& o) {
        weak += o.weak;
        strong += o.strong;
        best = std::max(best, o.best);
        edge_hits += o.edge_hits;
        return *this;
    }
};

} // namespace

DecodeReport decode_and_score(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau,
                              std::uint64_t K, double nu, std::uint64_t repeats, std::uint64_t seed,
                              unsigned workers) {
    if (repeats == 0) throw ParameterError("repeats must be positive");
    if (inst.edges.empty()) throw ParameterError("instance has no edges");
    const Decoder dec(inst, hs, Q, tau, K);
    const ScoreAcc acc = parallel_chunks<ScoreAcc>(repeats, workers, [&](std::uint64_t b, std::uint64_t e) {
        ScoreAcc out;
        out.edge_hits.v.assign(inst.edges.size(), 0);
        for (std::uint64_t r = b; r < e; ++r) {
            Rng rng = Rng::stream(seed, r);
            const Labeling sigma = dec.draw(rng);
            const auto sat = edge_satisfaction(inst, sigma);
            std::uint64_t weak = 0, strong = 0;
            for (std::size_t i = 0; i < sat.size(); ++i) {
                weak += sat[i].weak;
                strong += sat[i].strong;
                out.edge_hits.v[i] += sat[i].weak;
            }
            const double wf = static_cast<double>(weak) / sat.size();
            out.weak.add(wf);
            out.strong.add(static_cast<double>(strong) / sat.size());
            out.best = std::max(out.best, wf);
        }
        return out;
    });
    DecodeReport rep;
    rep.repeats = repeats;
    rep.mean_weak = acc.weak.mean();
    rep.stderr_weak = repeats > 1 ? acc.weak.stderr_mean() : 0.0;
    rep.best_weak = acc.best;
    rep.mean_strong = acc.strong.value() / repeats;
    for (auto h : acc.edge_hits.v) rep.edge_weak_freq.push_back(static_cast<double>(h) / repeats);
    const double ell = static_cast<double>(hs.size());
    const double Kd = static_cast<double>(K);
    rep.bound = nu / 4.0 / (16.0 * ell * ell) * std::min(1.0 / (Kd * Kd), std::pow(tau, 4) / Kd);
    rep.bound_vacuous = rep.bound * inst.edges.size() < 1.0;
    return rep;
}

BaselineReport uniform_labeling_baseline(const Instance& inst, std::uint64_t samples, std::uint64_t seed,
                                         unsigned workers) {
    if (samples < 2) throw ParameterError("need at least two samples");
    if (inst.edges.empty()) throw ParameterError("instance has no edges");
    const Moments m = parallel_chunks<Moments>(samples, workers, [&](std::uint64_t b, std::uint64_t e) {
        Moments out;
        for (std::uint64_t r = b; r < e; ++r) {
            Rng rng = Rng::stream(seed, r);
            Labeling sigma(inst.num_vertices);
            for (auto& x : sigma) x = static_cast<std::uint32_t>(rng.below(inst.M));
            out.add(evaluate_labeling(inst, sigma).weak_frac);
        }
        return out;
    });
    return {samples, m.mean(), m.stderr_mean()};
}

} // namespace lcg
