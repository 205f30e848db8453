#include "lcgadget/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "lcgadget/error.hpp"
#include "lcgadget/parallel.hpp"

namespace lcg {

namespace {

std::string describe(const StructuralReport& s) {
    if (!s.condition_I.empty()) {
        const auto& w = s.condition_I.front();
        return "Condition I holds: u=" + std::to_string(w.u) + " v=" + std::to_string(w.v) +
               " r=" + std::to_string(w.r) + " p=" + std::to_string(w.p) + " j=" + std::to_string(w.j);
    }
    const auto& w = s.condition_II.front();
    return "Condition II holds: u=" + std::to_string(w.u) + " v=" + std::to_string(w.v) + " r=" +
           std::to_string(w.r) + " j=" + std::to_string(w.j) + " side=" + (w.side == Side::X ? "X" : "Y");
}

void require_truncated(const Instance& inst, std::uint32_t edge, const GadgetParams& params, const Halfspace& h) {
    const Edge& ed = inst.edges[edge];
    for (auto v : ed.vids) {
        for (Side side : {Side::X, Side::Y}) {
            const auto rep = critical_index(block_vector(h, side, v, inst.M, params.Q), params.tau, params.K);
            if (rep.C_tau.size() != rep.C_tau_leK.size()) {
                throw PreconditionError("halfspace is not truncated at vertex " + std::to_string(v));
            }
        }
    }
}

void require_nice(const Instance& inst, std::uint32_t edge, const GadgetParams& params, const Halfspace& h) {
    const auto nice = niceness_check(inst, edge, std::vector<Halfspace>{h}, params.Q, params.tau, params.K);
    if (!nice.nice) {
        throw PreconditionError("edge is not nice: vertex " + std::to_string(nice.vertex) + " labels " +
                                std::to_string(nice.i1) + "," + std::to_string(nice.i2) + " share projection " +
                                std::to_string(nice.j));
    }
}

struct PairedSampler {
    const Instance& inst;
    std::uint32_t edge;
    const GadgetParams& params;
    TopSets top;

    std::pair<SamplePoint, SamplePoint> operator()(Rng& rng) const {
        return sample_paired(inst, edge, params, top, rng);
    }
};

} // namespace

std::vector<RegularPart> regular_parts(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                       const Halfspace& h) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    const Edge& ed = inst.edges[edge];
    const TopSets top = top_sets(inst, edge, {h}, params.Q, params.tau, params.K);
    std::set<std::uint32_t> P;
    for (std::size_t pos = 0; pos < ed.vids.size(); ++pos) {
        for (auto i : top[pos]) P.insert(ed.proj[pos][i]);
    }
    std::vector<RegularPart> out;
    for (std::size_t pos = 0; pos < ed.vids.size(); ++pos) {
        RegularPart rp;
        rp.vertex = ed.vids[pos];
        rp.side = ed.in_x(rp.vertex) ? Side::X : Side::Y;
        rp.mass_by_j.assign(inst.m, 0.0);
        const BlockVector bv = block_vector(h, rp.side, rp.vertex, inst.M, params.Q);
        CompensatedSum total;
        for (const auto& [label, sq] : bv.sq_norms()) {
            if (std::binary_search(top[pos].begin(), top[pos].end(), label)) continue;
            const std::uint32_t j = ed.proj[pos][label];
            if (P.count(j)) continue;
            rp.mass_by_j[j] += sq;
            total.add(sq);
        }
        rp.total = total.value();
        out.push_back(std::move(rp));
    }
    return out;
}

NoisyMassReport noisy_mass_concentration(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                         const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                         unsigned workers) {
    params.validate();
    if (trials == 0) throw ParameterError("trials must be positive");
    const auto parts = regular_parts(inst, edge, params, h);
    const Edge& ed = inst.edges[edge];
    const double zeta = params.zeta;

    using Counts = SumVector<std::uint64_t>;
    const Counts counts = parallel_chunks<Counts>(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
        Counts out;
        out.v.assign(parts.size(), 0);
        for (std::uint64_t n = b; n < e; ++n) {
            Rng rng = Rng::stream(seed, n);
            std::vector<CompensatedSum> noisy(parts.size());
            for (std::uint32_t j = 0; j < inst.m; ++j) {
                const auto S = rng.subset(inst.k, params.t);
                const auto Sp = rng.subset(inst.k, params.t);
                const std::uint8_t bj = rng.bernoulli(zeta) ? 0 : 1;
                for (std::size_t pos = 0; pos < parts.size(); ++pos) {
                    const RegularPart& rp = parts[pos];
                    if (rp.mass_by_j[j] == 0.0) continue;
                    const bool x = rp.side == Side::X;
                    if (bj != (x ? 0 : 1)) continue;
                    // Subsets are drawn over positions within e_X / e_Y.
                    const auto& half = x ? ed.ex : ed.ey;
                    const auto idx = static_cast<std::uint32_t>(
                        std::lower_bound(half.begin(), half.end(), rp.vertex) - half.begin());
                    const auto& sub = x ? S : Sp;
                    if (std::binary_search(sub.begin(), sub.end(), idx)) continue;
                    noisy[pos].add(rp.mass_by_j[j]);
                }
            }
            for (std::size_t pos = 0; pos < parts.size(); ++pos) {
                if (noisy[pos].value() < zeta / 8.0 * parts[pos].total) ++out.v[pos];
            }
        }
        return out;
    });

    NoisyMassReport rep;
    rep.trials = trials;
    const double keep = 1.0 - static_cast<double>(params.t) / inst.k;
    for (std::size_t pos = 0; pos < parts.size(); ++pos) {
        NoisyMassRow row;
        row.vertex = parts[pos].vertex;
        row.creg_sq = parts[pos].total;
        row.alpha = (parts[pos].side == Side::X ? zeta : 1.0 - zeta) * keep;
        row.shortfalls = counts.v.empty() ? 0 : counts.v[pos];
        row.frequency = static_cast<double>(row.shortfalls) / trials;
        row.ci = wilson_interval(row.shortfalls, trials);
        rep.max_frequency = std::max(rep.max_frequency, row.frequency);
        rep.rows.push_back(row);
    }
    rep.bound = std::exp(-zeta * zeta / (64.0 * params.tau));
    rep.bound_vacuous = rep.bound >= 1.0;
    return rep;
}

VarianceReport variance_diff_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                const Halfspace& h, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
    params.validate();
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    if (trials < 2) throw ParameterError("need at least two trials");
    require_truncated(inst, edge, params, h);
    require_nice(inst, edge, params, h);
    const PairedSampler sampler{inst, edge, params, top_sets(inst, edge, {h}, params.Q, params.tau, params.K)};

    const Moments mom = parallel_chunks<Moments>(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
        Moments out;
        for (std::uint64_t n = b; n < e; ++n) {
            Rng rng = Rng::stream(seed, n);
            const auto [p0, p1] = sampler(rng);
            out.add(h.value(p1) - h.value(p0));
        }
        return out;
    });

    VarianceReport rep;
    rep.trials = trials;
    rep.mean = mom.mean();
    rep.stderr_mean = mom.stderr_mean();
    rep.variance = mom.variance();
    rep.stderr_variance = mom.stderr_variance();
    rep.ci = {rep.variance - 1.959963984540054 * rep.stderr_variance,
              rep.variance + 1.959963984540054 * rep.stderr_variance};
    CompensatedSum creg;
    for (const auto& rp : regular_parts(inst, edge, params, h)) creg.add(rp.total);
    rep.creg_sq = creg.value();
    rep.bound = 2.0 * rep.creg_sq / std::sqrt(static_cast<double>(params.Q));
    rep.epsilon0 = params.tau * std::sqrt(params.zeta) * std::sqrt(rep.creg_sq) / 64.0;
    const double second = rep.variance + rep.mean * rep.mean;
    rep.chebyshev = rep.epsilon0 > 0.0 ? chebyshev_bound(second, rep.epsilon0) : 1.0;
    rep.bound_vacuous = rep.epsilon0 > 0.0 ? chebyshev_bound(rep.bound, rep.epsilon0) >= 1.0 : true;
    return rep;
}

DeviationReport pointwise_deviation_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                       const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                       unsigned workers) {
    params.validate();
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    if (trials == 0) throw ParameterError("trials must be positive");
    const auto cond = structural_conditions(inst, edge, {h}, params.Q, params.tau, params.K);
    if (cond.any()) throw PreconditionError(describe(cond));
    require_truncated(inst, edge, params, h);
    require_nice(inst, edge, params, h);
    const PairedSampler sampler{inst, edge, params, top_sets(inst, edge, {h}, params.Q, params.tau, params.K)};

    struct Count {
        std::uint64_t n = 0;
        Count& operator+=(const Count& o) {
            n += o.n;
            return *this;
        }
    };
    const Count c = parallel_chunks<Count>(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
        Count out;
        for (std::uint64_t n = b; n < e; ++n) {
            Rng rng = Rng::stream(seed, n);
            const auto [p0, p1] = sampler(rng);
            out.n += h.eval(p0) != h.eval(p1);
        }
        return out;
    });

    DeviationReport rep;
    rep.trials = trials;
    rep.disagreements = c.n;
    rep.estimate = static_cast<double>(c.n) / trials;
    rep.ci = wilson_interval(c.n, trials);
    const double tau = params.tau, zeta = params.zeta;
    rep.bound = kPointwiseTauConst * tau + 2.0 * inst.k * std::exp(-zeta * zeta / (64.0 * tau)) +
                kPointwiseQConst / (tau * tau * zeta * std::sqrt(static_cast<double>(params.Q)));
    rep.bound_vacuous = rep.bound > 1.0;
    return rep;
}

TruncationMcReport truncation_disagreement_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                              const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                              unsigned workers) {
    params.validate();
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    if (trials == 0) throw ParameterError("trials must be positive");
    require_nice(inst, edge, params, h);
    const auto tr = truncate_report(h, inst, edge, params.Q, params.tau, params.K);

    struct Count {
        std::uint64_t n = 0;
        Count& operator+=(const Count& o) {
            n += o.n;
            return *this;
        }
    };
    Count c;
    if (!tr.zeroed_blocks.empty()) {
        c = parallel_chunks<Count>(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
            Count out;
            for (std::uint64_t n = b; n < e; ++n) {
                Rng rng = Rng::stream(seed, n);
                const SamplePoint p = sample_edge(inst, edge, params, rng);
                out.n += h.eval(p) != tr.h.eval(p);
            }
            return out;
        });
    }

    TruncationMcReport rep;
    rep.trials = trials;
    rep.disagreements = c.n;
    rep.estimate = static_cast<double>(c.n) / trials;
    rep.ci = wilson_interval(c.n, trials);
    rep.bound = std::pow(params.tau, 0.25) / (4.0 * inst.k);
    rep.union_bound = std::pow(params.tau, 0.25) / 2.0;
    rep.bound_vacuous = rep.union_bound > 1.0;
    rep.zeroed_blocks = tr.zeroed_blocks.size();
    return rep;
}

} // namespace lcg
