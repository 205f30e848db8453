#include <algorithm>
#include <map>
#include <string>

#include "gadget_internal.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/gadget.hpp"

namespace lcg {

using namespace detail;

namespace {

struct TopOwner {
    std::uint32_t vertex = 0;
    std::uint32_t label = 0;
    bool x_side = true;
};

std::vector<std::uint32_t> without(const std::vector<std::uint32_t>& s, std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (auto x : s) {
        if (x != v) out.push_back(x);
    }
    return out;
}

std::vector<std::uint32_t> with(std::vector<std::uint32_t> s, std::uint32_t v) {
    s.push_back(v);
    std::sort(s.begin(), s.end());
    return s;
}

bool member(const std::vector<std::uint32_t>& s, std::uint32_t v) {
    return std::binary_search(s.begin(), s.end(), v);
}

} // namespace

// Stage 1 shares {S_j, S'_j}. For each j owned by a top label (v, i) with v in
// its own side's subset, the indicator state Z of block (v, i) is shared and
// b_j is drawn per class from its conditional law given Z through one shared
// uniform (a maximal coupling). Every other b_j is shared outright, and noise
// blocks are shared whenever the two classes agree on b_j. The remaining
// class-specific draws follow each class's conditional law, so each output
// has exactly the 0- or 1-restriction of the edge distribution.
std::pair<SamplePoint, SamplePoint> sample_paired(const Instance& inst, std::uint32_t edge,
                                                  const GadgetParams& params, const TopSets& top, Rng& rng) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    const Edge& ed = inst.edges[edge];
    if (top.size() != ed.vids.size()) throw ParameterError("top sets must be given for every vertex of the edge");
    if (!params.gate_valid()) {
        throw PreconditionError("coupling needs 1/(zeta(1-zeta)t) <= 1 for the class marginals to agree");
    }
    if (params.t > inst.k) throw ParameterError("t exceeds k");

    std::map<std::uint32_t, TopOwner> owner;
    for (std::size_t pos = 0; pos < ed.vids.size(); ++pos) {
        const std::uint32_t v = ed.vids[pos];
        std::map<std::uint32_t, std::uint32_t> seen;
        for (auto i : top[pos]) {
            if (i >= inst.M) throw ParameterError("top-set label out of range");
            const std::uint32_t j = ed.proj[pos][i];
            auto [it, fresh] = seen.emplace(j, i);
            if (!fresh && it->second != i) {
                throw PreconditionError("top labels " + std::to_string(it->second) + " and " + std::to_string(i) +
                                        " of vertex " + std::to_string(v) + " share projection " +
                                        std::to_string(j) + " (edge not nice)");
            }
            auto o = owner.find(j);
            if (o != owner.end() && o->second.vertex != v) {
                throw PreconditionError("top labels of vertices " + std::to_string(o->second.vertex) + " and " +
                                        std::to_string(v) + " both project to " + std::to_string(j));
            }
            owner[j] = TopOwner{v, i, ed.in_x(v)};
        }
    }

    const double zeta = params.zeta;
    const double p = params.gate();
    const double inv_t = 1.0 / params.t;

    Transcript t0, t1;
    t0.kind = t1.kind = TranscriptKind::global;
    t0.edge = t1.edge = edge;
    t0.a = 0;
    t1.a = 1;
    t0.blocks.resize(inst.m);
    t1.blocks.resize(inst.m);

    for (std::uint32_t j = 0; j < inst.m; ++j) {
        BlockDraw& d0 = t0.blocks[j];
        BlockDraw& d1 = t1.blocks[j];
        d0.S = d1.S = pick_subset(ed.ex, params.t, rng);
        d0.Sp = d1.Sp = pick_subset(ed.ey, params.t, rng);
        const std::vector<std::uint32_t>& S = d0.S;
        const std::vector<std::uint32_t>& Sp = d0.Sp;

        auto it = owner.find(j);
        const bool hat = it != owner.end() && member(it->second.x_side ? S : Sp, it->second.vertex);
        if (!hat) {
            d0.b = d1.b = rng.bernoulli(zeta) ? 0 : 1;
            d0.noise_key = d1.noise_key = rng.next();
            d0.indicator_key = rng.next();
            d1.indicator_key = rng.next();
            d1.u_x = S[rng.below(S.size())];
            d1.u_y = Sp[rng.below(Sp.size())];
            d0.gate = rng.bernoulli(p);
            if (d0.gate) {
                if (d0.b == 0) {
                    d0.T = thin(S, 1.0 - zeta, rng);
                } else {
                    d0.Tp = thin(Sp, zeta, rng);
                }
            }
            continue;
        }

        const TopOwner& top_owner = it->second;
        const std::uint32_t v = top_owner.vertex;
        const bool z = rng.bernoulli(inv_t);
        const double u = rng.uniform();
        d1.b = u < zeta ? 0 : 1;
        if (top_owner.x_side) {
            d0.b = z ? 0 : (u < (zeta - inv_t) / (1.0 - inv_t) ? 0 : 1);
        } else {
            d0.b = z ? 1 : (u < zeta / (1.0 - inv_t) ? 0 : 1);
        }
        if (d0.b == d1.b) {
            d0.noise_key = d1.noise_key = rng.next();
        } else {
            d0.noise_key = rng.next();
            d1.noise_key = rng.next();
        }
        d0.indicator_key = rng.next();
        d1.indicator_key = rng.next();
        if (z) {
            const Coord block{top_owner.x_side ? Side::X : Side::Y, v, top_owner.label, 0};
            const auto slot = static_cast<std::uint32_t>(rng.below(params.Q));
            d0.pinned.emplace_back(block, slot);
            d1.pinned.emplace_back(block, slot);
        }

        if (top_owner.x_side) {
            if (z) {
                d1.u_x = v;
            } else {
                const auto rest = without(S, v);
                d1.u_x = rest[rng.below(rest.size())];
            }
            d1.u_y = Sp[rng.below(Sp.size())];

            if (z) {
                d0.gate = true;
                d0.T = with(thin(without(S, v), 1.0 - zeta, rng), v);
            } else if (d0.b == 0) {
                d0.gate = rng.bernoulli(p * zeta / (1.0 - p * (1.0 - zeta)));
                if (d0.gate) d0.T = thin(without(S, v), 1.0 - zeta, rng);
            } else {
                d0.gate = rng.bernoulli(p);
                if (d0.gate) d0.Tp = thin(Sp, zeta, rng);
            }
        } else {
            if (z) {
                d1.u_y = v;
            } else {
                const auto rest = without(Sp, v);
                d1.u_y = rest[rng.below(rest.size())];
            }
            d1.u_x = S[rng.below(S.size())];

            if (z) {
                d0.gate = true;
                d0.Tp = with(thin(without(Sp, v), zeta, rng), v);
            } else if (d0.b == 1) {
                d0.gate = rng.bernoulli(p * (1.0 - zeta) / (1.0 - p * zeta));
                if (d0.gate) d0.Tp = thin(without(Sp, v), zeta, rng);
            } else {
                d0.gate = rng.bernoulli(p);
                if (d0.gate) d0.T = thin(S, 1.0 - zeta, rng);
            }
        }
    }

    SamplePoint p0 = materialize_global(inst, params.Q, t0);
    SamplePoint p1 = materialize_global(inst, params.Q, t1);
    p0.transcript = std::move(t0);
    p1.transcript = std::move(t1);
    return {std::move(p0), std::move(p1)};
}

} // namespace lcg
