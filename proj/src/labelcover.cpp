#include "lcgadget/labelcover.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lcgadget/error.hpp"

namespace lcg {

std::size_t Edge::position(std::uint32_t vid) const {
    for (std::size_t p = 0; p < vids.size(); ++p) {
        if (vids[p] == vid) return p;
    }
    throw PreconditionError("vertex " + std::to_string(vid) + " is not in the edge");
}

bool Edge::contains(std::uint32_t vid) const {
    return std::find(vids.begin(), vids.end(), vid) != vids.end();
}

bool Edge::in_x(std::uint32_t vid) const {
    return std::find(ex.begin(), ex.end(), vid) != ex.end();
}

void Instance::finalize() {
    if (k == 0 || M == 0 || m == 0 || d == 0) throw FormatError("instance: k, M, m, d must be positive");
    incident.assign(num_vertices, {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        Edge& ed = edges[e];
        const std::string where = "edge " + std::to_string(e) + ": ";
        if (ed.vids.size() != 2 * k) throw FormatError(where + "expected 2k vertices");
        if (ed.ex.size() != k || ed.ey.size() != k) throw FormatError(where + "e_X and e_Y must have k vertices each");
        std::vector<std::uint32_t> all = ed.vids;
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw FormatError(where + "repeated vertex");
        if (all.back() >= num_vertices) throw FormatError(where + "vertex id out of range");
        std::vector<std::uint32_t> parts = ed.ex;
        parts.insert(parts.end(), ed.ey.begin(), ed.ey.end());
        std::sort(parts.begin(), parts.end());
        if (parts != all) throw FormatError(where + "e_X/e_Y is not a partition of the edge");
        if (ed.proj.size() != ed.vids.size()) throw FormatError(where + "missing projections");

        ed.pre.assign(ed.vids.size(), std::vector<std::vector<std::uint32_t>>(m));
        for (std::size_t p = 0; p < ed.vids.size(); ++p) {
            if (ed.proj[p].size() != M) throw FormatError(where + "projection is not total on [M]");
            for (std::uint32_t i = 0; i < M; ++i) {
                const std::uint32_t j = ed.proj[p][i];
                if (j >= m) throw FormatError(where + "projection value outside [m]");
                ed.pre[p][j].push_back(i);
            }
            for (std::uint32_t j = 0; j < m; ++j) {
                if (ed.pre[p][j].size() > d) {
                    throw ParameterError(where + "preimage of " + std::to_string(j) + " exceeds d");
                }
            }
        }
        ed.ex_pos.clear();
        ed.ey_pos.clear();
        for (auto v : ed.ex) ed.ex_pos.push_back(static_cast<std::uint32_t>(ed.position(v)));
        for (auto v : ed.ey) ed.ey_pos.push_back(static_cast<std::uint32_t>(ed.position(v)));
        for (auto v : ed.vids) incident[v].push_back(static_cast<std::uint32_t>(e));
    }
}

std::uint32_t Instance::max_preimage() const {
    std::size_t best = 0;
    for (const auto& ed : edges) {
        for (const auto& per_vertex : ed.pre) {
            for (const auto& pre : per_vertex) best = std::max(best, pre.size());
        }
    }
    return static_cast<std::uint32_t>(best);
}

namespace {

void check_feasible(std::uint32_t num_vertices, std::uint32_t k, std::uint32_t M, std::uint32_t m, std::uint32_t d) {
    if (m < 1 || d < 1 || k < 1) throw ParameterError("need m >= 1, d >= 1, k >= 1");
    if (M < m) throw ParameterError("need M >= m");
    if (2ull * k > num_vertices) throw ParameterError("need 2k <= number of vertices");
    if (static_cast<std::uint64_t>(M) > static_cast<std::uint64_t>(d) * m) {
        throw ParameterError("M > d*m: no total projection respects the preimage bound d");
    }
}

// Random total projection [M] -> [m] with every preimage of size <= d. If
// `fixed_label` is set, it is sent to `fixed_target` first. The remaining
// labels are placed in random order, each on a uniformly chosen small label
// that still has spare capacity (equivalent to redrawing on overflow).
std::vector<std::uint32_t> random_projection(Rng& rng, std::uint32_t M, std::uint32_t m, std::uint32_t d,
                                             std::int64_t fixed_label, std::uint32_t fixed_target) {
    std::vector<std::uint32_t> proj(M, 0);
    std::vector<std::uint32_t> capacity(m, d);
    std::vector<std::uint32_t> open(m);
    std::iota(open.begin(), open.end(), 0u);
    auto take = [&](std::uint32_t j) {
        if (--capacity[j] == 0) open.erase(std::find(open.begin(), open.end(), j));
    };
    std::vector<std::uint32_t> order;
    order.reserve(M);
    for (std::uint32_t i = 0; i < M; ++i) {
        if (static_cast<std::int64_t>(i) != fixed_label) order.push_back(i);
    }
    if (fixed_label >= 0) {
        proj[static_cast<std::uint32_t>(fixed_label)] = fixed_target;
        take(fixed_target);
    }
    rng.shuffle(std::span<std::uint32_t>(order));
    for (auto i : order) {
        const std::uint32_t j = open[rng.below(open.size())];
        proj[i] = j;
        take(j);
    }
    return proj;
}

Instance build(std::uint32_t num_vertices, std::uint32_t num_edges, std::uint32_t k, std::uint32_t M,
               std::uint32_t m, std::uint32_t d, std::uint64_t seed, const Labeling* planted) {
    Rng rng(seed);
    Instance inst;
    inst.k = k;
    inst.M = M;
    inst.m = m;
    inst.d = d;
    inst.num_vertices = num_vertices;
    inst.edges.resize(num_edges);
    for (auto& ed : inst.edges) {
        std::vector<std::uint32_t> chosen = rng.subset(num_vertices, 2 * k);
        rng.shuffle(std::span<std::uint32_t>(chosen));
        ed.ex.assign(chosen.begin(), chosen.begin() + k);
        ed.ey.assign(chosen.begin() + k, chosen.end());
        std::sort(ed.ex.begin(), ed.ex.end());
        std::sort(ed.ey.begin(), ed.ey.end());
        std::sort(chosen.begin(), chosen.end());
        ed.vids = chosen;
        const std::uint32_t target = planted ? static_cast<std::uint32_t>(rng.below(m)) : 0;
        for (auto v : ed.vids) {
            const std::int64_t fixed = planted ? static_cast<std::int64_t>((*planted)[v]) : -1;
            ed.proj.push_back(random_projection(rng, M, m, d, fixed, target));
        }
    }
    inst.finalize();
    return inst;
}

} // namespace

Instance build_random_instance(std::uint32_t num_vertices, std::uint32_t num_edges, std::uint32_t k,
                               std::uint32_t M, std::uint32_t m, std::uint32_t d, std::uint64_t seed) {
    check_feasible(num_vertices, k, M, m, d);
    return build(num_vertices, num_edges, k, M, m, d, seed, nullptr);
}

std::pair<Instance, Labeling> build_planted_instance(std::uint32_t num_vertices, std::uint32_t num_edges,
                                                     std::uint32_t k, std::uint32_t M, std::uint32_t m,
                                                     std::uint32_t d, std::uint64_t seed) {
    check_feasible(num_vertices, k, M, m, d);
    Rng label_rng(mix_key(seed, 0x5157a7edULL));
    Labeling sigma(num_vertices);
    for (auto& s : sigma) s = static_cast<std::uint32_t>(label_rng.below(M));
    Instance inst = build(num_vertices, num_edges, k, M, m, d, seed, &sigma);
    return {std::move(inst), std::move(sigma)};
}

std::vector<EdgeSatisfaction> edge_satisfaction(const Instance& inst, const Labeling& sigma) {
    if (sigma.size() != inst.num_vertices) throw ParameterError("labeling is not total");
    std::vector<EdgeSatisfaction> out(inst.edges.size());
    std::vector<std::uint32_t> projected;
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const Edge& ed = inst.edges[e];
        projected.clear();
        for (std::size_t p = 0; p < ed.vids.size(); ++p) {
            const std::uint32_t label = sigma[ed.vids[p]];
            if (label >= inst.M) throw ParameterError("label out of range");
            projected.push_back(ed.proj[p][label]);
        }
        std::sort(projected.begin(), projected.end());
        out[e].strong = projected.front() == projected.back();
        out[e].weak = std::adjacent_find(projected.begin(), projected.end()) != projected.end();
    }
    return out;
}

LabelingScore evaluate_labeling(const Instance& inst, const Labeling& sigma) {
    const auto sat = edge_satisfaction(inst, sigma);
    LabelingScore s;
    if (sat.empty()) return s;
    std::size_t strong = 0, weak = 0;
    for (const auto& x : sat) {
        strong += x.strong;
        weak += x.weak;
    }
    s.strong_frac = static_cast<double>(strong) / static_cast<double>(sat.size());
    s.weak_frac = static_cast<double>(weak) / static_cast<double>(sat.size());
    return s;
}

SmoothnessReport check_smoothness(const Instance& inst, std::uint32_t vertex,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& label_pairs,
                                  Rng& rng, std::uint64_t samples) {
    if (vertex >= inst.num_vertices || inst.incident[vertex].empty()) {
        throw PreconditionError("vertex has no incident edge");
    }
    const auto& inc = inst.incident[vertex];
    std::vector<std::uint32_t> edges;
    if (samples == 0) {
        edges = inc;
    } else {
        edges.reserve(samples);
        for (std::uint64_t s = 0; s < samples; ++s) edges.push_back(inc[rng.below(inc.size())]);
    }
    SmoothnessReport rep;
    rep.edges_examined = edges.size();
    for (const auto& [i, j] : label_pairs) {
        if (i >= inst.M || j >= inst.M) throw ParameterError("label out of range");
        std::uint64_t hits = 0;
        for (auto e : edges) {
            const Edge& ed = inst.edges[e];
            if (ed.project(vertex, i) == ed.project(vertex, j)) ++hits;
        }
        const double r = static_cast<double>(hits) / static_cast<double>(edges.size());
        rep.rates.push_back(r);
        rep.max_rate = std::max(rep.max_rate, r);
    }
    return rep;
}

} // namespace lcg
