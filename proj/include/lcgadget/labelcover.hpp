#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lcgadget/rng.hpp"

namespace lcg {

struct Edge {
    // All 2k vertex ids, in the order used to index `proj`.
    std::vector<std::uint32_t> vids;
    std::vector<std::uint32_t> ex;
    std::vector<std::uint32_t> ey;
    // proj[p][i] = pi_{e, vids[p]}(i), a small label in [m].
    std::vector<std::vector<std::uint32_t>> proj;

    // Filled by Instance::finalize().
    std::vector<std::uint32_t> ex_pos, ey_pos;
    // pre[p][j] = sorted big labels i with proj[p][i] == j.
    std::vector<std::vector<std::vector<std::uint32_t>>> pre;

    std::size_t position(std::uint32_t vid) const;
    bool contains(std::uint32_t vid) const;
    bool in_x(std::uint32_t vid) const;
    const std::vector<std::uint32_t>& preimage(std::uint32_t vid, std::uint32_t j) const {
        return pre[position(vid)][j];
    }
    std::uint32_t project(std::uint32_t vid, std::uint32_t label) const {
        return proj[position(vid)][label];
    }
};

// Smooth-2k-Label Cover instance. Immutable after finalize().
struct Instance {
    std::uint32_t k = 0;
    std::uint32_t M = 0;
    std::uint32_t m = 0;
    std::uint32_t d = 0;
    std::uint32_t num_vertices = 0;
    std::vector<Edge> edges;

    // Derived.
    std::vector<std::vector<std::uint32_t>> incident;

    // Validates the invariants (throws ParameterError / FormatError) and
    // builds the preimage tables and incidence lists.
    void finalize();
    std::uint32_t max_preimage() const;
};

using Labeling = std::vector<std::uint32_t>;

struct LabelingScore {
    double strong_frac = 0.0;
    double weak_frac = 0.0;
};

struct EdgeSatisfaction {
    bool strong = false;
    bool weak = false;
};

Instance build_random_instance(std::uint32_t num_vertices, std::uint32_t num_edges, std::uint32_t k,
                               std::uint32_t M, std::uint32_t m, std::uint32_t d, std::uint64_t seed);

std::pair<Instance, Labeling> build_planted_instance(std::uint32_t num_vertices, std::uint32_t num_edges,
                                                     std::uint32_t k, std::uint32_t M, std::uint32_t m,
                                                     std::uint32_t d, std::uint64_t seed);

std::vector<EdgeSatisfaction> edge_satisfaction(const Instance& inst, const Labeling& sigma);
LabelingScore evaluate_labeling(const Instance& inst, const Labeling& sigma);

struct SmoothnessReport {
    // One rate per supplied label pair.
    std::vector<double> rates;
    double max_rate = 0.0;
    std::uint64_t edges_examined = 0;
    bool smooth_for(double J) const { return max_rate <= 1.0 / J; }
};

// Collision rate of pi_{e,v}(i) == pi_{e,v}(j) over incident edges of v.
// samples == 0 enumerates every incident edge; otherwise that many incident
// edges are drawn uniformly with replacement (shared across pairs).
SmoothnessReport check_smoothness(const Instance& inst, std::uint32_t vertex,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& label_pairs,
                                  Rng& rng, std::uint64_t samples = 0);

} // namespace lcg
