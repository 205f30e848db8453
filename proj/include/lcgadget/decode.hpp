#pragma once

#include <cstdint>
#include <vector>

#include "lcgadget/classify.hpp"
#include "lcgadget/labelcover.hpp"
#include "lcgadget/rng.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

// Per (halfspace, vertex) tables for the randomized labeling. Build once,
// then draw as many labelings as needed.
class Decoder {
public:
    Decoder(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau, std::uint64_t K);

    Labeling draw(Rng& rng) const;
    std::uint32_t draw_vertex(std::uint32_t v, Rng& rng) const;

private:
    struct Residual {
        std::vector<std::uint32_t> labels;
        std::vector<double> cumulative;  // running mass, last = total
    };
    struct Table {
        std::vector<std::uint32_t> top;  // C^{<=K}(c_X) u C^{<=K}(c_Y)
        Residual side[2];
    };
    std::uint32_t M_;
    std::uint32_t n_;
    std::size_t ell_;
    std::vector<Table> tables_;  // index s * n + v
};

Labeling randomized_labeling(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau,
                             std::uint64_t K, Rng& rng);

struct DecodeReport {
    std::uint64_t repeats = 0;
    double mean_weak = 0.0;
    double stderr_weak = 0.0;
    double best_weak = 0.0;
    double mean_strong = 0.0;
    std::vector<double> edge_weak_freq;  // per edge, over repeats
    double bound = 0.0;  // (nu/4)(1/(16 ell^2)) min(1/K^2, tau^4/K)
    // The bound promises fewer than one satisfied edge on this instance.
    bool bound_vacuous = false;
};

DecodeReport decode_and_score(const Instance& inst, const std::vector<Halfspace>& hs, std::uint32_t Q, double tau,
                              std::uint64_t K, double nu, std::uint64_t repeats, std::uint64_t seed,
                              unsigned workers = 1);

struct BaselineReport {
    std::uint64_t samples = 0;
    double mean_weak = 0.0;
    double stderr_weak = 0.0;
};

// Weak satisfaction of uniformly random labelings.
BaselineReport uniform_labeling_baseline(const Instance& inst, std::uint64_t samples, std::uint64_t seed,
                                         unsigned workers = 1);

} // namespace lcg
