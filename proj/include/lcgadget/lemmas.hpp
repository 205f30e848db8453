#pragma once

#include <cstdint>
#include <vector>

#include "lcgadget/classify.hpp"
#include "lcgadget/criticalindex.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/labelcover.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

// Per-vertex noisy-mass view of one halfspace on one edge. For v in e_X the
// relevant blocks are c_{X,v}, for v in e_Y they are c_{Y,v}. c^reg_v keeps
// the blocks outside B_v whose projection avoids P, the projected top sets of
// every vertex of the edge.
struct RegularPart {
    std::uint32_t vertex = 0;
    Side side = Side::X;
    std::vector<double> mass_by_j;  // sum of ||c_{v,i}||^2 over the c^reg blocks in pi^{-1}(j)
    double total = 0.0;             // ||c^reg_v||^2
};

std::vector<RegularPart> regular_parts(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                       const Halfspace& h);

struct NoisyMassRow {
    std::uint32_t vertex = 0;
    double creg_sq = 0.0;
    double alpha = 0.0;  // Pr[b_j = beta_v and v outside its subset]
    std::uint64_t shortfalls = 0;
    double frequency = 0.0;
    Interval ci;
};

struct NoisyMassReport {
    std::uint64_t trials = 0;
    std::vector<NoisyMassRow> rows;
    double max_frequency = 0.0;
    double bound = 0.0;  // exp(-zeta^2 / (64 tau)) per vertex
    bool bound_vacuous = false;
};

// Shortfall: noisy squared mass strictly below (zeta/8) ||c^reg_v||^2.
NoisyMassReport noisy_mass_concentration(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                         const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                         unsigned workers = 1);

struct VarianceReport {
    std::uint64_t trials = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    double variance = 0.0;
    double stderr_variance = 0.0;
    Interval ci;  // 95% normal interval for the variance
    double creg_sq = 0.0;
    double bound = 0.0;  // 2 ||c^reg||^2 / sqrt(Q)
    double epsilon0 = 0.0;
    double chebyshev = 0.0;  // E[diff^2] / epsilon0^2 (estimated)
    bool bound_vacuous = false;
};

// Var of h(X^1, Y^1) - h(X^0, Y^0) under the pairing distribution. Requires
// C_tau = C_tau^{<=K} on every vertex of the edge and a nice edge.
VarianceReport variance_diff_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                const Halfspace& h, std::uint64_t trials, std::uint64_t seed, unsigned workers = 1);

struct DeviationReport {
    std::uint64_t trials = 0;
    std::uint64_t disagreements = 0;
    double estimate = 0.0;
    Interval ci;
    double bound = 0.0;
    bool bound_vacuous = false;
};

// Fitted constants of the composed pointwise bound
// c_tau * tau + 2k exp(-zeta^2/(64 tau)) + c_q / (tau^2 zeta sqrt(Q)).
inline constexpr double kPointwiseTauConst = 1.56;
inline constexpr double kPointwiseQConst = 8192.0;

DeviationReport pointwise_deviation_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                       const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                       unsigned workers = 1);

struct TruncationMcReport {
    std::uint64_t trials = 0;
    std::uint64_t disagreements = 0;
    double estimate = 0.0;
    Interval ci;
    double bound = 0.0;        // tau^{1/4} / (4k), per vertex
    double union_bound = 0.0;  // summed over the 2k vertices
    bool bound_vacuous = false;
    std::uint64_t zeroed_blocks = 0;
};

// E|pos(h) - pos(truncate(h))| under the edge distribution (uniform a).
TruncationMcReport truncation_disagreement_mc(const Instance& inst, std::uint32_t edge, const GadgetParams& params,
                                              const Halfspace& h, std::uint64_t trials, std::uint64_t seed,
                                              unsigned workers = 1);

} // namespace lcg
