#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "lcgadget/classify.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/labelcover.hpp"

namespace lcg {

// Coefficients of one (side, vertex) organised as label -> length-Q block.
// Labels absent from `blocks` are zero blocks.
struct BlockVector {
    std::uint32_t M = 0;
    std::uint32_t Q = 1;
    std::map<std::uint32_t, std::vector<double>> blocks;

    double sq_norm(std::uint32_t label) const;
    std::vector<std::pair<std::uint32_t, double>> sq_norms() const;  // nonzero blocks only
    double total_sq() const;
};

BlockVector block_vector(const Halfspace& h, Side side, std::uint32_t vertex, std::uint32_t M, std::uint32_t Q);

struct CriticalIndexReport {
    // Nonzero blocks by descending norm, ties by ascending label; zero blocks
    // would follow in ascending label order.
    std::vector<std::uint32_t> order;
    std::vector<double> sq_norms;
    std::uint64_t i_tau = 1;  // 1-based; M+1 when every block is critical
    std::vector<std::uint32_t> C_tau;      // sorted
    std::vector<std::uint32_t> C_tau_leK;  // sorted
    bool regular = true;
    double residual_mass = 0.0;  // sum of squared norms outside C_tau

    bool critical(std::uint32_t label) const;
    bool top(std::uint32_t label) const;
};

CriticalIndexReport critical_index(const BlockVector& c, double tau, std::uint64_t K);
// Same computation from (label, squared norm) pairs over a universe of M labels.
CriticalIndexReport critical_index_sq(std::vector<std::pair<std::uint32_t, double>> sq, std::uint32_t M, double tau,
                                      std::uint64_t K);

// Reference implementation: tests the defining inequality at every i with a
// freshly summed suffix.
std::uint64_t critical_index_brute(const std::vector<std::pair<std::uint32_t, double>>& sq, std::uint32_t M,
                                   double tau);

struct DecayCheck {
    bool pass = true;
    std::uint64_t i1 = 0, i2 = 0;  // first violating pair (1-based)
};

// ||c_s(i2)||^2 <= (1/tau)(1-tau)^(i2-i1) ||c_s(i1)||^2 for 1 <= i1 < i2 <= i_tau.
DecayCheck check_crit_decay(const BlockVector& c, double tau);
DecayCheck check_crit_decay(const std::vector<double>& sorted_sq_norms, std::uint64_t i_tau, double tau);

struct TruncationReport {
    Halfspace h;
    std::vector<std::pair<Coord, double>> zeroed_blocks;  // block coord, its squared norm
    double removed_mass = 0.0;
};

TruncationReport truncate_report(const Halfspace& h, const Instance& inst, std::uint32_t edge, std::uint32_t Q,
                                 double tau, std::uint64_t K);
Halfspace truncate(const Halfspace& h, const Instance& inst, std::uint32_t edge, std::uint32_t Q, double tau,
                   std::uint64_t K);

struct IvLv {
    std::vector<std::vector<std::uint32_t>> I;  // one sorted set per halfspace
    std::vector<std::uint32_t> L;               // union
};

IvLv compute_Iv_Lv(const std::vector<Halfspace>& hs, std::uint32_t vertex, std::uint32_t M, std::uint32_t Q,
                   double tau, std::uint64_t K, std::uint32_t d);

struct NicenessReport {
    bool nice = true;
    std::uint32_t vertex = 0, i1 = 0, i2 = 0, j = 0;
};

// L indexed by position of the vertex in the edge.
NicenessReport niceness_check(const Instance& inst, std::uint32_t edge, const std::vector<std::vector<std::uint32_t>>& L);
NicenessReport niceness_check(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs,
                              std::uint32_t Q, double tau, std::uint64_t K);

struct ConditionIWitness {
    std::uint32_t u, v, r, p, j;
    auto operator<=>(const ConditionIWitness&) const = default;
};

struct ConditionIIWitness {
    std::uint32_t u, v, r, j;
    Side side;
    auto operator<=>(const ConditionIIWitness&) const = default;
};

struct StructuralReport {
    std::vector<ConditionIWitness> condition_I;    // all witnesses, sorted
    std::vector<ConditionIIWitness> condition_II;  // all witnesses, sorted
    bool any() const { return !condition_I.empty() || !condition_II.empty(); }
};

StructuralReport structural_conditions(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs,
                                       std::uint32_t Q, double tau, std::uint64_t K);

// Per edge position, the union over halfspaces of C^{<=K}(c_X,v) u C^{<=K}(c_Y,v).
TopSets top_sets(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs, std::uint32_t Q,
                 double tau, std::uint64_t K);

// Relative tolerance for mass-threshold comparisons; equality within it
// counts as "not greater".
inline constexpr double kMassTolerance = 1e-9;

} // namespace lcg
