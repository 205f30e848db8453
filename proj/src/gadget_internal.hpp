#pragma once

#include <vector>

#include "lcgadget/gadget.hpp"

namespace lcg::detail {

std::uint64_t block_key(std::uint64_t key, const Coord& block);

// Appends the set bits of a uniform {0,1}^Q block.
void emit_noise(std::vector<Coord>& out, Coord block, std::uint32_t Q, std::uint64_t noise_key);

// Slot of an indicator block drawn uniformly from {e_1..e_Q}; honours pins.
std::uint32_t indicator_slot(const BlockDraw& bd, const Coord& block, std::uint32_t Q);

// Independent Bernoulli(p) thinning of a vertex list.
std::vector<std::uint32_t> thin(const std::vector<std::uint32_t>& from, double p, Rng& rng);

// Uniform t-subset of `from`, preserving its (sorted) order.
std::vector<std::uint32_t> pick_subset(const std::vector<std::uint32_t>& from, std::uint32_t t, Rng& rng);

void finish(SamplePoint& p);

} // namespace lcg::detail
