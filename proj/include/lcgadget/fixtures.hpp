#pragma once

#include <cstdint>

#include "lcgadget/classify.hpp"
#include "lcgadget/labelcover.hpp"
#include "lcgadget/rng.hpp"

namespace lcg {

// Coefficient families used by the checks and the CLI.

// Weight on every slot of block sigma(v), both sides, for every vertex.
// theta = -1/2, so the halfspace fires when any such slot is set.
Halfspace dictator_halfspace(const Instance& inst, const Labeling& sigma, std::uint32_t Q, double weight = 1.0);

// Gaussian entries on the own-side blocks (X for e_X, Y for e_Y) of every
// vertex of one edge, scaled to total squared norm `sq_norm`; theta = 0.
Halfspace gaussian_edge_halfspace(const Instance& inst, std::uint32_t edge, std::uint32_t Q, double sq_norm,
                                  Rng& rng);

// Gaussian entries on every block of every vertex, both sides.
Halfspace gaussian_halfspace(const Instance& inst, std::uint32_t Q, Rng& rng);

// Own-side blocks of an edge with squared block norms ratio^rank, ranks a
// random permutation of the labels per vertex; theta = 0.
Halfspace geometric_edge_halfspace(const Instance& inst, std::uint32_t edge, std::uint32_t Q, double ratio,
                                   Rng& rng);

} // namespace lcg
