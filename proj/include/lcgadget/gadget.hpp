#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "lcgadget/labelcover.hpp"
#include "lcgadget/rng.hpp"

namespace lcg {

enum class Side : std::uint8_t { X = 0, Y = 1 };

// One boolean coordinate (side, vertex, big label, slot).
struct Coord {
    Side side = Side::X;
    std::uint32_t vertex = 0;
    std::uint32_t label = 0;
    std::uint32_t slot = 0;
    auto operator<=>(const Coord&) const = default;
};

// The (side, vertex, label) block a coordinate belongs to.
inline Coord block_of(Coord c) {
    c.slot = 0;
    return c;
}

enum class GatePolicy { strict, clamp };

struct GadgetParams {
    double zeta = 0.25;
    double nu = 0.1;
    std::uint32_t ell = 1;
    std::uint32_t z = 1;
    std::uint32_t d = 4;
    std::uint32_t k = 2;
    std::uint32_t t = 1;
    std::uint32_t Q = 1;
    double tau = 0.1;
    std::uint64_t K = 1;
    double J = 1.0;
    bool faithful = false;
    GatePolicy gate_policy = GatePolicy::strict;

    // 1/(zeta(1-zeta)t), the 0-point acceptance probability before clamping.
    double gate_raw() const;
    bool gate_valid() const { return gate_raw() <= 1.0; }
    // Gate actually used by the samplers; throws under the strict policy when
    // the raw gate exceeds 1.
    double gate() const;
    bool gate_clamped() const { return !gate_valid() && gate_policy == GatePolicy::clamp; }
    void validate() const;
};

GadgetParams derive_params(double zeta, double nu, std::uint32_t ell, std::uint32_t z);

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Internal draws for one small label j (or block j of the simplified test).
// For the simplified test, S holds positions in [k], u_x/u_y hold r/r', and
// gate holds the step-5 acceptance coin.
struct BlockDraw {
    std::uint8_t b = 0;
    std::vector<std::uint32_t> S, Sp;
    std::uint32_t u_x = kNone, u_y = kNone;
    bool gate = false;
    std::vector<std::uint32_t> T, Tp;
    std::uint64_t noise_key = 0;
    std::uint64_t indicator_key = 0;
    // Indicator blocks whose slot is fixed (shared by the coupling).
    std::vector<std::pair<Coord, std::uint32_t>> pinned;
};

enum class TranscriptKind : std::uint8_t { basic, simplified, global };

struct Transcript {
    TranscriptKind kind = TranscriptKind::global;
    std::uint8_t a = 0;
    std::uint32_t edge = 0;
    std::uint64_t key = 0;
    std::vector<BlockDraw> blocks;
};

struct SamplePoint {
    std::uint8_t a = 0;
    std::uint32_t edge = 0;
    std::vector<Coord> bits;  // sorted, unique
    std::optional<Transcript> transcript;

    bool has(const Coord& c) const;
};

// Distribution I: X_i -> (X, 0, i, 0), Y_{r,i} -> (Y, r, i, 0).
SamplePoint sample_basic_I(std::uint32_t M, std::uint32_t k, Rng& rng);
SamplePoint materialize_basic(std::uint32_t M, std::uint32_t k, const Transcript& tr);

// Simplified blocked test: X_{r,i,q} -> (X, r, i, q), block B_j = [j d, (j+1) d).
SamplePoint sample_simplified_D(std::uint32_t m, std::uint32_t d, std::uint32_t k, std::uint32_t Q, Rng& rng);
SamplePoint materialize_simplified(std::uint32_t m, std::uint32_t d, std::uint32_t k, std::uint32_t Q,
                                   const Transcript& tr);

// D_global. sample_edge restricts to one edge; a = -1 draws the label.
SamplePoint sample_global(const Instance& inst, const GadgetParams& params, Rng& rng);
SamplePoint sample_edge(const Instance& inst, std::uint32_t edge, const GadgetParams& params, Rng& rng, int a = -1);
SamplePoint materialize_global(const Instance& inst, std::uint32_t Q, const Transcript& tr);

// Per-vertex top label sets for the coupling, indexed by position in the edge.
using TopSets = std::vector<std::vector<std::uint32_t>>;

// Coupled pair (0-point, 1-point) of the pairing distribution for one edge.
std::pair<SamplePoint, SamplePoint> sample_paired(const Instance& inst, std::uint32_t edge,
                                                  const GadgetParams& params, const TopSets& top, Rng& rng);

// Point sampler for Monte Carlo loops; index i uses Rng::stream(seed, i).
using PointSampler = std::function<SamplePoint(Rng&)>;

struct CoordinateMarginal {
    Coord coord;
    std::uint64_t count0 = 0, count1 = 0;
    double mean0 = 0.0, mean1 = 0.0;
    double z = 0.0;
};

struct MarginalReport {
    std::uint64_t n0 = 0, n1 = 0;
    std::vector<CoordinateMarginal> rows;
    double max_abs_z = 0.0;
    // Two-sided normal threshold at family-wise level 0.05 over all rows.
    double bonferroni_threshold = 0.0;
};

MarginalReport marginal_report(const PointSampler& sampler, std::vector<Coord> coords, std::uint64_t n,
                               std::uint64_t seed, unsigned workers = 1);

// Every coordinate of every vertex of every edge (both sides, all labels/slots).
std::vector<Coord> edge_coordinates(const Instance& inst, std::uint32_t Q);

// Structural check on a D_global point: indicator blocks have popcount one and
// all bits sit on the point's edge. Returns false on violation.
bool check_structure(const Instance& inst, const GadgetParams& params, const SamplePoint& p);

} // namespace lcg
