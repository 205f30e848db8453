#include "lcgadget/fixtures.hpp"

#include <cmath>
#include <numeric>

#include "lcgadget/error.hpp"

namespace lcg {

Halfspace dictator_halfspace(const Instance& inst, const Labeling& sigma, std::uint32_t Q, double weight) {
    if (sigma.size() != inst.num_vertices) throw ParameterError("labeling is not total");
    Halfspace h;
    for (std::uint32_t v = 0; v < inst.num_vertices; ++v) {
        for (Side side : {Side::X, Side::Y}) {
            for (std::uint32_t q = 0; q < Q; ++q) h.coeffs.emplace_back(Coord{side, v, sigma[v], q}, weight);
        }
    }
    h.theta = -0.5 * weight;
    h.normalize();
    return h;
}

namespace {

void own_side_blocks(const Instance& inst, std::uint32_t edge, auto&& fn) {
    const Edge& ed = inst.edges.at(edge);
    for (auto v : ed.vids) fn(ed.in_x(v) ? Side::X : Side::Y, v);
}

void rescale(Halfspace& h, double sq_norm) {
    double s = 0.0;
    for (const auto& cw : h.coeffs) s += cw.second * cw.second;
    if (s > 0.0) {
        const double f = std::sqrt(sq_norm / s);
        for (auto& cw : h.coeffs) cw.second *= f;
    }
}

} // namespace

Halfspace gaussian_edge_halfspace(const Instance& inst, std::uint32_t edge, std::uint32_t Q, double sq_norm,
                                  Rng& rng) {
    Halfspace h;
    own_side_blocks(inst, edge, [&](Side side, std::uint32_t v) {
        for (std::uint32_t i = 0; i < inst.M; ++i) {
            for (std::uint32_t q = 0; q < Q; ++q) h.coeffs.emplace_back(Coord{side, v, i, q}, rng.normal());
        }
    });
    rescale(h, sq_norm);
    h.normalize();
    return h;
}

Halfspace gaussian_halfspace(const Instance& inst, std::uint32_t Q, Rng& rng) {
    Halfspace h;
    for (Side side : {Side::X, Side::Y}) {
        for (std::uint32_t v = 0; v < inst.num_vertices; ++v) {
            for (std::uint32_t i = 0; i < inst.M; ++i) {
                for (std::uint32_t q = 0; q < Q; ++q) h.coeffs.emplace_back(Coord{side, v, i, q}, rng.normal());
            }
        }
    }
    h.normalize();
    return h;
}

Halfspace geometric_edge_halfspace(const Instance& inst, std::uint32_t edge, std::uint32_t Q, double ratio,
                                   Rng& rng) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("ratio must lie in (0,1)");
    Halfspace h;
    own_side_blocks(inst, edge, [&](Side side, std::uint32_t v) {
        std::vector<std::uint32_t> rank(inst.M);
        std::iota(rank.begin(), rank.end(), 0u);
        rng.shuffle(std::span<std::uint32_t>(rank));
        for (std::uint32_t i = 0; i < inst.M; ++i) {
            std::vector<double> blk(Q);
            double s = 0.0;
            for (auto& x : blk) {
                x = rng.normal();
                s += x * x;
            }
            const double f = std::sqrt(std::pow(ratio, rank[i]) / s);
            for (std::uint32_t q = 0; q < Q; ++q) h.coeffs.emplace_back(Coord{side, v, i, q}, blk[q] * f);
        }
    });
    h.normalize();
    return h;
}

} // namespace lcg
