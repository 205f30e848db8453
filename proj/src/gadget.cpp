#include "lcgadget/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gadget_internal.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/parallel.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

namespace detail {

std::uint64_t block_key(std::uint64_t key, const Coord& block) {
    const std::uint64_t hi = (static_cast<std::uint64_t>(block.side) << 32) | block.vertex;
    return mix_key(mix_key(key, hi), block.label);
}

void emit_noise(std::vector<Coord>& out, Coord block, std::uint32_t Q, std::uint64_t noise_key) {
    Rng g(block_key(noise_key, block));
    for (std::uint32_t base = 0; base < Q; base += 64) {
        std::uint64_t word = g.next();
        const std::uint32_t width = std::min<std::uint32_t>(64, Q - base);
        for (std::uint32_t q = 0; q < width; ++q) {
            if ((word >> q) & 1u) {
                block.slot = base + q;
                out.push_back(block);
            }
        }
    }
}

std::uint32_t indicator_slot(const BlockDraw& bd, const Coord& block, std::uint32_t Q) {
    for (const auto& [c, slot] : bd.pinned) {
        if (c == block) return slot;
    }
    Rng g(block_key(bd.indicator_key, block));
    return static_cast<std::uint32_t>(g.below(Q));
}

std::vector<std::uint32_t> thin(const std::vector<std::uint32_t>& from, double p, Rng& rng) {
    std::vector<std::uint32_t> out;
    for (auto v : from) {
        if (rng.bernoulli(p)) out.push_back(v);
    }
    return out;
}

std::vector<std::uint32_t> pick_subset(const std::vector<std::uint32_t>& from, std::uint32_t t, Rng& rng) {
    std::vector<std::uint32_t> out;
    out.reserve(t);
    for (auto pos : rng.subset(static_cast<std::uint32_t>(from.size()), t)) out.push_back(from[pos]);
    return out;
}

void finish(SamplePoint& p) {
    std::sort(p.bits.begin(), p.bits.end());
    p.bits.erase(std::unique(p.bits.begin(), p.bits.end()), p.bits.end());
}

} // namespace detail

using namespace detail;

bool SamplePoint::has(const Coord& c) const {
    return std::binary_search(bits.begin(), bits.end(), c);
}

double GadgetParams::gate_raw() const {
    return 1.0 / (zeta * (1.0 - zeta) * static_cast<double>(t));
}

double GadgetParams::gate() const {
    const double p = gate_raw();
    if (p <= 1.0) return p;
    if (gate_policy == GatePolicy::clamp) return 1.0;
    throw ParameterError("0-point acceptance probability 1/(zeta(1-zeta)t) = " + std::to_string(p) +
                         " exceeds 1 (zeta=" + std::to_string(zeta) + ", t=" + std::to_string(t) + ")");
}

void GadgetParams::validate() const {
    if (!(zeta > 0.0 && zeta < 1.0)) throw ParameterError("zeta must lie in (0,1)");
    if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("nu must lie in (0,1)");
    if (k == 0 || t == 0 || t > k) throw ParameterError("need 1 <= t <= k");
    if (Q == 0) throw ParameterError("Q must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau must lie in (0,1)");
    if (K == 0) throw ParameterError("K must be positive");
    if (ell == 0) throw ParameterError("ell must be positive");
}

GadgetParams derive_params(double zeta, double nu, std::uint32_t ell, std::uint32_t z) {
    if (!std::isfinite(zeta) || !(zeta > 0.0 && zeta < 0.5)) throw ParameterError("zeta must lie in (0, 1/2)");
    if (!std::isfinite(nu) || !(nu > 0.0 && nu < 0.5)) throw ParameterError("nu must lie in (0, 1/2)");
    if (ell < 1) throw ParameterError("ell must be >= 1");
    if (z < 1 || z > 15) throw ParameterError("z must lie in [1, 15]");
    GadgetParams p;
    p.zeta = zeta;
    p.nu = nu;
    p.ell = ell;
    p.z = z;
    p.d = 1u << (2 * z);
    const double x = zeta * (1.0 - zeta);
    auto k = static_cast<std::uint64_t>(std::ceil(10.0 / (x * x) - 1e-9));
    if (k % 2) ++k;
    p.k = static_cast<std::uint32_t>(k);
    p.t = std::max<std::uint32_t>(1, p.k / 4);
    p.Q = 16 * p.d * p.k;
    const double lnQ = std::log(static_cast<double>(p.Q));
    p.tau = 1.0 / ((10.0 * p.k * lnQ) * (10.0 * p.k * lnQ));
    p.K = static_cast<std::uint64_t>(std::ceil((20.0 / p.tau) * std::log(p.Q / p.tau)));
    const double ldk = std::log(static_cast<double>(p.d) * p.k);
    p.J = 1e3 * ell * ell * ldk * ldk * std::pow(static_cast<double>(p.d), 20) / (nu * x * x);
    p.faithful = true;
    return p;
}

// ---------------------------------------------------------------- basic I

SamplePoint materialize_basic(std::uint32_t M, std::uint32_t k, const Transcript& tr) {
    SamplePoint p;
    p.a = tr.a;
    Rng g(tr.key);
    const auto s = static_cast<std::uint32_t>(g.below(k));
    p.bits.reserve(2 * M);
    for (std::uint32_t i = 0; i < M; ++i) {
        if (tr.a == 1) {
            p.bits.push_back({Side::X, 0, i, 0});
            p.bits.push_back({Side::Y, s, i, 0});
        } else {
            const auto r = static_cast<std::uint32_t>(g.below(k));
            if (g.below(2) == 0) {
                p.bits.push_back({Side::X, 0, i, 0});
            } else {
                p.bits.push_back({Side::Y, r, i, 0});
            }
        }
    }
    finish(p);
    return p;
}

SamplePoint sample_basic_I(std::uint32_t M, std::uint32_t k, Rng& rng) {
    if (M == 0 || k == 0) throw ParameterError("basic test needs M, k >= 1");
    Transcript tr;
    tr.kind = TranscriptKind::basic;
    tr.a = static_cast<std::uint8_t>(rng.below(2));
    tr.key = rng.next();
    SamplePoint p = materialize_basic(M, k, tr);
    p.transcript = std::move(tr);
    return p;
}

// ------------------------------------------------------- simplified test

SamplePoint materialize_simplified(std::uint32_t m, std::uint32_t d, std::uint32_t k, std::uint32_t Q,
                                   const Transcript& tr) {
    if (tr.blocks.size() != m) throw FormatError("transcript block count does not match m");
    SamplePoint p;
    p.a = tr.a;
    std::vector<Coord> indicators;
    for (std::uint32_t j = 0; j < m; ++j) {
        const BlockDraw& bd = tr.blocks[j];
        indicators.clear();
        if (tr.a == 1) {
            for (std::uint32_t i = j * d; i < (j + 1) * d; ++i) {
                indicators.push_back({Side::X, bd.u_x, i, 0});
                indicators.push_back({Side::Y, bd.u_y, i, 0});
            }
        } else if (bd.gate) {
            const Side s = bd.b == 0 ? Side::X : Side::Y;
            for (std::uint32_t i = j * d; i < (j + 1) * d; ++i) indicators.push_back({s, bd.u_x, i, 0});
        }
        const Side noisy = bd.b == 0 ? Side::X : Side::Y;
        for (std::uint32_t r = 0; r < k; ++r) {
            if (std::binary_search(bd.S.begin(), bd.S.end(), r)) continue;
            for (std::uint32_t i = j * d; i < (j + 1) * d; ++i) {
                const Coord block{noisy, r, i, 0};
                // A later indicator assignment overwrites the noise block.
                if (std::find(indicators.begin(), indicators.end(), block) != indicators.end()) continue;
                emit_noise(p.bits, block, Q, bd.noise_key);
            }
        }
        for (const auto& block : indicators) {
            Coord c = block;
            c.slot = indicator_slot(bd, block, Q);
            p.bits.push_back(c);
        }
    }
    finish(p);
    return p;
}

SamplePoint sample_simplified_D(std::uint32_t m, std::uint32_t d, std::uint32_t k, std::uint32_t Q, Rng& rng) {
    if (k == 0 || k % 2 != 0) throw ParameterError("simplified test needs an even k");
    if (Q == 0 || m == 0 || d == 0) throw ParameterError("simplified test needs m, d, Q >= 1");
    Transcript tr;
    tr.kind = TranscriptKind::simplified;
    tr.a = static_cast<std::uint8_t>(rng.below(2));
    tr.blocks.resize(m);
    for (auto& bd : tr.blocks) {
        bd.b = static_cast<std::uint8_t>(rng.below(2));
        bd.S = rng.subset(k, k / 2);
        std::vector<std::uint32_t> outside;
        for (std::uint32_t r = 0; r < k; ++r) {
            if (!std::binary_search(bd.S.begin(), bd.S.end(), r)) outside.push_back(r);
        }
        bd.u_x = outside[rng.below(outside.size())];
        bd.u_y = outside[rng.below(outside.size())];
        if (tr.a == 0) bd.gate = rng.bernoulli(1.0 / k);
        bd.noise_key = rng.next();
        bd.indicator_key = rng.next();
    }
    SamplePoint p = materialize_simplified(m, d, k, Q, tr);
    p.transcript = std::move(tr);
    return p;
}

// -------------------------------------------------------------- D_global

SamplePoint materialize_global(const Instance& inst, std::uint32_t Q, const Transcript& tr) {
    if (tr.edge >= inst.edges.size()) throw FormatError("transcript edge out of range");
    if (tr.blocks.size() != inst.m) throw FormatError("transcript block count does not match m");
    const Edge& ed = inst.edges[tr.edge];
    SamplePoint p;
    p.a = tr.a;
    p.edge = tr.edge;
    auto indicators = [&](const BlockDraw& bd, Side side, std::uint32_t v, std::uint32_t j) {
        for (auto i : ed.preimage(v, j)) {
            const Coord block{side, v, i, 0};
            Coord c = block;
            c.slot = indicator_slot(bd, block, Q);
            p.bits.push_back(c);
        }
    };
    for (std::uint32_t j = 0; j < inst.m; ++j) {
        const BlockDraw& bd = tr.blocks[j];
        if (bd.b == 0) {
            for (auto v : ed.ex) {
                if (std::binary_search(bd.S.begin(), bd.S.end(), v)) continue;
                for (auto i : ed.preimage(v, j)) emit_noise(p.bits, {Side::X, v, i, 0}, Q, bd.noise_key);
            }
        } else {
            for (auto v : ed.ey) {
                if (std::binary_search(bd.Sp.begin(), bd.Sp.end(), v)) continue;
                for (auto i : ed.preimage(v, j)) emit_noise(p.bits, {Side::Y, v, i, 0}, Q, bd.noise_key);
            }
        }
        if (tr.a == 1) {
            indicators(bd, Side::X, bd.u_x, j);
            indicators(bd, Side::Y, bd.u_y, j);
        } else {
            for (auto v : bd.T) indicators(bd, Side::X, v, j);
            for (auto v : bd.Tp) indicators(bd, Side::Y, v, j);
        }
    }
    finish(p);
    return p;
}

SamplePoint sample_edge(const Instance& inst, std::uint32_t edge, const GadgetParams& params, Rng& rng, int a) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    if (params.t > inst.k) throw ParameterError("t exceeds k");
    const double gate = params.gate();
    const Edge& ed = inst.edges[edge];
    Transcript tr;
    tr.kind = TranscriptKind::global;
    tr.edge = edge;
    tr.a = static_cast<std::uint8_t>(a < 0 ? rng.below(2) : static_cast<std::uint64_t>(a));
    tr.blocks.resize(inst.m);
    for (auto& bd : tr.blocks) {
        bd.S = pick_subset(ed.ex, params.t, rng);
        bd.Sp = pick_subset(ed.ey, params.t, rng);
        bd.b = rng.bernoulli(params.zeta) ? 0 : 1;
        bd.noise_key = rng.next();
        bd.indicator_key = rng.next();
        if (tr.a == 1) {
            bd.u_x = bd.S[rng.below(bd.S.size())];
            bd.u_y = bd.Sp[rng.below(bd.Sp.size())];
        } else {
            bd.gate = rng.bernoulli(gate);
            if (bd.gate) {
                if (bd.b == 0) {
                    bd.T = thin(bd.S, 1.0 - params.zeta, rng);
                } else {
                    bd.Tp = thin(bd.Sp, params.zeta, rng);
                }
            }
        }
    }
    SamplePoint p = materialize_global(inst, params.Q, tr);
    p.transcript = std::move(tr);
    return p;
}

SamplePoint sample_global(const Instance& inst, const GadgetParams& params, Rng& rng) {
    if (inst.edges.empty()) throw ParameterError("instance has no edges");
    const auto e = static_cast<std::uint32_t>(rng.below(inst.edges.size()));
    return sample_edge(inst, e, params, rng);
}

// -------------------------------------------------------------- reports

namespace {

struct MarginalCounts {
    std::uint64_t n0 = 0, n1 = 0;
    std::vector<std::uint64_t> c0, c1;
    MarginalCounts& operator+=(const MarginalCounts& o) {
        n0 += o.n0;
        n1 += o.n1;
        if (c0.size() < o.c0.size()) {
            c0.resize(o.c0.size());
            c1.resize(o.c1.size());
        }
        for (std::size_t i = 0; i < o.c0.size(); ++i) {
            c0[i] += o.c0[i];
            c1[i] += o.c1[i];
        }
        return *this;
    }
};

} // namespace

MarginalReport marginal_report(const PointSampler& sampler, std::vector<Coord> coords, std::uint64_t n,
                               std::uint64_t seed, unsigned workers) {
    if (n == 0) throw ParameterError("marginal_report needs n >= 1");
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    const auto counts = parallel_chunks<MarginalCounts>(n, workers, [&](std::uint64_t b, std::uint64_t e) {
        MarginalCounts mc;
        mc.c0.assign(coords.size(), 0);
        mc.c1.assign(coords.size(), 0);
        for (std::uint64_t idx = b; idx < e; ++idx) {
            Rng rng = Rng::stream(seed, idx);
            const SamplePoint p = sampler(rng);
            auto& c = p.a ? mc.c1 : mc.c0;
            (p.a ? mc.n1 : mc.n0)++;
            for (const auto& bit : p.bits) {
                auto it = std::lower_bound(coords.begin(), coords.end(), bit);
                if (it != coords.end() && *it == bit) ++c[static_cast<std::size_t>(it - coords.begin())];
            }
        }
        return mc;
    });
    MarginalReport rep;
    rep.n0 = counts.n0;
    rep.n1 = counts.n1;
    const double n0 = static_cast<double>(counts.n0), n1 = static_cast<double>(counts.n1);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        CoordinateMarginal row;
        row.coord = coords[i];
        row.count0 = counts.c0.empty() ? 0 : counts.c0[i];
        row.count1 = counts.c1.empty() ? 0 : counts.c1[i];
        row.mean0 = n0 > 0 ? row.count0 / n0 : 0.0;
        row.mean1 = n1 > 0 ? row.count1 / n1 : 0.0;
        double var = 0.0;
        if (n0 > 0) var += row.mean0 * (1.0 - row.mean0) / n0;
        if (n1 > 0) var += row.mean1 * (1.0 - row.mean1) / n1;
        const double diff = row.mean1 - row.mean0;
        if (var > 0.0) {
            row.z = diff / std::sqrt(var);
        } else {
            row.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        }
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(row.z));
        rep.rows.push_back(row);
    }
    rep.bonferroni_threshold = normal_upper_quantile(0.05 / (2.0 * std::max<std::size_t>(1, coords.size())));
    return rep;
}

std::vector<Coord> edge_coordinates(const Instance& inst, std::uint32_t Q) {
    std::set<std::uint32_t> vertices;
    for (const auto& ed : inst.edges) vertices.insert(ed.vids.begin(), ed.vids.end());
    std::vector<Coord> out;
    out.reserve(vertices.size() * 2 * inst.M * Q);
    for (Side s : {Side::X, Side::Y}) {
        for (auto v : vertices) {
            for (std::uint32_t i = 0; i < inst.M; ++i) {
                for (std::uint32_t q = 0; q < Q; ++q) out.push_back({s, v, i, q});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool check_structure(const Instance& inst, const GadgetParams& params, const SamplePoint& p) {
    if (!p.transcript || p.edge >= inst.edges.size()) return false;
    const Edge& ed = inst.edges[p.edge];
    for (const auto& c : p.bits) {
        if (!ed.contains(c.vertex) || c.label >= inst.M || c.slot >= params.Q) return false;
    }
    // Collect the indicator blocks named by the transcript.
    const Transcript& tr = *p.transcript;
    std::vector<Coord> indicator_blocks;
    for (std::uint32_t j = 0; j < inst.m; ++j) {
        const BlockDraw& bd = tr.blocks[j];
        auto add = [&](Side s, std::uint32_t v) {
            for (auto i : ed.preimage(v, j)) indicator_blocks.push_back({s, v, i, 0});
        };
        if (tr.a == 1) {
            add(Side::X, bd.u_x);
            add(Side::Y, bd.u_y);
        } else {
            for (auto v : bd.T) add(Side::X, v);
            for (auto v : bd.Tp) add(Side::Y, v);
        }
    }
    std::sort(indicator_blocks.begin(), indicator_blocks.end());
    for (const auto& blk : indicator_blocks) {
        auto lo = std::lower_bound(p.bits.begin(), p.bits.end(), blk);
        std::size_t pop = 0;
        while (lo != p.bits.end() && block_of(*lo) == blk) {
            ++pop;
            ++lo;
        }
        if (pop != 1) return false;
    }
    return materialize_global(inst, params.Q, tr).bits == p.bits;
}

} // namespace lcg
