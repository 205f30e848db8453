#include "lcgadget/criticalindex.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lcgadget/error.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

namespace {

// a <= b up to a 1e-12 relative slack, so exact ties in the defining
// inequality are not lost to rounding in the suffix sums.
bool leq_tight(double a, double b) {
    return a <= b + 1e-12 * std::abs(b);
}

bool greater_mass(double a, double b) {
    return a > b + kMassTolerance * std::abs(b);
}

void check_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau must lie in (0,1)");
}

} // namespace

double BlockVector::sq_norm(std::uint32_t label) const {
    auto it = blocks.find(label);
    if (it == blocks.end()) return 0.0;
    CompensatedSum s;
    for (double x : it->second) s.add(x * x);
    return s.value();
}

std::vector<std::pair<std::uint32_t, double>> BlockVector::sq_norms() const {
    std::vector<std::pair<std::uint32_t, double>> out;
    for (const auto& [label, blk] : blocks) {
        CompensatedSum s;
        for (double x : blk) s.add(x * x);
        if (s.value() > 0.0) out.emplace_back(label, s.value());
    }
    return out;
}

double BlockVector::total_sq() const {
    CompensatedSum s;
    for (const auto& [label, sq] : sq_norms()) s.add(sq);
    return s.value();
}

BlockVector block_vector(const Halfspace& h, Side side, std::uint32_t vertex, std::uint32_t M, std::uint32_t Q) {
    BlockVector bv;
    bv.M = M;
    bv.Q = Q;
    auto it = std::lower_bound(h.coeffs.begin(), h.coeffs.end(), Coord{side, vertex, 0, 0},
                               [](const auto& cw, const Coord& x) { return cw.first < x; });
    for (; it != h.coeffs.end() && it->first.side == side && it->first.vertex == vertex; ++it) {
        const Coord& c = it->first;
        if (c.label >= M || c.slot >= Q) throw ParameterError("coefficient outside the label/slot range");
        auto& blk = bv.blocks[c.label];
        if (blk.empty()) blk.assign(Q, 0.0);
        blk[c.slot] = it->second;
    }
    return bv;
}

bool CriticalIndexReport::critical(std::uint32_t label) const {
    return std::binary_search(C_tau.begin(), C_tau.end(), label);
}

bool CriticalIndexReport::top(std::uint32_t label) const {
    return std::binary_search(C_tau_leK.begin(), C_tau_leK.end(), label);
}

CriticalIndexReport critical_index_sq(std::vector<std::pair<std::uint32_t, double>> sq, std::uint32_t M, double tau,
                                      std::uint64_t K) {
    check_tau(tau);
    if (K < 1) throw ParameterError("K must be >= 1");
    std::erase_if(sq, [](const auto& x) { return !(x.second > 0.0); });
    std::sort(sq.begin(), sq.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    CriticalIndexReport rep;
    const std::size_t n = sq.size();
    for (const auto& [label, s] : sq) {
        rep.order.push_back(label);
        rep.sq_norms.push_back(s);
    }
    // suffix[i] = sum_{i' >= i} (0-based), compensated.
    std::vector<double> suffix(n + 1, 0.0);
    {
        CompensatedSum acc;
        for (std::size_t i = n; i-- > 0;) {
            acc.add(rep.sq_norms[i]);
            suffix[i] = acc.value();
        }
    }
    std::size_t crit = n;  // number of critical blocks
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (leq_tight(rep.sq_norms[i], tau * suffix[i])) {
            crit = i;
            found = true;
            break;
        }
    }
    if (found || n < M) {
        rep.i_tau = crit + 1;
    } else {
        rep.i_tau = static_cast<std::uint64_t>(M) + 1;
    }
    rep.C_tau.assign(rep.order.begin(), rep.order.begin() + static_cast<std::ptrdiff_t>(crit));
    const std::size_t top = static_cast<std::size_t>(std::min<std::uint64_t>(K, crit));
    rep.C_tau_leK.assign(rep.order.begin(), rep.order.begin() + static_cast<std::ptrdiff_t>(top));
    std::sort(rep.C_tau.begin(), rep.C_tau.end());
    std::sort(rep.C_tau_leK.begin(), rep.C_tau_leK.end());
    rep.regular = rep.i_tau == 1;
    rep.residual_mass = suffix[crit];
    return rep;
}

CriticalIndexReport critical_index(const BlockVector& c, double tau, std::uint64_t K) {
    return critical_index_sq(c.sq_norms(), c.M, tau, K);
}

std::uint64_t critical_index_brute(const std::vector<std::pair<std::uint32_t, double>>& sq, std::uint32_t M,
                                   double tau) {
    // Full ordering over [M], zero blocks included.
    std::vector<std::pair<std::uint32_t, double>> all;
    for (std::uint32_t i = 0; i < M; ++i) all.emplace_back(i, 0.0);
    for (const auto& [label, s] : sq) all[label].second = s;
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (std::size_t i = 0; i < all.size(); ++i) {
        double suffix = 0.0;
        for (std::size_t j = all.size(); j-- > i;) suffix += all[j].second;
        if (leq_tight(all[i].second, tau * suffix)) return i + 1;
    }
    return static_cast<std::uint64_t>(M) + 1;
}

DecayCheck check_crit_decay(const std::vector<double>& s, std::uint64_t i_tau, double tau) {
    check_tau(tau);
    DecayCheck out;
    const std::uint64_t last = std::min<std::uint64_t>(i_tau, s.size());
    const double log_keep = std::log1p(-tau);
    for (std::uint64_t i2 = 2; i2 <= last; ++i2) {
        for (std::uint64_t i1 = 1; i1 < i2; ++i1) {
            const double bound = std::exp(static_cast<double>(i2 - i1) * log_keep) / tau * s[i1 - 1];
            if (s[i2 - 1] > bound * (1.0 + kMassTolerance)) {
                out.pass = false;
                out.i1 = i1;
                out.i2 = i2;
                return out;
            }
        }
    }
    return out;
}

DecayCheck check_crit_decay(const BlockVector& c, double tau) {
    const auto rep = critical_index(c, tau, 1);
    return check_crit_decay(rep.sq_norms, rep.i_tau, tau);
}

TruncationReport truncate_report(const Halfspace& h, const Instance& inst, std::uint32_t edge, std::uint32_t Q,
                                 double tau, std::uint64_t K) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    const Edge& ed = inst.edges[edge];
    std::set<Coord> zero;  // blocks to clear
    TruncationReport out;
    CompensatedSum removed;
    auto handle = [&](Side side, std::uint32_t v) {
        const BlockVector bv = block_vector(h, side, v, inst.M, Q);
        const auto rep = critical_index(bv, tau, K);
        for (auto label : rep.C_tau) {
            if (rep.top(label)) continue;
            const Coord blk{side, v, label, 0};
            zero.insert(blk);
            const double sq = bv.sq_norm(label);
            out.zeroed_blocks.emplace_back(blk, sq);
            removed.add(sq);
        }
    };
    for (auto v : ed.ex) handle(Side::X, v);
    for (auto v : ed.ey) handle(Side::Y, v);
    out.h.theta = h.theta;
    for (const auto& cw : h.coeffs) {
        if (!zero.count(block_of(cw.first))) out.h.coeffs.push_back(cw);
    }
    out.h.normalize();
    out.removed_mass = removed.value();
    return out;
}

Halfspace truncate(const Halfspace& h, const Instance& inst, std::uint32_t edge, std::uint32_t Q, double tau,
                   std::uint64_t K) {
    return truncate_report(h, inst, edge, Q, tau, K).h;
}

namespace {

// Residual blocks holding more than a 1/d^8 share of the residual mass.
void add_heavy(const BlockVector& bv, const CriticalIndexReport& rep, double d8, std::set<std::uint32_t>& out) {
    const double threshold = rep.residual_mass / d8;
    for (const auto& [label, sq] : bv.sq_norms()) {
        if (rep.critical(label)) continue;
        if (greater_mass(sq, threshold)) out.insert(label);
    }
}

} // namespace

IvLv compute_Iv_Lv(const std::vector<Halfspace>& hs, std::uint32_t vertex, std::uint32_t M, std::uint32_t Q,
                   double tau, std::uint64_t K, std::uint32_t d) {
    const double d8 = std::pow(static_cast<double>(d), 8);
    IvLv out;
    std::set<std::uint32_t> L;
    for (const auto& h : hs) {
        std::set<std::uint32_t> I;
        for (Side side : {Side::X, Side::Y}) {
            const BlockVector bv = block_vector(h, side, vertex, M, Q);
            const auto rep = critical_index(bv, tau, K);
            I.insert(rep.C_tau_leK.begin(), rep.C_tau_leK.end());
            add_heavy(bv, rep, d8, I);
        }
        const std::size_t cap = static_cast<std::size_t>(std::min<double>(2.0 * (static_cast<double>(K) + d8), 1e18));
        if (I.size() > cap) throw Error("|I_v| exceeds 2(K + d^8)");
        L.insert(I.begin(), I.end());
        out.I.emplace_back(I.begin(), I.end());
    }
    out.L.assign(L.begin(), L.end());
    return out;
}

NicenessReport niceness_check(const Instance& inst, std::uint32_t edge,
                              const std::vector<std::vector<std::uint32_t>>& L) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    const Edge& ed = inst.edges[edge];
    if (L.size() != ed.vids.size()) throw ParameterError("L must list one set per edge vertex");
    for (std::size_t pos = 0; pos < ed.vids.size(); ++pos) {
        std::map<std::uint32_t, std::uint32_t> seen;
        for (auto i : L[pos]) {
            if (i >= inst.M) throw ParameterError("label out of range");
            const std::uint32_t j = ed.proj[pos][i];
            auto [it, fresh] = seen.emplace(j, i);
            if (!fresh && it->second != i) {
                return NicenessReport{false, ed.vids[pos], std::min(it->second, i), std::max(it->second, i), j};
            }
        }
    }
    return {};
}

NicenessReport niceness_check(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs,
                              std::uint32_t Q, double tau, std::uint64_t K) {
    const Edge& ed = inst.edges.at(edge);
    std::vector<std::vector<std::uint32_t>> L;
    for (auto v : ed.vids) L.push_back(compute_Iv_Lv(hs, v, inst.M, Q, tau, K, inst.d).L);
    return niceness_check(inst, edge, L);
}

namespace {

struct SideInfo {
    CriticalIndexReport rep;
    std::map<std::uint32_t, double> sq;  // nonzero blocks
    std::set<std::uint32_t> top_proj;     // pi_v(C^{<=K})
};

struct VertexInfo {
    SideInfo side[2];
    std::set<std::uint32_t> B_proj;  // pi_v(B_{s,v})
};

} // namespace

StructuralReport structural_conditions(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs,
                                       std::uint32_t Q, double tau, std::uint64_t K) {
    if (edge >= inst.edges.size()) throw ParameterError("edge out of range");
    const Edge& ed = inst.edges[edge];
    const std::size_t n = ed.vids.size();
    const double tau4 = tau * tau * tau * tau;
    // info[s][pos]
    std::vector<std::vector<VertexInfo>> info(hs.size(), std::vector<VertexInfo>(n));
    for (std::size_t s = 0; s < hs.size(); ++s) {
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::uint32_t v = ed.vids[pos];
            VertexInfo& vi = info[s][pos];
            for (int side = 0; side < 2; ++side) {
                const BlockVector bv = block_vector(hs[s], static_cast<Side>(side), v, inst.M, Q);
                SideInfo& si = vi.side[side];
                si.rep = critical_index(bv, tau, K);
                for (const auto& [label, sq] : bv.sq_norms()) si.sq[label] = sq;
                for (auto i : si.rep.C_tau_leK) {
                    si.top_proj.insert(ed.proj[pos][i]);
                    vi.B_proj.insert(ed.proj[pos][i]);
                }
            }
        }
    }
    StructuralReport out;
    const auto ell = static_cast<std::uint32_t>(hs.size());
    for (std::size_t pu = 0; pu < n; ++pu) {
        for (std::size_t pv = 0; pv < n; ++pv) {
            if (pu == pv) continue;
            const std::uint32_t u = ed.vids[pu], v = ed.vids[pv];
            for (std::uint32_t r = 0; r < ell; ++r) {
                // Condition I, recorded once per unordered vertex pair.
                if (pu < pv) {
                    for (std::uint32_t p = 0; p < ell; ++p) {
                        for (auto j : info[r][pu].B_proj) {
                            if (info[p][pv].B_proj.count(j)) out.condition_I.push_back({u, v, r, p, j});
                        }
                    }
                }
                // Condition II.
                for (auto j : info[r][pu].B_proj) {
                    for (int side = 0; side < 2; ++side) {
                        const SideInfo& si = info[r][pv].side[side];
                        if (si.top_proj.count(j)) continue;
                        CompensatedSum mass;
                        for (auto i : ed.pre[pv][j]) {
                            if (si.rep.critical(i)) continue;
                            auto it = si.sq.find(i);
                            if (it != si.sq.end()) mass.add(it->second);
                        }
                        if (mass.value() > 0.0 && greater_mass(mass.value(), tau4 * si.rep.residual_mass)) {
                            out.condition_II.push_back({u, v, r, j, static_cast<Side>(side)});
                        }
                    }
                }
            }
        }
    }
    std::sort(out.condition_I.begin(), out.condition_I.end());
    std::sort(out.condition_II.begin(), out.condition_II.end());
    return out;
}

TopSets top_sets(const Instance& inst, std::uint32_t edge, const std::vector<Halfspace>& hs, std::uint32_t Q,
                 double tau, std::uint64_t K) {
    const Edge& ed = inst.edges.at(edge);
    TopSets out(ed.vids.size());
    for (std::size_t pos = 0; pos < ed.vids.size(); ++pos) {
        std::set<std::uint32_t> s;
        for (const auto& h : hs) {
            for (Side side : {Side::X, Side::Y}) {
                const auto rep = critical_index(block_vector(h, side, ed.vids[pos], inst.M, Q), tau, K);
                s.insert(rep.C_tau_leK.begin(), rep.C_tau_leK.end());
            }
        }
        out[pos].assign(s.begin(), s.end());
    }
    return out;
}

} // namespace lcg
