#include "lcgadget/classify.hpp"

#include <algorithm>
#include <cmath>

#include "lcgadget/error.hpp"
#include "lcgadget/stats.hpp"

namespace lcg {

namespace {

constexpr double kIntLimit = 4611686018427387904.0;  // 2^62

bool is_small_int(double x) {
    return std::isfinite(x) && std::floor(x) == x && std::abs(x) < kIntLimit;
}

} // namespace

void Halfspace::normalize() {
    std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Coord, double>> merged;
    for (const auto& [c, w] : coeffs) {
        if (!std::isfinite(w)) throw ParameterError("halfspace coefficient is not finite");
        if (!merged.empty() && merged.back().first == c) {
            merged.back().second += w;
        } else {
            merged.emplace_back(c, w);
        }
    }
    coeffs.clear();
    for (const auto& cw : merged) {
        if (cw.second != 0.0) coeffs.push_back(cw);
    }
    if (!std::isfinite(theta)) throw ParameterError("halfspace threshold is not finite");
    integral_ = is_small_int(theta);
    for (const auto& cw : coeffs) integral_ = integral_ && is_small_int(cw.second);
}

double Halfspace::coefficient(const Coord& c) const {
    auto it = std::lower_bound(coeffs.begin(), coeffs.end(), c,
                               [](const auto& cw, const Coord& x) { return cw.first < x; });
    return (it != coeffs.end() && it->first == c) ? it->second : 0.0;
}

double Halfspace::value(const SamplePoint& p) const {
    // Merge-join of two sorted lists; binary-search the longer when lopsided.
    auto lookup = [&](auto&& visit) {
        if (coeffs.size() > 8 * p.bits.size()) {
            for (const auto& b : p.bits) {
                const double w = coefficient(b);
                if (w != 0.0) visit(w);
            }
            return;
        }
        auto it = coeffs.begin();
        for (const auto& b : p.bits) {
            while (it != coeffs.end() && it->first < b) ++it;
            if (it == coeffs.end()) break;
            if (it->first == b) visit(it->second);
        }
    };
    if (integral_) {
        __int128 acc = static_cast<__int128>(static_cast<long long>(theta));
        lookup([&](double w) { acc += static_cast<long long>(w); });
        if (acc == 0) return 0.0;
        return static_cast<double>(acc);
    }
    CompensatedSum s;
    s.add(theta);
    lookup([&](double w) { s.add(w); });
    return s.value();
}

int Halfspace::eval(const SamplePoint& p) const {
    return pos(value(p));
}

namespace {

bool literal_value(const Literal& l, const SamplePoint& p) {
    return p.has(l.coord) != l.negated;
}

} // namespace

int eval(const Cnf& f, const SamplePoint& p) {
    for (const auto& clause : f.clauses) {
        bool any = false;
        for (const auto& l : clause) {
            if (literal_value(l, p)) {
                any = true;
                break;
            }
        }
        if (!any) return 0;
    }
    return 1;
}

int eval(const Dnf& f, const SamplePoint& p) {
    for (const auto& term : f.terms) {
        bool all = true;
        for (const auto& l : term) {
            if (!literal_value(l, p)) {
                all = false;
                break;
            }
        }
        if (all) return 1;
    }
    return 0;
}

std::uint32_t sign_pattern(const std::vector<Halfspace>& hs, const SamplePoint& p) {
    std::uint32_t pattern = 0;
    for (std::size_t s = 0; s < hs.size(); ++s) pattern |= static_cast<std::uint32_t>(hs[s].eval(p)) << s;
    return pattern;
}

int eval(const BooleanOfHalfspaces& f, const SamplePoint& p) {
    if (f.table.size() != (std::size_t{1} << f.halfspaces.size())) {
        throw ParameterError("truth table must have 2^ell entries");
    }
    return f.table[sign_pattern(f.halfspaces, p)] ? 1 : 0;
}

int eval(const Classifier& c, const SamplePoint& p) {
    return std::visit(
        [&](const auto& f) -> int {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return f.value ? 1 : 0;
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                return f.eval(p);
            } else {
                return eval(f, p);
            }
        },
        c);
}

Cnf negate(const Dnf& f) {
    Cnf out;
    for (const auto& term : f.terms) {
        Clause c;
        for (const auto& l : term) c.push_back({l.coord, !l.negated});
        out.clauses.push_back(std::move(c));
    }
    return out;
}

CompletenessCnf build_completeness_cnf(const Instance& inst, const Labeling& sigma, std::uint32_t Q) {
    if (sigma.size() != inst.num_vertices) throw ParameterError("labeling is not total");
    Clause cx, cy;
    for (std::uint32_t v = 0; v < inst.num_vertices; ++v) {
        if (sigma[v] >= inst.M) throw ParameterError("label out of range");
        for (std::uint32_t q = 0; q < Q; ++q) {
            cx.push_back({{Side::X, v, sigma[v], q}, false});
            cy.push_back({{Side::Y, v, sigma[v], q}, false});
        }
    }
    CompletenessCnf out;
    out.c1.clauses = {cx};
    out.c2.clauses = {cy};
    out.both.clauses = {cx, cy};
    return out;
}

Halfspace moment_attack_halfspace(std::uint32_t M) {
    if (M == 0) throw ParameterError("M must be positive");
    Halfspace h;
    for (std::uint32_t i = 0; i < M; ++i) h.coeffs.emplace_back(Coord{Side::X, 0, i, 0}, 1.0);
    h.theta = -0.75 * M;
    h.normalize();
    return h;
}

BooleanOfHalfspaces pathological_pair(std::uint32_t M, std::uint32_t k) {
    if (M == 0 || k == 0) throw ParameterError("M, k must be positive");
    if (M > 50) throw ParameterError("pathological pair needs M <= 50 for exact integer arithmetic");
    Halfspace plus, minus;
    for (std::uint32_t i = 0; i < M; ++i) {
        const double w = std::ldexp(1.0, static_cast<int>(i));
        plus.coeffs.emplace_back(Coord{Side::X, 0, i, 0}, w);
        minus.coeffs.emplace_back(Coord{Side::X, 0, i, 0}, -w);
        for (std::uint32_t r = 0; r < k; ++r) {
            plus.coeffs.emplace_back(Coord{Side::Y, r, i, 0}, -w);
            minus.coeffs.emplace_back(Coord{Side::Y, r, i, 0}, w);
        }
    }
    plus.normalize();
    minus.normalize();
    BooleanOfHalfspaces f;
    f.halfspaces = {plus, minus};
    f.table = {0, 0, 0, 1};
    return f;
}

} // namespace lcg
