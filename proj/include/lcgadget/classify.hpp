#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "lcgadget/gadget.hpp"
#include "lcgadget/labelcover.hpp"

namespace lcg {

inline int pos(double x) { return x >= 0.0 ? 1 : 0; }

// pos(<c, x> + theta) over sparse coordinates.
struct Halfspace {
    std::vector<std::pair<Coord, double>> coeffs;  // sorted by coord, unique
    double theta = 0.0;

    // Sorts, merges duplicate coordinates and drops zeros.
    void normalize();
    double coefficient(const Coord& c) const;
    double value(const SamplePoint& p) const;
    // Set by normalize() when every coefficient and theta are integers below
    // 2^62 in magnitude; value() then sums exactly in 128-bit integers.
    bool integral() const { return integral_; }
    int eval(const SamplePoint& p) const;

private:
    bool integral_ = false;
};

struct Literal {
    Coord coord;
    bool negated = false;
};

using Clause = std::vector<Literal>;

// AND of ORs.
struct Cnf {
    std::vector<Clause> clauses;
};

// OR of ANDs.
struct Dnf {
    std::vector<Clause> terms;
};

struct BooleanOfHalfspaces {
    std::vector<Halfspace> halfspaces;
    // Indexed by sum_s pos(h_s) << s.
    std::vector<std::uint8_t> table;
};

struct Constant {
    int value = 1;
};

using Classifier = std::variant<Constant, Cnf, Dnf, Halfspace, BooleanOfHalfspaces>;

int eval(const Cnf& f, const SamplePoint& p);
int eval(const Dnf& f, const SamplePoint& p);
int eval(const BooleanOfHalfspaces& f, const SamplePoint& p);
int eval(const Classifier& c, const SamplePoint& p);
std::uint32_t sign_pattern(const std::vector<Halfspace>& hs, const SamplePoint& p);

// Negation of a DNF as a CNF of negated literals.
Cnf negate(const Dnf& f);

struct CompletenessCnf {
    Cnf c1;    // single clause over X_{v, sigma(v), q}
    Cnf c2;    // single clause over Y_{v, sigma(v), q}
    Cnf both;  // c1 AND c2
};

CompletenessCnf build_completeness_cnf(const Instance& inst, const Labeling& sigma, std::uint32_t Q);

// sum_i X_i - 3M/4 over the basic test's X coordinates.
Halfspace moment_attack_halfspace(std::uint32_t M);

// L = sum_i 2^i X_i - sum_{r,i} 2^i Y_{r,i}; returns pos(L) AND pos(-L).
BooleanOfHalfspaces pathological_pair(std::uint32_t M, std::uint32_t k);

} // namespace lcg
