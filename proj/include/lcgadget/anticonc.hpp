#pragma once

#include <cstdint>
#include <vector>

#include "lcgadget/stats.hpp"

namespace lcg {

// Pr[|sum_i a_i x_i + theta| <= radius] for i.i.d. uniform bits x_i, exactly.
// Meet-in-the-middle over the two halves; n <= 30.
double lo_exact(const std::vector<double>& a, double theta, double radius);
// Plain 2^n enumeration, n <= 24. Reference for lo_exact.
double lo_brute(const std::vector<double>& a, double theta, double radius);
// sup over theta of the same probability, via the exact distribution of the
// sum (values within a relative 1e-12 merged). Throws past ~4M atoms.
double lo_exact_sup(const std::vector<double>& a, double radius);

struct ScalingReport {
    std::vector<std::uint64_t> n_values;
    std::vector<double> probabilities;
    double slope = 0.0;
    bool pass = false;  // slope in [-0.6, -0.4]
};

// Unit coefficients, radius 1: the sup is the heaviest window of three
// consecutive binomial atoms. Evaluated exactly through log-binomials.
ScalingReport lo_scaling_check(const std::vector<std::uint64_t>& n_values);

struct BlockLoReport {
    std::uint64_t T = 0;
    std::uint64_t trials = 0;    // held-out half used for the estimate
    std::uint64_t hits = 0;
    double radius = 0.0;         // ||c_T|| / sqrt(T)
    double estimate = 0.0;
    Interval ci;
    double theta = 0.0;          // chosen shift
    std::uint64_t grid_size = 0;
};

// Estimates sup_theta Pr[|sum_i <c_i, X_i> + theta| <= ||c_T|| / sqrt(T)],
// X_i uniform on {0,1}^Q. theta is picked from a grid of empirical quantiles
// of the first half of the samples and the probability is estimated on the
// second half, so the estimate is unbiased for the chosen theta.
BlockLoReport block_lo_mc(const std::vector<std::vector<double>>& blocks, std::uint64_t trials, std::uint64_t seed,
                          unsigned workers = 1, double z = 1.959963984540054);

struct BlockLoSlope {
    std::vector<std::uint64_t> T_values;
    std::vector<double> estimates;
    double slope = 0.0;
};

// block_lo_mc on c_i = e_1 in {0,1}^Q for each T.
BlockLoSlope block_lo_slope(const std::vector<std::uint64_t>& T_values, std::uint32_t Q, std::uint64_t trials,
                            std::uint64_t seed, unsigned workers = 1);

// An independent discrete variable: values[i] with probability probs[i].
struct Atoms {
    std::vector<double> values;
    std::vector<double> probs;
};

struct BerryEsseenReport {
    double gap = 0.0;     // sup_x |F(x) - Phi(x)| of the standardized sum
    double gamma = 0.0;   // sum_i E|X_i - EX_i|^3 / sigma^3
    bool exact = true;
    double tolerance = 0.0;  // DKW slack when estimated by Monte Carlo
};

// Exact when the merged support stays below `exact_limit` atoms, otherwise
// Monte Carlo with `mc_samples` draws and a DKW tolerance at level alpha.
BerryEsseenReport berry_esseen_gap(const std::vector<Atoms>& vars, std::uint64_t mc_samples = 200000,
                                   std::uint64_t seed = 1, std::size_t exact_limit = 1u << 20,
                                   double alpha = 1e-3);

} // namespace lcg
