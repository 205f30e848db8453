#include "lcgadget/anticonc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lcgadget/error.hpp"
#include "lcgadget/parallel.hpp"
#include "lcgadget/rng.hpp"

namespace lcg {

namespace {

// Absolute slack for window membership, scaled to the problem's magnitudes.
double slack(const std::vector<double>& a, double theta, double radius) {
    double s = std::abs(theta) + std::abs(radius);
    for (double x : a) s += std::abs(x);
    return 1e-9 * std::max(1.0, s);
}

std::vector<double> subset_sums(const double* a, std::size_t n) {
    std::vector<double> sums{0.0};
    sums.reserve(std::size_t{1} << n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cur = sums.size();
        for (std::size_t s = 0; s < cur; ++s) sums.push_back(sums[s] + a[i]);
    }
    return sums;
}

void check_finite(const std::vector<double>& a, double theta, double radius) {
    for (double x : a) {
        if (!std::isfinite(x)) throw ParameterError("coefficients must be finite");
    }
    if (!std::isfinite(theta) || !std::isfinite(radius) || radius < 0.0) {
        throw ParameterError("theta must be finite and radius a finite non-negative number");
    }
}

} // namespace

double lo_exact(const std::vector<double>& a, double theta, double radius) {
    check_finite(a, theta, radius);
    if (a.size() > 30) throw ParameterError("lo_exact supports n <= 30; use Monte Carlo");
    const double eps = slack(a, theta, radius);
    const std::size_t h = a.size() / 2;
    const auto left = subset_sums(a.data(), h);
    auto right = subset_sums(a.data() + h, a.size() - h);
    std::sort(right.begin(), right.end());
    std::uint64_t hits = 0;
    for (double s : left) {
        const double lo = -radius - theta - s - eps;
        const double hi = radius - theta - s + eps;
        hits += static_cast<std::uint64_t>(std::upper_bound(right.begin(), right.end(), hi) -
                                           std::lower_bound(right.begin(), right.end(), lo));
    }
    return std::ldexp(static_cast<double>(hits), -static_cast<int>(a.size()));
}

double lo_brute(const std::vector<double>& a, double theta, double radius) {
    check_finite(a, theta, radius);
    if (a.size() > 24) throw ParameterError("lo_brute supports n <= 24");
    const double eps = slack(a, theta, radius);
    const std::uint64_t N = std::uint64_t{1} << a.size();
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < N; ++mask) {
        double s = theta;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (mask >> i & 1) s += a[i];
        }
        hits += std::abs(s) <= radius + eps;
    }
    return std::ldexp(static_cast<double>(hits), -static_cast<int>(a.size()));
}

double lo_exact_sup(const std::vector<double>& a, double radius) {
    check_finite(a, 0.0, radius);
    const double eps = slack(a, 0.0, radius);
    // value -> probability, merging values closer than eps.
    std::map<double, double> dist{{0.0, 1.0}};
    for (double x : a) {
        std::map<double, double> next;
        auto put = [&](double v, double p) {
            auto it = next.lower_bound(v - eps);
            if (it != next.end() && it->first <= v + eps) {
                it->second += p;
            } else {
                next.emplace(v, p);
            }
        };
        for (const auto& [v, p] : dist) {
            put(v, 0.5 * p);
            put(v + x, 0.5 * p);
        }
        dist = std::move(next);
        if (dist.size() > (1u << 22)) throw ParameterError("support too large for exact small-ball sup");
    }
    std::vector<std::pair<double, double>> atoms(dist.begin(), dist.end());
    double best = 0.0, window = 0.0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < atoms.size(); ++hi) {
        window += atoms[hi].second;
        while (atoms[hi].first - atoms[lo].first > 2.0 * radius + eps) window -= atoms[lo++].second;
        best = std::max(best, window);
    }
    return std::min(best, 1.0);
}

ScalingReport lo_scaling_check(const std::vector<std::uint64_t>& n_values) {
    if (n_values.size() < 2) throw ParameterError("need at least two n values");
    ScalingReport rep;
    rep.n_values = n_values;
    std::vector<double> lx, ly;
    for (auto n : n_values) {
        if (n == 0) throw ParameterError("n must be positive");
        // Heaviest 3-atom window sits at the centre.
        double best = 0.0;
        const std::uint64_t c = n / 2;
        for (std::uint64_t start = (c >= 2 ? c - 2 : 0); start <= c; ++start) {
            double w = 0.0;
            for (std::uint64_t s = start; s < start + 3 && s <= n; ++s) {
                w += std::exp(log_binomial(n, s) - static_cast<double>(n) * std::log(2.0));
            }
            best = std::max(best, w);
        }
        rep.probabilities.push_back(std::min(best, 1.0));
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(rep.probabilities.back()));
    }
    rep.slope = fit_slope(lx, ly);
    rep.pass = rep.slope >= -0.6 && rep.slope <= -0.4;
    return rep;
}

BlockLoReport block_lo_mc(const std::vector<std::vector<double>>& blocks, std::uint64_t trials, std::uint64_t seed,
                          unsigned workers, double z) {
    if (blocks.empty()) throw ParameterError("need T >= 1 blocks");
    if (trials < 4) throw ParameterError("need at least 4 trials");
    std::vector<double> norms;
    for (const auto& b : blocks) {
        double s = 0.0;
        for (double x : b) {
            if (!std::isfinite(x)) throw ParameterError("coefficients must be finite");
            s += x * x;
        }
        norms.push_back(std::sqrt(s));
    }
    for (std::size_t i = 1; i < norms.size(); ++i) {
        if (norms[i] > norms[i - 1] * (1.0 + 1e-12)) throw ParameterError("blocks must be sorted by descending norm");
    }
    BlockLoReport rep;
    rep.T = blocks.size();
    rep.radius = norms.back() / std::sqrt(static_cast<double>(rep.T));

    auto values = parallel_chunks<Collect<double>>(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
        Collect<double> out;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng = Rng::stream(seed, i);
            CompensatedSum s;
            for (const auto& blk : blocks) {
                std::uint64_t word = 0;
                for (std::size_t q = 0; q < blk.size(); ++q) {
                    if (q % 64 == 0) word = rng.next();
                    if (word >> (q % 64) & 1) s.add(blk[q]);
                }
            }
            out.v.push_back(s.value());
        }
        return out;
    }).v;

    const std::size_t half = values.size() / 2;
    std::vector<double> fit(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<double> held(values.begin() + static_cast<std::ptrdiff_t>(half), values.end());
    std::sort(fit.begin(), fit.end());
    const double r = rep.radius;
    const double eps = 1e-9 * std::max({1.0, std::abs(fit.front()), std::abs(fit.back())});

    auto count_in = [&](const std::vector<double>& sorted, double lo, double hi) {
        return static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), hi + eps) -
                                          std::lower_bound(sorted.begin(), sorted.end(), lo - eps));
    };
    const auto grid = static_cast<std::size_t>(std::max(2.0, std::ceil(4.0 * std::sqrt(static_cast<double>(trials)))));
    rep.grid_size = grid;
    // Window centre c means theta = -c. Candidates: windows starting at, or
    // centred on, each grid quantile.
    double best_c = fit.front() + r;
    std::uint64_t best = 0;
    for (std::size_t g = 0; g < grid; ++g) {
        const std::size_t idx = std::min(fit.size() - 1, g * (fit.size() - 1) / (grid - 1));
        const double q = fit[idx];
        for (double c : {q + r, q}) {
            const auto cnt = count_in(fit, c - r, c + r);
            if (cnt > best) {
                best = cnt;
                best_c = c;
            }
        }
    }
    rep.theta = -best_c;
    std::sort(held.begin(), held.end());
    rep.trials = held.size();
    rep.hits = count_in(held, best_c - r, best_c + r);
    rep.estimate = static_cast<double>(rep.hits) / rep.trials;
    rep.ci = wilson_interval(rep.hits, rep.trials, z);
    return rep;
}

BlockLoSlope block_lo_slope(const std::vector<std::uint64_t>& T_values, std::uint32_t Q, std::uint64_t trials,
                            std::uint64_t seed, unsigned workers) {
    if (Q == 0) throw ParameterError("Q must be positive");
    BlockLoSlope out;
    out.T_values = T_values;
    std::vector<double> lx, ly;
    for (std::size_t s = 0; s < T_values.size(); ++s) {
        std::vector<double> e1(Q, 0.0);
        e1[0] = 1.0;
        std::vector<std::vector<double>> blocks(T_values[s], e1);
        const auto rep = block_lo_mc(blocks, trials, mix_key(seed, s), workers);
        out.estimates.push_back(rep.estimate);
        lx.push_back(std::log(static_cast<double>(T_values[s])));
        ly.push_back(std::log(std::max(rep.estimate, 1e-300)));
    }
    out.slope = fit_slope(lx, ly);
    return out;
}

BerryEsseenReport berry_esseen_gap(const std::vector<Atoms>& vars, std::uint64_t mc_samples, std::uint64_t seed,
                                   std::size_t exact_limit, double alpha) {
    if (vars.empty()) throw ParameterError("need at least one variable");
    // Centre each variable and accumulate variance and third absolute moments.
    std::vector<Atoms> centred;
    double var = 0.0, third = 0.0;
    for (const auto& x : vars) {
        if (x.values.size() != x.probs.size() || x.values.empty()) throw ParameterError("malformed atom list");
        double mass = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            if (!(x.probs[i] >= 0.0)) throw ParameterError("negative probability");
            mass += x.probs[i];
            mean += x.probs[i] * x.values[i];
        }
        if (std::abs(mass - 1.0) > 1e-9) throw ParameterError("probabilities must sum to 1");
        Atoms c = x;
        for (auto& v : c.values) v -= mean;
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            var += c.probs[i] * c.values[i] * c.values[i];
            third += c.probs[i] * std::pow(std::abs(c.values[i]), 3);
        }
        centred.push_back(std::move(c));
    }
    if (!(var > 0.0)) throw ParameterError("zero total variance");
    const double sd = std::sqrt(var);
    BerryEsseenReport rep;
    rep.gamma = third / (var * sd);

    // Exact: distribution of the standardized sum.
    std::map<double, double> dist{{0.0, 1.0}};
    bool exact = true;
    for (const auto& x : centred) {
        std::map<double, double> next;
        for (const auto& [v, p] : dist) {
            for (std::size_t i = 0; i < x.values.size(); ++i) {
                if (x.probs[i] == 0.0) continue;
                // Round to a 1e-12 grid so that equal sums reached along
                // different paths land on one atom.
                const double key = std::round((v + x.values[i] / sd) * 1e12) / 1e12;
                next[key] += p * x.probs[i];
            }
        }
        dist = std::move(next);
        if (dist.size() > exact_limit) {
            exact = false;
            break;
        }
    }
    if (exact) {
        double F = 0.0, gap = 0.0;
        for (const auto& [v, p] : dist) {
            const double phi = normal_cdf(v);
            gap = std::max(gap, std::abs(F - phi));  // left limit
            F += p;
            gap = std::max(gap, std::abs(std::min(F, 1.0) - phi));
        }
        rep.gap = std::min(gap, 1.0);
        rep.exact = true;
        return rep;
    }

    rep.exact = false;
    std::vector<std::vector<double>> cdfs;
    for (const auto& x : centred) {
        std::vector<double> c;
        double s = 0.0;
        for (double p : x.probs) c.push_back(s += p);
        cdfs.push_back(std::move(c));
    }
    auto sums = parallel_chunks<Collect<double>>(mc_samples, 1, [&](std::uint64_t b, std::uint64_t e) {
        Collect<double> out;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng = Rng::stream(seed, i);
            double s = 0.0;
            for (std::size_t j = 0; j < centred.size(); ++j) {
                const double u = rng.uniform() * cdfs[j].back();
                const auto idx = static_cast<std::size_t>(std::upper_bound(cdfs[j].begin(), cdfs[j].end(), u) -
                                                          cdfs[j].begin());
                s += centred[j].values[std::min(idx, centred[j].values.size() - 1)];
            }
            out.v.push_back(s / sd);
        }
        return out;
    }).v;
    std::sort(sums.begin(), sums.end());
    const double n = static_cast<double>(sums.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const double phi = normal_cdf(sums[i]);
        gap = std::max({gap, std::abs(i / n - phi), std::abs((i + 1) / n - phi)});
    }
    rep.gap = std::min(gap, 1.0);
    rep.tolerance = std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
    return rep;
}

} // namespace lcg
