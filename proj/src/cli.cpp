#include "lcgadget/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "lcgadget/anticonc.hpp"
#include "lcgadget/classify.hpp"
#include "lcgadget/criticalindex.hpp"
#include "lcgadget/decode.hpp"
#include "lcgadget/error.hpp"
#include "lcgadget/fixtures.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/io.hpp"
#include "lcgadget/lemmas.hpp"
#include "lcgadget/probe.hpp"

#ifndef LCG_GIT_DESCRIBE
#define LCG_GIT_DESCRIBE "unknown"
#endif

namespace lcg {

namespace {

struct Outcome {
    json results = json::object();
    bool pass = true;
    json params = nullptr;
    bool faithful = false;
};

struct Command {
    std::string name;
    std::string help;
    json defaults;
    // Keys naming files the command writes; replay redirects them.
    std::vector<std::string> outputs;
    std::function<Outcome(const json&)> fn;
};

// ---- config helpers -------------------------------------------------------

template <class T>
T cfg_get(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) throw ParameterError("missing option --" + key);
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParameterError("bad value for --" + key + ": " + cfg.at(key).dump());
    }
}

std::optional<std::string> cfg_path(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
    return cfg_get<std::string>(cfg, key);
}

std::uint64_t seed_of(const json& cfg) { return cfg_get<std::uint64_t>(cfg, "seed"); }
unsigned workers_of(const json& cfg) { return cfg_get<unsigned>(cfg, "workers"); }

// Flag text -> JSON value: numbers, booleans, arrays and null parse as JSON,
// anything else is kept as a string.
json parse_flag_value(const std::string& s) {
    try {
        return json::parse(s);
    } catch (const json::exception&) {
        return s;
    }
}

json merge(json base, const json& over) {
    for (const auto& [k, v] : over.items()) base[k] = v;
    return base;
}

const json kCommon = {{"seed", 1}, {"workers", 1}, {"report", nullptr}, {"csv", nullptr}};

const json kInstanceKeys = {{"instance", nullptr}, {"labeling", nullptr}, {"vertices", 16}, {"edges", 8},
                            {"k", 2},              {"M", 8},              {"m", 4},          {"d", 2},
                            {"instance_seed", 7},  {"planted", true}};

// Null means "take from --params or the built-in override".
const json kParamKeys = {{"params", nullptr}, {"zeta", nullptr}, {"nu", nullptr}, {"ell", nullptr},
                         {"t", nullptr},      {"Q", nullptr},    {"tau", nullptr}, {"K", nullptr},
                         {"gate", nullptr}};

struct Bundle {
    Instance inst;
    std::optional<Labeling> sigma;
};

Bundle load_instance(const json& cfg) {
    Bundle b;
    if (auto path = cfg_path(cfg, "instance")) {
        b.inst = instance_from_json(read_json_file(*path));
        if (auto lp = cfg_path(cfg, "labeling")) b.sigma = labeling_from_json(read_json_file(*lp), b.inst.num_vertices);
        return b;
    }
    const auto V = cfg_get<std::uint32_t>(cfg, "vertices");
    const auto E = cfg_get<std::uint32_t>(cfg, "edges");
    const auto k = cfg_get<std::uint32_t>(cfg, "k");
    const auto M = cfg_get<std::uint32_t>(cfg, "M");
    const auto m = cfg_get<std::uint32_t>(cfg, "m");
    const auto d = cfg_get<std::uint32_t>(cfg, "d");
    const auto s = cfg_get<std::uint64_t>(cfg, "instance_seed");
    if (cfg_get<bool>(cfg, "planted")) {
        auto [inst, sigma] = build_planted_instance(V, E, k, M, m, d, s);
        b.inst = std::move(inst);
        b.sigma = std::move(sigma);
    } else {
        b.inst = build_random_instance(V, E, k, M, m, d, s);
    }
    return b;
}

GadgetParams load_params(const json& cfg, const Instance& inst) {
    GadgetParams p;
    p.zeta = 0.25;
    p.nu = 0.1;
    p.ell = 1;
    p.z = 1;
    p.t = 1;
    p.Q = 8;
    p.tau = 0.1;
    p.K = 2;
    p.J = 1.0;
    p.gate_policy = GatePolicy::clamp;
    if (auto path = cfg_path(cfg, "params")) p = params_from_json(read_json_file(*path), p);
    json over = json::object();
    for (const char* key : {"zeta", "nu", "ell", "t", "Q", "tau", "K", "gate"}) {
        if (cfg.contains(key) && !cfg.at(key).is_null()) over[key] = cfg.at(key);
    }
    p = params_from_json(over, p);
    p.k = inst.k;
    p.d = inst.d;
    p.faithful = false;
    p.validate();
    return p;
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json accuracy_json(const AccuracyReport& r) {
    return {{"n", r.n}, {"correct", r.correct}, {"accuracy", r.estimate}, {"ci95", interval_json(r.ci)}};
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

PointSampler global_sampler(const Instance& inst, const GadgetParams& p) {
    return [&inst, p](Rng& rng) { return sample_global(inst, p, rng); };
}

// ---- subcommands ----------------------------------------------------------

Outcome cmd_gen_instance(const json& cfg) {
    const Bundle b = load_instance(cfg);
    Outcome o;
    const json ij = instance_to_json(b.inst);
    if (auto out = cfg_path(cfg, "out")) write_text_file(*out, ij.dump() + "\n");
    if (auto out = cfg_path(cfg, "labeling_out")) {
        if (!b.sigma) throw ParameterError("--labeling_out needs a planted instance");
        write_text_file(*out, labeling_to_json(*b.sigma).dump() + "\n");
    }
    o.results = {{"vertices", b.inst.num_vertices},
                 {"edges", b.inst.edges.size()},
                 {"max_preimage", b.inst.max_preimage()},
                 {"instance_digest", hex64(fnv1a(ij.dump()))}};
    if (b.sigma) {
        const auto score = evaluate_labeling(b.inst, *b.sigma);
        o.results["planted_strong_frac"] = score.strong_frac;
        o.results["planted_weak_frac"] = score.weak_frac;
        o.pass = score.strong_frac == 1.0;
    }
    o.pass = o.pass && b.inst.max_preimage() <= b.inst.d;
    return o;
}

Outcome cmd_derive_params(const json& cfg) {
    const GadgetParams p = derive_params(cfg_get<double>(cfg, "zeta"), cfg_get<double>(cfg, "nu"),
                                         cfg_get<std::uint32_t>(cfg, "ell"), cfg_get<std::uint32_t>(cfg, "z"));
    Outcome o;
    o.params = params_to_json(p);
    o.faithful = p.faithful;
    o.results = {{"params", o.params}, {"gate_raw", p.gate_raw()}, {"gate_valid", p.gate_valid()}};
    return o;
}

Outcome cmd_sample(const json& cfg) {
    const Bundle b = load_instance(cfg);
    const GadgetParams p = load_params(cfg, b.inst);
    const auto n = cfg_get<std::uint64_t>(cfg, "n");
    const auto dist = cfg_get<std::string>(cfg, "distribution");
    const bool with_tr = cfg_get<bool>(cfg, "transcript");
    const auto seed = seed_of(cfg);
    PointSampler sampler;
    if (dist == "global") {
        sampler = global_sampler(b.inst, p);
    } else if (dist == "basic") {
        sampler = [&](Rng& rng) { return sample_basic_I(b.inst.M, b.inst.k, rng); };
    } else if (dist == "simplified") {
        sampler = [&](Rng& rng) { return sample_simplified_D(b.inst.m, b.inst.d, b.inst.k, p.Q, rng); };
    } else {
        throw ParameterError("--distribution must be global, basic or simplified");
    }
    std::ostringstream lines;
    std::uint64_t ones = 0, bits = 0, violations = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, i);
        const SamplePoint pt = sampler(rng);
        ones += pt.a;
        bits += pt.bits.size();
        if (dist == "global" && !check_structure(b.inst, p, pt)) ++violations;
        lines << point_to_json(pt, with_tr).dump() << '\n';
    }
    const std::string text = lines.str();
    if (auto out = cfg_path(cfg, "out")) write_text_file(*out, text);
    Outcome o;
    o.params = params_to_json(p);
    o.results = {{"n", n},
                 {"label_one_count", ones},
                 {"set_bits", bits},
                 {"structure_violations", violations},
                 {"gate_clamped", p.gate_clamped()},
                 {"digest", hex64(fnv1a(text))}};
    o.pass = violations == 0;
    return o;
}

Outcome cmd_verify_complete(const json& cfg) {
    const Bundle b = load_instance(cfg);
    if (!b.sigma) throw ParameterError("verify-complete needs a planted instance or --labeling");
    const GadgetParams p = load_params(cfg, b.inst);
    const auto n = cfg_get<std::uint64_t>(cfg, "n");
    const auto cnf = build_completeness_cnf(b.inst, *b.sigma, p.Q);
    const auto sampler = global_sampler(b.inst, p);
    const auto both = accuracy(cnf.both, sampler, n, seed_of(cfg), workers_of(cfg));
    const auto c1 = accuracy(cnf.c1, sampler, n, seed_of(cfg), workers_of(cfg));
    const auto c2 = accuracy(cnf.c2, sampler, n, seed_of(cfg), workers_of(cfg));
    Outcome o;
    o.params = params_to_json(p);
    o.results = {{"c1_and_c2", accuracy_json(both)},
                 {"c1", accuracy_json(c1)},
                 {"c2", accuracy_json(c2)},
                 {"misclassified", both.n - both.correct},
                 {"gate_clamped", p.gate_clamped()}};
    o.pass = both.correct == both.n;
    return o;
}

Outcome cmd_probe(const json& cfg) {
    const Bundle b = load_instance(cfg);
    const GadgetParams p = load_params(cfg, b.inst);
    const auto method = parse_method(cfg_get<std::string>(cfg, "method"));
    const auto ell = cfg_get<std::uint32_t>(cfg, "ell");
    const auto epochs = cfg_get<std::uint32_t>(cfg, "epochs");
    const auto n_train = cfg_get<std::uint64_t>(cfg, "train");
    const auto n_test = cfg_get<std::uint64_t>(cfg, "test");
    const auto dist = cfg_get<std::string>(cfg, "distribution");
    const auto seed = seed_of(cfg);
    PointSampler sampler;
    if (dist == "global") {
        sampler = global_sampler(b.inst, p);
    } else if (dist == "basic") {
        const auto M = cfg_get<std::uint32_t>(cfg, "basic_M");
        sampler = [M, k = b.inst.k](Rng& rng) { return sample_basic_I(M, k, rng); };
    } else {
        throw ParameterError("--distribution must be global or basic");
    }
    if (ell == 0 || ell > 20) throw ParameterError("--ell must lie in [1, 20]");
    const Dataset train = sample_dataset(sampler, n_train, mix_key(seed, 1), workers_of(cfg));
    std::vector<Halfspace> hs;
    json rows = json::array();
    for (std::uint32_t s = 0; s < ell; ++s) {
        hs.push_back(train_halfspace(train, method, epochs, mix_key(seed, 100 + s)));
        rows.push_back({{"train", accuracy_json(accuracy(hs.back(), train))},
                        {"test", accuracy_json(accuracy(hs.back(), sampler, n_test, mix_key(seed, 2), workers_of(cfg)))}});
    }
    const auto comb = fit_combiner(hs, train);
    if (auto out = cfg_path(cfg, "out")) write_text_file(*out, classifier_to_json(comb).dump() + "\n");
    Outcome o;
    o.params = params_to_json(p);
    o.results = {{"method", method_name(method)},
                 {"halfspaces", rows},
                 {"combiner",
                  {{"train", accuracy_json(accuracy(comb, train))},
                   {"test", accuracy_json(accuracy(comb, sampler, n_test, mix_key(seed, 2), workers_of(cfg)))}}},
                 {"features", train.features.size()}};
    return o;
}

json crit_report_json(const CriticalIndexReport& r) {
    return {{"i_tau", r.i_tau},
            {"C_tau", r.C_tau},
            {"C_tau_leK", r.C_tau_leK},
            {"regular", r.regular},
            {"residual_mass", r.residual_mass},
            {"order", r.order}};
}

Outcome cmd_critindex(const json& cfg) {
    const auto tau = cfg_get<double>(cfg, "tau");
    const auto K = cfg_get<std::uint64_t>(cfg, "K");
    BlockVector bv;
    if (auto path = cfg_path(cfg, "coeffs")) {
        const auto hs = halfspaces_from_json(read_json_file(*path));
        const Halfspace& h = hs.at(cfg_get<std::size_t>(cfg, "halfspace"));
        std::uint32_t M = 1, Q = 1;
        for (const auto& [c, w] : h.coeffs) {
            M = std::max(M, c.label + 1);
            Q = std::max(Q, c.slot + 1);
        }
        const auto side = cfg_get<std::string>(cfg, "side");
        if (side != "X" && side != "Y") throw ParameterError("--side must be X or Y");
        bv = block_vector(h, side == "X" ? Side::X : Side::Y, cfg_get<std::uint32_t>(cfg, "vertex"), M, Q);
    } else {
        const auto M = cfg_get<std::uint32_t>(cfg, "blocks");
        const auto Q = cfg_get<std::uint32_t>(cfg, "block_len");
        const auto decay = cfg_get<double>(cfg, "decay");
        Rng rng(seed_of(cfg));
        bv.M = M;
        bv.Q = Q;
        for (std::uint32_t i = 0; i < M; ++i) {
            std::vector<double> blk(Q);
            const double scale = std::pow(decay, static_cast<double>(rng.below(M)));
            for (auto& x : blk) x = rng.normal() * scale;
            bv.blocks[i] = blk;
        }
    }
    const auto rep = critical_index(bv, tau, K);
    const auto brute = critical_index_brute(bv.sq_norms(), bv.M, tau);
    const auto decay = check_crit_decay(rep.sq_norms, rep.i_tau, tau);
    const auto resid = [&] {
        auto sq = bv.sq_norms();
        std::erase_if(sq, [&](const auto& x) { return rep.critical(x.first); });
        return critical_index_sq(sq, bv.M, tau, K);
    }();
    Outcome o;
    o.results = {{"report", crit_report_json(rep)},
                 {"brute_i_tau", brute},
                 {"brute_agrees", brute == rep.i_tau},
                 {"decay_pass", decay.pass},
                 {"decay_witness", json::array({decay.i1, decay.i2})},
                 {"residual_regular", resid.regular}};
    o.pass = brute == rep.i_tau && decay.pass && resid.regular;
    return o;
}

Outcome cmd_truncate(const json& cfg) {
    const Bundle b = load_instance(cfg);
    const GadgetParams p = load_params(cfg, b.inst);
    const auto edge = cfg_get<std::uint32_t>(cfg, "edge");
    if (edge >= b.inst.edges.size()) throw ParameterError("--edge out of range");
    Halfspace h;
    if (auto path = cfg_path(cfg, "coeffs")) {
        h = halfspaces_from_json(read_json_file(*path)).at(0);
    } else {
        Rng rng(seed_of(cfg));
        h = geometric_edge_halfspace(b.inst, edge, p.Q, cfg_get<double>(cfg, "ratio"), rng);
    }
    const auto tr = truncate_report(h, b.inst, edge, p.Q, p.tau, p.K);
    const auto again = truncate(tr.h, b.inst, edge, p.Q, p.tau, p.K);
    bool capped = true;
    for (auto v : b.inst.edges[edge].vids) {
        const Side side = b.inst.edges[edge].in_x(v) ? Side::X : Side::Y;
        const auto rep = critical_index(block_vector(tr.h, side, v, b.inst.M, p.Q), p.tau, p.K);
        capped = capped && rep.C_tau == rep.C_tau_leK;
    }
    double before = 0.0, after = 0.0;
    for (const auto& cw : h.coeffs) before += cw.second * cw.second;
    for (const auto& cw : tr.h.coeffs) after += cw.second * cw.second;
    const bool accounted = std::abs(before - after - tr.removed_mass) <= 1e-12 * std::max(1.0, before);
    if (auto out = cfg_path(cfg, "out")) write_text_file(*out, halfspace_to_json(tr.h).dump() + "\n");
    Outcome o;
    o.params = params_to_json(p);
    o.results = {{"zeroed_blocks", tr.zeroed_blocks.size()},
                 {"removed_mass", tr.removed_mass},
                 {"mass_accounted", accounted},
                 {"capped", capped},
                 {"idempotent", again.coeffs == tr.h.coeffs}};
    try {
        const auto mc = truncation_disagreement_mc(b.inst, edge, p, h, cfg_get<std::uint64_t>(cfg, "trials"),
                                                   seed_of(cfg), workers_of(cfg));
        o.results["disagreement"] = {{"estimate", mc.estimate},       {"ci95", interval_json(mc.ci)},
                                     {"bound", mc.bound},             {"union_bound", mc.union_bound},
                                     {"bound_vacuous", mc.bound_vacuous}};
    } catch (const PreconditionError& e) {
        o.results["disagreement"] = {{"skipped", e.what()}};
    }
    o.pass = capped && accounted && again.coeffs == tr.h.coeffs;
    return o;
}

Outcome cmd_anticonc(const json& cfg) {
    const auto ns = cfg_get<std::vector<std::uint64_t>>(cfg, "n_values");
    const auto Ts = cfg_get<std::vector<std::uint64_t>>(cfg, "T_values");
    const auto be_ns = cfg_get<std::vector<std::uint64_t>>(cfg, "be_n");
    const auto trials = cfg_get<std::uint64_t>(cfg, "trials");
    const auto scaling = lo_scaling_check(ns);
    const auto block = block_lo_slope(Ts, cfg_get<std::uint32_t>(cfg, "block_len"), trials, seed_of(cfg),
                                      workers_of(cfg));
    json be = json::array();
    double prev = 2.0;
    bool monotone = true;
    for (auto n : be_ns) {
        const double a = 1.0 / std::sqrt(4.0 * static_cast<double>(n));
        std::vector<Atoms> vars(n, Atoms{{-a, a}, {0.5, 0.5}});
        const auto r = berry_esseen_gap(vars);
        monotone = monotone && r.gap <= prev + 1e-12;
        prev = r.gap;
        be.push_back({{"n", n}, {"gap", r.gap}, {"gamma", r.gamma}, {"exact", r.exact}});
    }
    const bool block_ok = block.slope >= -0.65 && block.slope <= -0.35;
    Outcome o;
    o.results = {{"lo_scaling", {{"n", scaling.n_values}, {"probability", scaling.probabilities}, {"slope", scaling.slope}}},
                 {"block_lo", {{"T", block.T_values}, {"estimate", block.estimates}, {"slope", block.slope}}},
                 {"berry_esseen", be}};
    o.pass = scaling.pass && block_ok && monotone;
    return o;
}

std::vector<Halfspace> decode_coeffs(const json& cfg, const Bundle& b, std::uint32_t Q) {
    if (auto path = cfg_path(cfg, "coeffs")) return halfspaces_from_json(read_json_file(*path));
    const auto kind = cfg_get<std::string>(cfg, "coeff_kind");
    if (kind == "dictator") {
        if (!b.sigma) throw ParameterError("dictator coefficients need a planted instance or --labeling");
        return {dictator_halfspace(b.inst, *b.sigma, Q)};
    }
    if (kind == "gaussian") {
        std::vector<Halfspace> hs;
        Rng rng(mix_key(seed_of(cfg), 0xc0ef));
        for (std::uint32_t s = 0; s < cfg_get<std::uint32_t>(cfg, "ell"); ++s) hs.push_back(gaussian_halfspace(b.inst, Q, rng));
        return hs;
    }
    throw ParameterError("--coeff_kind must be dictator or gaussian");
}

json decode_json(const DecodeReport& r) {
    return {{"repeats", r.repeats},         {"mean_weak", r.mean_weak},         {"stderr_weak", r.stderr_weak},
            {"best_weak", r.best_weak},     {"mean_strong", r.mean_strong},     {"edge_weak_freq", r.edge_weak_freq},
            {"bound", r.bound},             {"bound_vacuous", r.bound_vacuous}};
}

Outcome cmd_decode(const json& cfg) {
    const Bundle b = load_instance(cfg);
    const auto Q = cfg_get<std::uint32_t>(cfg, "Q");
    const auto tau = cfg_get<double>(cfg, "tau");
    const auto K = cfg_get<std::uint64_t>(cfg, "K");
    const auto hs = decode_coeffs(cfg, b, Q);
    const auto rep = decode_and_score(b.inst, hs, Q, tau, K, cfg_get<double>(cfg, "nu"),
                                      cfg_get<std::uint64_t>(cfg, "repeats"), seed_of(cfg), workers_of(cfg));
    const auto base = uniform_labeling_baseline(b.inst, cfg_get<std::uint64_t>(cfg, "baseline"),
                                                mix_key(seed_of(cfg), 0xba5e), workers_of(cfg));
    Outcome o;
    o.results = {{"decode", decode_json(rep)},
                 {"baseline", {{"samples", base.samples}, {"mean_weak", base.mean_weak}, {"stderr_weak", base.stderr_weak}}}};
    return o;
}

json row(const std::string& name, double estimate, double bound, bool vacuous, bool pass, const std::string& note) {
    return {{"name", name}, {"estimate", estimate}, {"bound", bound}, {"bound_vacuous", vacuous},
            {"pass", pass}, {"note", note}};
}

Outcome cmd_lemma_suite(const json& cfg) {
    const auto seed = seed_of(cfg);
    const auto workers = workers_of(cfg);
    const auto trials = cfg_get<std::uint64_t>(cfg, "trials");
    json rows = json::array();

    {  // critical index vs brute force, with the decay property
        Rng rng(mix_key(seed, 1));
        std::uint64_t mismatches = 0, decay_fail = 0;
        const std::uint64_t N = 200;
        for (std::uint64_t n = 0; n < N; ++n) {
            const auto M = static_cast<std::uint32_t>(1 + rng.below(64));
            std::vector<std::pair<std::uint32_t, double>> sq;
            for (std::uint32_t i = 0; i < M; ++i) {
                if (rng.bernoulli(0.2)) continue;
                sq.emplace_back(i, std::pow(rng.uniform(), 4));
            }
            const double tau = 0.05 + 0.5 * rng.uniform();
            const auto rep = critical_index_sq(sq, M, tau, 4);
            mismatches += critical_index_brute(sq, M, tau) != rep.i_tau;
            decay_fail += !check_crit_decay(rep.sq_norms, rep.i_tau, tau).pass;
        }
        rows.push_back(row("critical_index_oracle", static_cast<double>(mismatches), 0.0, false, mismatches == 0,
                           "mismatches over " + std::to_string(N) + " random vectors"));
        rows.push_back(row("critical_index_decay", static_cast<double>(decay_fail), 0.0, false, decay_fail == 0,
                           "violations of the decay property"));
    }

    // Bijective-projection fixture with a valid gate: k = 8, t = 6, zeta = 1/4.
    const Instance inst = build_random_instance(16, 2, 8, 8, 8, 1, mix_key(seed, 2));
    GadgetParams p;
    p.zeta = 0.25;
    p.nu = 0.1;
    p.k = 8;
    p.t = 6;
    p.d = 1;
    p.Q = 64;
    p.tau = 0.3;
    p.K = 2;
    p.gate_policy = GatePolicy::strict;

    {
        Rng rng(mix_key(seed, 3));
        const Halfspace h = geometric_edge_halfspace(inst, 0, p.Q, 0.5, rng);
        GadgetParams pt = p;
        pt.tau = 0.1;
        const auto r = truncation_disagreement_mc(inst, 0, pt, h, trials, mix_key(seed, 4), workers);
        rows.push_back(row("truncation_disagreement", r.estimate, r.bound, r.bound_vacuous, r.estimate <= r.union_bound,
                           "pass: estimate within the union bound over the edge"));
    }
    {
        const auto s = lo_scaling_check({16, 64, 256, 1024});
        rows.push_back(row("lo_scaling_slope", s.slope, -0.5, false, s.pass, "target slope in [-0.6, -0.4]"));
        const auto b = block_lo_slope({16, 64, 256}, 4, trials, mix_key(seed, 5), workers);
        rows.push_back(row("block_lo_slope", b.slope, -0.5, false, b.slope >= -0.65 && b.slope <= -0.35,
                           "target slope in [-0.65, -0.35]"));
        const double a = 1.0 / std::sqrt(4.0 * 64);
        const auto be = berry_esseen_gap(std::vector<Atoms>(64, Atoms{{-a, a}, {0.5, 0.5}}));
        rows.push_back(row("berry_esseen_gap", be.gap, be.gamma, false, be.gap <= be.gamma, "bound column is gamma"));
    }
    {
        Rng rng(mix_key(seed, 6));
        const Instance wide = build_random_instance(16, 1, 8, 256, 256, 1, mix_key(seed, 7));
        GadgetParams pn = p;
        pn.zeta = 0.5;
        pn.t = 2;
        pn.Q = 1;
        pn.tau = 0.01;
        const Halfspace h = gaussian_edge_halfspace(wide, 0, 1, 1.0, rng);
        const auto r = noisy_mass_concentration(wide, 0, pn, h, trials, mix_key(seed, 8), workers);
        rows.push_back(row("noisy_mass_shortfall", r.max_frequency, r.bound, r.bound_vacuous,
                           r.max_frequency <= r.bound + 1e-12 || r.max_frequency == 0.0, "max over edge vertices"));
    }
    {
        Rng rng(mix_key(seed, 9));
        const Halfspace h = gaussian_edge_halfspace(inst, 0, p.Q, 1.0, rng);
        const auto v = variance_diff_mc(inst, 0, p, h, trials, mix_key(seed, 10), workers);
        rows.push_back(row("variance_diff", v.variance, v.bound, v.bound_vacuous,
                           v.variance <= v.bound + 3.0 * v.stderr_variance, "Var of the coupled difference"));
        const auto d = pointwise_deviation_mc(inst, 0, p, h, trials, mix_key(seed, 11), workers);
        rows.push_back(row("pointwise_deviation", d.estimate, d.bound, d.bound_vacuous, d.estimate <= d.bound,
                           "E|pos(h1) - pos(h0)| under the pairing distribution"));
    }
    {
        auto [pinst, sigma] = build_planted_instance(16, 8, 2, 8, 4, 2, mix_key(seed, 12));
        const auto r = decode_and_score(pinst, {dictator_halfspace(pinst, sigma, 8)}, 8, 0.1, 2, 0.1, 100,
                                        mix_key(seed, 13), workers);
        rows.push_back(row("decode_dictator", r.best_weak, r.bound, r.bound_vacuous, r.mean_weak >= r.bound,
                           "estimate is the best weak fraction over 100 labelings"));
    }

    Outcome o;
    o.params = params_to_json(p);
    bool all = true;
    for (const auto& r : rows) all = all && r.at("pass").get<bool>();
    o.results = {{"rows", rows}};
    o.pass = all;
    return o;
}

// ---- registry -------------------------------------------------------------

std::vector<Command> commands() {
    auto with = [](std::initializer_list<json> parts) {
        json out = kCommon;
        for (const auto& p : parts) out = merge(out, p);
        return out;
    };
    std::vector<Command> cs;
    cs.push_back({"gen-instance", "build a Label Cover instance (planted or random)",
                  with({kInstanceKeys, {{"out", nullptr}, {"labeling_out", nullptr}}}), {"out", "labeling_out"},
                  cmd_gen_instance});
    cs.push_back({"derive-params", "derive the parameter tuple from (zeta, nu, ell, z)",
                  with({{{"zeta", 0.25}, {"nu", 0.1}, {"ell", 1}, {"z", 1}}}), {}, cmd_derive_params});
    cs.push_back({"sample", "sample points as JSON Lines",
                  with({kInstanceKeys, kParamKeys,
                        {{"n", 1000}, {"distribution", "global"}, {"transcript", false}, {"out", nullptr}}}),
                  {"out"}, cmd_sample});
    cs.push_back({"verify-complete", "check the completeness CNF on D_global",
                  with({kInstanceKeys, kParamKeys, {{"n", 100000}}}), {}, cmd_verify_complete});
    cs.push_back({"probe", "train halfspaces and a combiner, report accuracy",
                  with({kInstanceKeys, kParamKeys,
                        {{"method", "perceptron"}, {"epochs", 5}, {"train", 2000}, {"test", 2000},
                         {"distribution", "global"}, {"basic_M", 200}, {"out", nullptr}, {"ell", 1}}}),
                  {"out"}, cmd_probe});
    cs.push_back({"critindex", "critical index of a block vector",
                  with({{{"coeffs", nullptr}, {"halfspace", 0}, {"vertex", 0}, {"side", "X"}, {"blocks", 32},
                         {"block_len", 4}, {"decay", 0.7}, {"tau", 0.1}, {"K", 2}}}),
                  {}, cmd_critindex});
    cs.push_back({"truncate", "truncate a halfspace on one edge",
                  with({kInstanceKeys, kParamKeys,
                        {{"coeffs", nullptr}, {"edge", 0}, {"ratio", 0.5}, {"trials", 20000}, {"out", nullptr},
                         {"M", 8}, {"m", 8}, {"d", 1}}}),
                  {"out"}, cmd_truncate});
    cs.push_back({"anticonc", "Littlewood-Offord scaling, block small-ball and Berry-Esseen checks",
                  with({{{"n_values", {16, 64, 256, 1024}}, {"T_values", {16, 64, 256}}, {"be_n", {4, 16, 64}},
                         {"trials", 20000}, {"block_len", 4}}}),
                  {}, cmd_anticonc});
    cs.push_back({"decode", "randomized labeling from halfspace coefficients",
                  with({kInstanceKeys,
                        {{"coeffs", nullptr}, {"coeff_kind", "dictator"}, {"ell", 1}, {"Q", 8}, {"tau", 0.1},
                         {"K", 2}, {"nu", 0.1}, {"repeats", 100}, {"baseline", 2000}}}),
                  {}, cmd_decode});
    cs.push_back({"lemma-suite", "run every lemma check and emit one row per check", with({{{"trials", 20000}}}), {},
                  cmd_lemma_suite});
    return cs;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_report(const Command& c, const json& cfg, const Outcome& o) {
    return {{"tool", "lcgadget"},
            {"command", c.name},
            {"git_describe", LCG_GIT_DESCRIBE},
            {"seed", cfg.at("seed")},
            {"params", o.params},
            {"faithful", o.faithful},
            {"config", cfg},
            {"results", o.results},
            {"pass", o.pass},
            {"timestamp", timestamp()}};
}

void emit(const json& report, const json& cfg, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    if (auto path = cfg_path(cfg, "report")) {
        write_text_file(*path, text);
    } else {
        out << text;
    }
    if (auto path = cfg_path(cfg, "csv")) write_text_file(*path, json_to_csv(report));
}

const Command* find_command(const std::vector<Command>& cs, const std::string& name) {
    for (const auto& c : cs) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

// Re-runs a report's command from its embedded config, with every output
// file redirected to a scratch directory, and compares the results.
int replay(const std::string& path, const json& cfg, std::ostream& out) {
    const json old = read_json_file(path);
    if (!old.contains("command") || !old.contains("config") || !old.contains("results")) {
        throw FormatError(path + " is not a report");
    }
    const auto cs = commands();
    const Command* c = find_command(cs, old.at("command").get<std::string>());
    if (!c) throw FormatError("unknown command in report: " + old.at("command").dump());
    json rcfg = old.at("config");
    const auto dir = std::filesystem::temp_directory_path() /
                     ("lcgadget-replay-" + hex64(fnv1a(path + timestamp() + std::to_string(std::rand()))));
    std::filesystem::create_directories(dir);
    for (const auto& key : c->outputs) {
        if (rcfg.contains(key) && !rcfg.at(key).is_null()) rcfg[key] = (dir / key).string();
    }
    rcfg["report"] = nullptr;
    rcfg["csv"] = nullptr;
    const Outcome o = c->fn(rcfg);
    std::filesystem::remove_all(dir);
    std::vector<std::string> diffs;
    const json& a = old.at("results");
    const json b = o.results;
    for (const auto& [k, v] : a.items()) {
        if (!b.contains(k) || b.at(k) != v) diffs.push_back(k);
    }
    for (const auto& [k, v] : b.items()) {
        if (!a.contains(k)) diffs.push_back(k);
    }
    const bool match = diffs.empty() && old.value("pass", o.pass) == o.pass;
    Command self{"replay", "", json::object(), {}, nullptr};
    Outcome ro;
    ro.results = {{"replayed", c->name}, {"source", path}, {"match", match}, {"differing_keys", diffs}};
    ro.pass = match;
    emit(make_report(self, cfg, ro), cfg, out);
    return match ? kExitPass : kExitCheckFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto cs = commands();
    CLI::App app{"Label Cover gadget laboratory", "lcgadget"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    struct Bound {
        const Command* cmd;
        CLI::App* sub;
        std::map<std::string, std::string> raw;
        std::string config;
    };
    std::vector<Bound> bound;
    bound.reserve(cs.size() + 1);
    for (const auto& c : cs) {
        bound.push_back({&c, app.add_subcommand(c.name, c.help), {}, {}});
        Bound& b = bound.back();
        b.sub->add_option("--config", b.config, "JSON file of option values (flags override it)");
        for (const auto& [key, def] : c.defaults.items()) {
            b.sub->add_option("--" + key, b.raw[key], "default: " + def.dump());
        }
    }
    std::string replay_path, replay_report, replay_csv;
    CLI::App* rsub = app.add_subcommand("replay", "re-run a report from its embedded config and compare results");
    rsub->add_option("--report", replay_path, "report to replay")->required();
    rsub->add_option("--out", replay_report, "where to write the replay report");
    rsub->add_option("--csv", replay_csv, "CSV flattening of the replay report");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "lcgadget: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (rsub->parsed()) {
            json cfg = {{"seed", nullptr},
                        {"report", replay_report.empty() ? json(nullptr) : json(replay_report)},
                        {"csv", replay_csv.empty() ? json(nullptr) : json(replay_csv)},
                        {"source", replay_path}};
            return replay(replay_path, cfg, out);
        }
        for (auto& b : bound) {
            if (!b.sub->parsed()) continue;
            json cfg = b.cmd->defaults;
            if (!b.config.empty()) {
                const json file = read_json_file(b.config);
                if (!file.is_object()) throw FormatError("--config must hold a JSON object");
                for (const auto& [k, v] : file.items()) {
                    if (!cfg.contains(k)) throw ParameterError("unknown option in config: " + k);
                    cfg[k] = v;
                }
            }
            for (const auto& [key, text] : b.raw) {
                if (b.sub->count("--" + key)) cfg[key] = parse_flag_value(text);
            }
            const Outcome o = b.cmd->fn(cfg);
            emit(make_report(*b.cmd, cfg, o), cfg, out);
            return o.pass ? kExitPass : kExitCheckFailed;
        }
    } catch (const Error& e) {
        err << "lcgadget: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "lcgadget: " << e.what() << "\n";
        return kExitUsage;
    }
    err << "lcgadget: no subcommand\n";
    return kExitUsage;
}

} // namespace lcg
