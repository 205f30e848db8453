#include "lcgadget/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lcgadget/error.hpp"

namespace lcg {

namespace {

template <class T>
T get(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad field ") + key + ": " + e.what());
    }
}

std::string side_name(Side s) { return s == Side::X ? "X" : "Y"; }

Side parse_side(const json& j) {
    const auto s = j.get<std::string>();
    if (s == "X") return Side::X;
    if (s == "Y") return Side::Y;
    throw FormatError("side must be X or Y");
}

json coord_json(const Coord& c) { return json::array({side_name(c.side), c.vertex, c.label, c.slot}); }

Coord parse_coord(const json& j) {
    if (!j.is_array() || j.size() < 4) throw FormatError("coordinate must be [side, v, i, q]");
    return Coord{parse_side(j[0]), j[1].get<std::uint32_t>(), j[2].get<std::uint32_t>(), j[3].get<std::uint32_t>()};
}

json u32_or_null(std::uint32_t x) { return x == kNone ? json(nullptr) : json(x); }

std::uint32_t parse_u32_or_null(const json& j) { return j.is_null() ? kNone : j.get<std::uint32_t>(); }

} // namespace

json instance_to_json(const Instance& inst) {
    json edges = json::array();
    for (const auto& e : inst.edges) {
        json proj = json::object();
        for (std::size_t p = 0; p < e.vids.size(); ++p) proj[std::to_string(e.vids[p])] = e.proj[p];
        edges.push_back({{"vids", e.vids}, {"ex", e.ex}, {"ey", e.ey}, {"proj", proj}});
    }
    return {{"k", inst.k}, {"M", inst.M}, {"m", inst.m}, {"d", inst.d}, {"vertices", inst.num_vertices},
            {"edges", edges}};
}

Instance instance_from_json(const json& j) {
    Instance inst;
    try {
        inst.k = get<std::uint32_t>(j, "k");
        inst.M = get<std::uint32_t>(j, "M");
        inst.m = get<std::uint32_t>(j, "m");
        inst.d = get<std::uint32_t>(j, "d");
        inst.num_vertices = get<std::uint32_t>(j, "vertices");
        for (const auto& je : get<json>(j, "edges")) {
            Edge e;
            e.vids = get<std::vector<std::uint32_t>>(je, "vids");
            e.ex = get<std::vector<std::uint32_t>>(je, "ex");
            e.ey = get<std::vector<std::uint32_t>>(je, "ey");
            const json proj = get<json>(je, "proj");
            for (auto v : e.vids) {
                const auto key = std::to_string(v);
                if (!proj.contains(key)) throw FormatError("missing projection for vertex " + key);
                e.proj.push_back(proj.at(key).get<std::vector<std::uint32_t>>());
            }
            inst.edges.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed instance: ") + e.what());
    }
    inst.finalize();
    return inst;
}

json labeling_to_json(const Labeling& sigma) {
    json j = json::object();
    for (std::size_t v = 0; v < sigma.size(); ++v) j[std::to_string(v)] = sigma[v];
    return j;
}

Labeling labeling_from_json(const json& j, std::uint32_t num_vertices) {
    if (!j.is_object()) throw FormatError("labeling must be an object vid -> label");
    Labeling sigma(num_vertices, kNone);
    for (const auto& [key, val] : j.items()) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(key, &used);
        } catch (const std::exception&) {
            throw FormatError("bad vertex id in labeling: " + key);
        }
        if (used != key.size() || v >= num_vertices) throw FormatError("bad vertex id in labeling: " + key);
        sigma[v] = val.get<std::uint32_t>();
    }
    for (auto x : sigma) {
        if (x == kNone) throw FormatError("labeling is not total");
    }
    return sigma;
}

json params_to_json(const GadgetParams& p) {
    return {{"zeta", p.zeta}, {"nu", p.nu},   {"ell", p.ell}, {"z", p.z},
            {"d", p.d},       {"k", p.k},     {"t", p.t},     {"Q", p.Q},
            {"tau", p.tau},   {"K", p.K},     {"J", p.J},     {"faithful", p.faithful},
            {"gate", p.gate_policy == GatePolicy::clamp ? "clamp" : "strict"}};
}

GadgetParams params_from_json(const json& j, GadgetParams base) {
    if (!j.is_object()) throw FormatError("params must be an object");
    bool overridden = false;
    auto take = [&](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null()) {
            using T = std::decay_t<decltype(field)>;
            const T v = j.at(key).get<T>();
            if (v != field) overridden = true;
            field = v;
        }
    };
    try {
        take("zeta", base.zeta);
        take("nu", base.nu);
        take("ell", base.ell);
        take("z", base.z);
        take("d", base.d);
        take("k", base.k);
        take("t", base.t);
        take("Q", base.Q);
        take("tau", base.tau);
        take("K", base.K);
        take("J", base.J);
        if (j.contains("gate")) {
            const auto g = j.at("gate").get<std::string>();
            if (g == "clamp") {
                base.gate_policy = GatePolicy::clamp;
            } else if (g == "strict") {
                base.gate_policy = GatePolicy::strict;
            } else {
                throw FormatError("gate must be clamp or strict");
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed params: ") + e.what());
    }
    bool faithful = base.faithful && !overridden;
    if (j.contains("faithful") && j.at("faithful").is_boolean()) faithful = faithful && j.at("faithful").get<bool>();
    base.faithful = faithful;
    return base;
}

json transcript_to_json(const Transcript& t) {
    json blocks = json::array();
    for (const auto& b : t.blocks) {
        json pinned = json::array();
        for (const auto& [c, slot] : b.pinned) {
            json pc = coord_json(c);
            pc[3] = slot;
            pinned.push_back(pc);
        }
        blocks.push_back({{"b", b.b},
                          {"S", b.S},
                          {"Sp", b.Sp},
                          {"u_x", u32_or_null(b.u_x)},
                          {"u_y", u32_or_null(b.u_y)},
                          {"gate", b.gate},
                          {"T", b.T},
                          {"Tp", b.Tp},
                          {"noise_key", b.noise_key},
                          {"indicator_key", b.indicator_key},
                          {"pinned", pinned}});
    }
    const char* kind = t.kind == TranscriptKind::basic ? "basic"
                       : t.kind == TranscriptKind::simplified ? "simplified"
                                                              : "global";
    return {{"kind", kind}, {"a", t.a}, {"edge", t.edge}, {"key", t.key}, {"blocks", blocks}};
}

Transcript transcript_from_json(const json& j) {
    Transcript t;
    try {
        const auto kind = get<std::string>(j, "kind");
        if (kind == "basic") {
            t.kind = TranscriptKind::basic;
        } else if (kind == "simplified") {
            t.kind = TranscriptKind::simplified;
        } else if (kind == "global") {
            t.kind = TranscriptKind::global;
        } else {
            throw FormatError("unknown transcript kind: " + kind);
        }
        t.a = get<std::uint8_t>(j, "a");
        t.edge = get<std::uint32_t>(j, "edge");
        t.key = get<std::uint64_t>(j, "key");
        for (const auto& jb : get<json>(j, "blocks")) {
            BlockDraw b;
            b.b = get<std::uint8_t>(jb, "b");
            b.S = get<std::vector<std::uint32_t>>(jb, "S");
            b.Sp = get<std::vector<std::uint32_t>>(jb, "Sp");
            b.u_x = parse_u32_or_null(jb.at("u_x"));
            b.u_y = parse_u32_or_null(jb.at("u_y"));
            b.gate = get<bool>(jb, "gate");
            b.T = get<std::vector<std::uint32_t>>(jb, "T");
            b.Tp = get<std::vector<std::uint32_t>>(jb, "Tp");
            b.noise_key = get<std::uint64_t>(jb, "noise_key");
            b.indicator_key = get<std::uint64_t>(jb, "indicator_key");
            for (const auto& pc : get<json>(jb, "pinned")) {
                Coord c = parse_coord(pc);
                const std::uint32_t slot = c.slot;
                c.slot = 0;
                b.pinned.emplace_back(c, slot);
            }
            t.blocks.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed transcript: ") + e.what());
    }
    return t;
}

json point_to_json(const SamplePoint& p, bool with_transcript) {
    json x = json::array(), y = json::array();
    for (const auto& c : p.bits) (c.side == Side::X ? x : y).push_back({c.vertex, c.label, c.slot});
    json j = {{"a", p.a}, {"edge", p.edge}, {"x", x}, {"y", y}};
    if (with_transcript && p.transcript) j["transcript"] = transcript_to_json(*p.transcript);
    return j;
}

SamplePoint point_from_json(const json& j) {
    SamplePoint p;
    try {
        p.a = get<std::uint8_t>(j, "a");
        p.edge = get<std::uint32_t>(j, "edge");
        for (Side side : {Side::X, Side::Y}) {
            for (const auto& c : get<json>(j, side == Side::X ? "x" : "y")) {
                if (!c.is_array() || c.size() != 3) throw FormatError("bit must be [v, i, q]");
                p.bits.push_back({side, c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>(), c[2].get<std::uint32_t>()});
            }
        }
        if (j.contains("transcript")) p.transcript = transcript_from_json(j.at("transcript"));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed point: ") + e.what());
    }
    std::sort(p.bits.begin(), p.bits.end());
    p.bits.erase(std::unique(p.bits.begin(), p.bits.end()), p.bits.end());
    return p;
}

json halfspace_to_json(const Halfspace& h) {
    json coeffs = json::array();
    for (const auto& [c, w] : h.coeffs) {
        json row = coord_json(c);
        row.push_back(w);
        coeffs.push_back(row);
    }
    return {{"type", "halfspace"}, {"theta", h.theta}, {"coeffs", coeffs}};
}

Halfspace halfspace_from_json(const json& j) {
    Halfspace h;
    try {
        h.theta = get<double>(j, "theta");
        for (const auto& row : get<json>(j, "coeffs")) {
            if (!row.is_array() || row.size() != 5) throw FormatError("coefficient must be [side, v, i, q, w]");
            h.coeffs.emplace_back(parse_coord(row), row[4].get<double>());
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed halfspace: ") + e.what());
    }
    h.normalize();
    return h;
}

namespace {

json clauses_json(const std::vector<Clause>& cs) {
    json out = json::array();
    for (const auto& c : cs) {
        json cl = json::array();
        for (const auto& l : c) {
            json row = coord_json(l.coord);
            row.push_back(l.negated);
            cl.push_back(row);
        }
        out.push_back(cl);
    }
    return out;
}

std::vector<Clause> parse_clauses(const json& j) {
    std::vector<Clause> out;
    for (const auto& cl : j) {
        Clause c;
        for (const auto& row : cl) {
            if (!row.is_array() || row.size() != 5) throw FormatError("literal must be [side, v, i, q, negated]");
            c.push_back({parse_coord(row), row[4].get<bool>()});
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace

json classifier_to_json(const Classifier& c) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {{"type", "constant"}, {"value", f.value}};
            } else if constexpr (std::is_same_v<T, Cnf>) {
                return {{"type", "cnf"}, {"clauses", clauses_json(f.clauses)}};
            } else if constexpr (std::is_same_v<T, Dnf>) {
                return {{"type", "dnf"}, {"terms", clauses_json(f.terms)}};
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                return halfspace_to_json(f);
            } else {
                json hs = json::array();
                for (const auto& h : f.halfspaces) hs.push_back(halfspace_to_json(h));
                return {{"type", "combiner"}, {"halfspaces", hs}, {"table", f.table}};
            }
        },
        c);
}

Classifier classifier_from_json(const json& j) {
    const auto type = get<std::string>(j, "type");
    try {
        if (type == "constant") return Constant{get<int>(j, "value")};
        if (type == "cnf") return Cnf{parse_clauses(get<json>(j, "clauses"))};
        if (type == "dnf") return Dnf{parse_clauses(get<json>(j, "terms"))};
        if (type == "halfspace") return halfspace_from_json(j);
        if (type == "combiner") {
            BooleanOfHalfspaces f;
            for (const auto& h : get<json>(j, "halfspaces")) f.halfspaces.push_back(halfspace_from_json(h));
            f.table = get<std::vector<std::uint8_t>>(j, "table");
            if (f.table.size() != (std::size_t{1} << f.halfspaces.size())) {
                throw FormatError("combiner table must have 2^ell entries");
            }
            return f;
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed classifier: ") + e.what());
    }
    throw FormatError("unknown classifier type: " + type);
}

std::vector<Halfspace> halfspaces_from_json(const json& j) {
    std::vector<Halfspace> out;
    if (j.is_object() && j.contains("halfspaces")) {
        for (const auto& h : j.at("halfspaces")) out.push_back(halfspace_from_json(h));
    } else {
        out.push_back(halfspace_from_json(j));
    }
    if (out.empty()) throw FormatError("no halfspaces in coefficient file");
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::vector<json> read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::vector<json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("write failed: " + path);
}

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
    } else {
        rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string json_to_csv(const json& j) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << csv_field(k) << ',' << csv_field(v) << '\n';
    return out.str();
}

} // namespace lcg
