#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcgadget/cli.hpp"
#include "lcgadget/io.hpp"

using namespace lcg;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
    json report() const { return json::parse(out); }
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "lcgadget-test-cli";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"no-such-command"}).code == kExitUsage);
    CHECK(cli({"derive-params", "--bogus", "1"}).code == kExitUsage);
    const auto bad = cli({"derive-params", "--zeta", "0.7"});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("zeta") != std::string::npos);
    CHECK(cli({"--help"}).code == kExitPass);
}

TEST_CASE("reports carry the run metadata") {
    const auto r = cli({"derive-params", "--zeta", "0.2", "--seed", "5"});
    REQUIRE(r.code == kExitPass);
    const json j = r.report();
    for (const char* key : {"tool", "command", "git_describe", "seed", "params", "faithful", "config", "results",
                            "pass", "timestamp"}) {
        CHECK(j.contains(key));
    }
    CHECK(j.at("command") == "derive-params");
    CHECK(j.at("seed") == 5);
    CHECK(j.at("faithful") == true);
    CHECK(j.at("config").at("zeta") == 0.2);
    CHECK(j.at("results").at("params").at("k") == 392);
}

TEST_CASE("config file, flag precedence and unknown keys") {
    const auto dir = scratch();
    const auto cfg = (dir / "cfg.json").string();
    write_text_file(cfg, R"({"zeta": 0.3, "nu": 0.2})");
    const json a = cli({"derive-params", "--config", cfg}).report();
    CHECK(a.at("config").at("zeta") == 0.3);
    CHECK(a.at("config").at("nu") == 0.2);
    const json b = cli({"derive-params", "--config", cfg, "--zeta", "0.1"}).report();
    CHECK(b.at("config").at("zeta") == 0.1);
    CHECK(b.at("config").at("nu") == 0.2);
    write_text_file(cfg, R"({"zeta": 0.3, "colour": "blue"})");
    CHECK(cli({"derive-params", "--config", cfg}).code == kExitUsage);
    std::filesystem::remove_all(dir);
}

TEST_CASE("instance generation and sampling") {
    const auto dir = scratch();
    const auto inst = (dir / "inst.json").string();
    const auto lab = (dir / "lab.json").string();
    const auto gen = cli({"gen-instance", "--out", inst, "--labeling_out", lab});
    REQUIRE(gen.code == kExitPass);
    CHECK(gen.report().at("results").at("planted_strong_frac") == 1.0);

    const auto pts = (dir / "pts.jsonl").string();
    const auto s1 = cli({"sample", "--instance", inst, "--n", "50", "--out", pts, "--transcript", "true"});
    REQUIRE(s1.code == kExitPass);
    CHECK(read_jsonl_file(pts).size() == 50);
    const auto s2 = cli({"sample", "--instance", inst, "--n", "50"});
    CHECK(s1.report().at("results").at("label_one_count") == s2.report().at("results").at("label_one_count"));
    CHECK(s1.report().at("results").at("digest") != s2.report().at("results").at("digest"));
    const auto s3 = cli({"sample", "--n", "50", "--transcript", "true"});
    CHECK(s3.report().at("results").at("digest") == s1.report().at("results").at("digest"));

    const auto v = cli({"verify-complete", "--instance", inst, "--labeling", lab, "--n", "2000"});
    CHECK(v.code == kExitPass);
    CHECK(v.report().at("results").at("misclassified") == 0);
    CHECK(cli({"verify-complete", "--planted", "false", "--n", "10"}).code == kExitUsage);
    std::filesystem::remove_all(dir);
}

TEST_CASE("check commands and CSV output") {
    const auto dir = scratch();
    const auto csv = (dir / "crit.csv").string();
    const auto rep = (dir / "crit.json").string();
    const auto c = cli({"critindex", "--report", rep, "--csv", csv});
    CHECK(c.code == kExitPass);
    CHECK(c.out.empty());
    CHECK(read_json_file(rep).at("results").at("brute_agrees") == true);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "key,value");

    const auto t = cli({"truncate", "--trials", "500"});
    CHECK(t.code == kExitPass);
    CHECK(t.report().at("results").at("capped") == true);

    const auto d = cli({"decode", "--repeats", "20", "--baseline", "50"});
    CHECK(d.code == kExitPass);
    CHECK(d.report().at("results").at("decode").at("best_weak").get<double>() >= 0.9);
    CHECK(cli({"decode", "--coeff_kind", "mystery"}).code == kExitUsage);
    std::filesystem::remove_all(dir);
}

TEST_CASE("replay reproduces a report") {
    const auto dir = scratch();
    const auto rep = (dir / "probe.json").string();
    const auto out = (dir / "probe-out.json").string();
    REQUIRE(cli({"probe", "--train", "300", "--test", "300", "--report", rep, "--out", out}).code == kExitPass);
    const auto again = cli({"replay", "--report", rep});
    CHECK(again.code == kExitPass);
    CHECK(again.report().at("results").at("match") == true);
    CHECK(std::filesystem::exists(out));

    json tampered = read_json_file(rep);
    tampered["results"]["features"] = -1;
    write_text_file(rep, tampered.dump());
    const auto bad = cli({"replay", "--report", rep});
    CHECK(bad.code == kExitCheckFailed);
    CHECK(bad.report().at("results").at("differing_keys") == json::array({"features"}));
    CHECK(cli({"replay"}).code == kExitUsage);
    std::filesystem::remove_all(dir);
}
