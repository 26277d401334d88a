#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sidebandit/cli.hpp"
#include "sidebandit/results_io.hpp"

namespace fs = std::filesystem;
using sidebandit::cli::kExitFailure;
using sidebandit::cli::kExitInvalid;
using sidebandit::cli::kExitOk;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = sidebandit::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct Workspace {
    fs::path dir;
    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("sidebandit_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string write(const std::string& file, const std::string& text) const {
        std::ofstream(dir / file) << text;
        return (dir / file).string();
    }
    std::string path(const std::string& file) const { return (dir / file).string(); }
};

const char* kStd2 = R"({"means": [1, 0], "sigma": [[1, "inf"], ["inf", 1]]})";
const char* kFull2 = R"({"means": [1, 0], "sigma": [[1, 1], [1, 1]]})";

}  // namespace

TEST_CASE("subcommand is required and unknown flags are rejected") {
    CHECK(invoke({}).code == kExitInvalid);
    CHECK(invoke({"frobnicate"}).code == kExitInvalid);
    CHECK(invoke({"lp", "--bogus", "1"}).code == kExitInvalid);
    CHECK(invoke({"--help"}).code == kExitOk);
    CHECK(invoke({"run", "--help"}).code == kExitOk);
}

TEST_CASE("lp prints the solution") {
    Workspace ws("lp");
    auto r = invoke({"lp", "--instance", ws.write("std2.json", kStd2)});
    REQUIRE(r.code == kExitOk);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["status"] == "optimal");
    CHECK(doc["c_star"][0].get<double>() == doctest::Approx(2.0));
    CHECK(doc["c_star"][1].get<double>() == doctest::Approx(2.0));
    CHECK(doc["objective"].get<double>() == doctest::Approx(2.0));
    CHECK(doc["active_constraints"] == nlohmann::json::array({1, 2}));

    r = invoke({"lp", "--instance", ws.write("full2.json", kFull2)});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["objective"].get<double>() == 0.0);

    r = invoke({"lp", "--instance", ws.path("std2.json"), "--epsilon", "0", "--trials", "10"});
    REQUIRE(r.code == kExitOk);
    doc = nlohmann::json::parse(r.out);
    CHECK(doc["c_star_epsilon"][0].get<double>() == doctest::Approx(doc["c_star"][0].get<double>()));
    CHECK(doc["c_star_epsilon"][1].get<double>() == doctest::Approx(doc["c_star"][1].get<double>()));
}

TEST_CASE("invalid instances exit 2") {
    Workspace ws("bad");
    CHECK(invoke({"lp", "--instance", ws.path("absent.json")}).code == kExitInvalid);
    CHECK(invoke({"lp"}).code == kExitInvalid);
    const auto bad = ws.write("bad.json", R"({"means": [1, 0], "sigma": [[1, "inf"], ["inf", "inf"]]})");
    CHECK(invoke({"lp", "--instance", bad}).code == kExitInvalid);
    CHECK(invoke({"lp", "--instance", ws.write("junk.json", "{not json")}).code == kExitInvalid);
    CHECK(invoke({"run", "--instance", ws.path("absent.json")}).code == kExitInvalid);
}

TEST_CASE("run writes the results layout") {
    Workspace ws("run");
    const auto inst = ws.write("std2.json", kStd2);
    const auto out = ws.path("a");
    auto r = invoke({"run", "--instance", inst, "--policy", "alg1", "--horizon", "1000", "--reps", "3", "--seed",
                     "7", "--out", out, "--threads", "1"});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    for (const char* f : {"config.json", "results.csv", "results.json", "traces/rep_0000.json", "traces/rep_0002.json"}) {
        CHECK(fs::exists(fs::path(out) / f));
    }
    const auto table = sidebandit::read_results_json(fs::path(out) / "results.json");
    CHECK(table.rows.back().t == 1000);
    CHECK(table.config["horizon"] == 1000);
}

TEST_CASE("run argument errors") {
    Workspace ws("runerr");
    const auto inst = ws.write("std2.json", kStd2);
    CHECK(invoke({"run", "--instance", inst, "--policy", "etc-oracle", "--reps", "2", "--out", ws.path("x")}).code ==
          kExitInvalid);
    CHECK(invoke({"run", "--instance", inst, "--policy", "nope"}).code == kExitInvalid);
    CHECK(invoke({"run", "--instance", inst, "--reps", "1"}).code == kExitInvalid);
    CHECK(invoke({"run", "--instance", inst, "--alpha", "3", "--horizon", "100", "--reps", "2", "--out",
                  ws.path("y")})
              .code == kExitInvalid);
    CHECK(invoke({"run", "--instance", inst, "--random-k", "3"}).code == kExitInvalid);
    CHECK(invoke({"run", "--instance", inst, "--horizon", "abc"}).code == kExitInvalid);
}

TEST_CASE("config file fills flags the command line leaves unset") {
    Workspace ws("config");
    const auto inst = ws.write("std2.json", kStd2);
    const auto full = ws.write("full2.json", kFull2);

    // config only
    auto cfg = ws.write("lp.json", nlohmann::json{{"instance", inst}}.dump());
    auto r = invoke({"lp", "--config", cfg});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["objective"].get<double>() == doctest::Approx(2.0));

    // flag beats config
    r = invoke({"lp", "--config", cfg, "--instance", full});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["objective"].get<double>() == 0.0);

    // unknown key, malformed file, missing file
    CHECK(invoke({"lp", "--config", ws.write("u.json", R"({"instance": "x", "colour": 1})")}).code == kExitInvalid);
    CHECK(invoke({"lp", "--config", ws.write("m.json", "[1,2")}).code == kExitInvalid);
    CHECK(invoke({"lp", "--config", ws.path("none.json")}).code == kExitInvalid);
    CHECK(invoke({"lp", "--config", ws.write("t.json", R"({"instance": "x", "trials": "many"})")}).code ==
          kExitInvalid);

    // arrays and run options
    const auto out = ws.path("cfgrun");
    cfg = ws.write("run.json", nlohmann::json{{"instance", inst},
                                              {"horizon", 600},
                                              {"reps", 2},
                                              {"checkpoints", {100, 600}},
                                              {"out", out},
                                              {"threads", 1}}
                                   .dump());
    r = invoke({"run", "--config", cfg, "--horizon", "400", "--checkpoints", "100", "400"});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto table = sidebandit::read_results_json(fs::path(out) / "results.json");
    CHECK(table.config["horizon"] == 400);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].t == 400);
}

TEST_CASE("verify single cases") {
    auto r = invoke({"verify", "--lemma", "2a", "--L", "1", "--H", "2", "--t", "100", "--alpha", "4", "--trials", "200"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("0.0002") != std::string::npos);
    CHECK(invoke({"verify", "--lemma", "2a", "--L", "3", "--H", "2", "--trials", "10"}).code == kExitInvalid);
    CHECK(invoke({"verify", "--lemma", "3", "--alpha", "0"}).code == kExitInvalid);
    CHECK(invoke({"verify", "--lemma", "9"}).code == kExitInvalid);
    CHECK(invoke({"verify", "--lemma", "3", "--rule", "psychic"}).code == kExitInvalid);
    r = invoke({"verify", "--lemma", "2b", "--r", "8", "--eps", "1", "--trials", "500"});
    CHECK(r.code == kExitOk);
    r = invoke({"verify", "--lemma", "3", "--sigma-min", "1", "--trials", "0"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("not-run") != std::string::npos);
}

TEST_CASE("gen writes loadable instances") {
    Workspace ws("gen");
    for (std::vector<std::string> args : std::vector<std::vector<std::string>>{
             {"gen", "--kind", "standard", "--k", "3"},
             {"gen", "--kind", "full", "--k", "2", "--sigma", "0.5"},
             {"gen", "--kind", "graph", "--k", "3", "--edges", "1-2,2-3"},
             {"gen", "--kind", "random", "--k", "4", "--seed", "5"},
         }) {
        const auto file = ws.path("g.json");
        args.push_back("--out");
        args.push_back(file);
        REQUIRE(invoke(args).code == kExitOk);
        CHECK(invoke({"lp", "--instance", file}).code == kExitOk);
    }
    const auto r = invoke({"gen", "--kind", "standard", "--k", "2", "--means", "0.3", "0.9"});
    REQUIRE(r.code == kExitOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["means"][1].get<double>() == 0.9);
    CHECK(doc["sigma"][0][1] == "inf");

    CHECK(invoke({"gen", "--kind", "graph", "--k", "3", "--edges", "1-7"}).code == kExitInvalid);
    CHECK(invoke({"gen", "--kind", "cube"}).code == kExitInvalid);
    CHECK(invoke({"gen", "--k", "1"}).code == kExitInvalid);
    CHECK(invoke({"gen", "--k", "3", "--means", "1", "2"}).code == kExitInvalid);
}
