#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rtower/cli.hpp"

using namespace rtower;
using json = nlohmann::json;

namespace {

const std::string kSource = RTOWER_SOURCE_DIR;
const std::string kConfig = kSource + "/configs/default.conf";

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "rtower");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"verify", "--suite", "classes"}).code == 2);  // no alphas, no config
    CHECK(run({"verify", "--suite", "nope", "--alphas", "0,2,19,33,39"}).code == 2);
    CHECK(run({"verify", "--alphas", "0,1,2"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"classes", "--branch", "0,1,2,3,4"}).code == 2);
    CHECK(run({"symp", "--level", "2", "--check", "quotient"}).code == 2);
    CHECK(run({"--config", "/nonexistent.conf", "verify"}).code == 2);
    // Trees are only built for validated specializations.
    CHECK(run({"tree", "--alphas", "0,1,2,3,4", "--depth", "1"}).code == 2);
    CHECK(run({"tree", "--alphas", "0,2,19,33,39", "--depth", "4"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("verify --suite classes") {
    Result r = run({"verify", "--suite", "classes", "--alphas", "0,2,19,33,39"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    bool saw_count = false;
    for (const auto& c : j["checks"])
        if (c["name"] == "classes.count") {
            CHECK(c["count"] == 15);
            saw_count = true;
        }
    CHECK(saw_count);
}

TEST_CASE("flags override the config file") {
    // The config supplies a valid specialization; the flag replaces it with one the gate rejects.
    Result r = run({"--config", kConfig, "--alphas", "0,1,2,3,4", "verify", "--suite", "classes"});
    CHECK(r.code == 1);
    json j = json::parse(r.out);
    CHECK(j["alphas"][1] == "1/1");
    CHECK(j["checks"][0]["pass"] == false);

    Result seeded = run({"--config", kConfig, "--seed", "9", "verify", "--suite", "richelot"});
    CHECK(seeded.code == 0);
    CHECK(json::parse(seeded.out)["seed"] == 9);
}

TEST_CASE("load_config") {
    const cli::RunConfig c = cli::load_config(kConfig);
    REQUIRE(c.alphas);
    CHECK(c.alphas->size() == 5);
    CHECK(c.depth == 3);
    const std::string bad = "rtower_bad.conf";
    std::ofstream(bad) << "alphas = 1,2,3,4,5\ncolour = blue\n";
    CHECK_THROWS_AS(cli::load_config(bad), std::invalid_argument);
    std::remove(bad.c_str());
    CHECK(cli::parse_rationals("1/2, -3,4") == std::vector<Rational>{Rational(1, 2), Rational(-3), Rational(4)});
}

TEST_CASE("classes, push and symp") {
    Result c = run({"classes", "--branch", "0,1,2,3,4,inf", "--json-indent", "-1"});
    CHECK(c.code == 0);
    CHECK(json::parse(c.out)["count"] == 15);

    // f(5) = 5 * 3 * (-14) * (-28) * (-34) = -199920.
    Result p = run({"push", "--splitting", kSource + "/configs/splitting_example.json", "--point",
                    "5,(0/1 + (1/1)*sqrt(-199920/1))"});
    REQUIRE(p.code == 0);
    json pj = json::parse(p.out);
    CHECK(pj["on_curve"] == true);
    CHECK(pj["points"].size() == 2);
    CHECK(run({"push", "--splitting", kSource + "/configs/splitting_example.json", "--point", "5,1"}).code == 2);

    Result s = run({"symp", "--level", "1", "--check", "quotient"});
    CHECK(s.code == 0);
    CHECK(json::parse(s.out)["pass"] == true);
}

TEST_CASE("tree JSON schema") {
    Result r = run({"tree", "--alphas", "0,2,19,33,39", "--depth", "1", "--json-indent", "-1"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["depth"] == 1);
    CHECK(j["vertices"].size() == 16);
    const json& v = j["vertices"][1];
    for (const char* key : {"id", "parent", "depth", "class", "matrix", "curve", "detG"}) CHECK(v.contains(key));
    CHECK(j["vertices"][0]["parent"].is_null());
    CHECK(j["tower"].is_array());
}

TEST_CASE("reports are reproducible") {
    const std::vector<std::string> args{"--config", kConfig, "--json-indent", "-1", "verify", "--suite", "symplectic"};
    CHECK(run(args).out == run(args).out);
}
