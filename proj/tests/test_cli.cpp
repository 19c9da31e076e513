#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* p = std::getenv("THINFILM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const int status = std::system((cli() + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("thinfilm_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("maps writes one table per q and is byte stable") {
    const fs::path a = scratch("maps_a"), b = scratch("maps_b");
    REQUIRE(run("maps --q 0.5,2.5 --alpha-grid 0.1:0.9:9 --out " + a.string()) == 0);
    REQUIRE(run("maps --q 0.5,2.5 --alpha-grid 0.1:0.9:9 --out " + b.string()) == 0);
    for (const char* f : {"maps_q0.5.csv", "maps_q2.5.csv"}) {
        const std::string x = slurp(a / f);
        CHECK(x.rfind("alpha,P,A,I2,E,dE,F\n", 0) == 0);
        CHECK(std::count(x.begin(), x.end(), '\n') == 10);
        CHECK(x == slurp(b / f));
    }
}

TEST_CASE("classify emits a versioned verdict") {
    const fs::path d = scratch("classify");
    REQUIRE(run("classify --q -3 --alpha 0.5 --out " + d.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(d / "classify.json"));
    CHECK(j.contains("tool_version"));
    CHECK(j["results"][0]["verdict"]["verdict"] == "energy_unstable");
}

TEST_CASE("levels, droplet, tango and crossings run") {
    const fs::path d = scratch("misc");
    CHECK(run("levels --q 2.5 --X 6 --area 6 --out " + d.string()) == 0);
    CHECK(fs::exists(d / "levels.json"));
    CHECK(run("droplet --q 2 --area 3 --out " + d.string()) == 0);
    CHECK(fs::exists(d / "droplet.json"));
    CHECK(run("crossings --out " + d.string()) == 0);
    const auto c = nlohmann::json::parse(slurp(d / "crossings.json"));
    CHECK(c["crossings"].size() >= 4);
}

TEST_CASE("evolve writes manifest, series and snapshots") {
    const fs::path d = scratch("evolve");
    REQUIRE(run("evolve --q 2.5 --alpha 0.5 --state periodic --eps 1e-3 --direction hsecond --out " + d.string()) == 0);
    const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(m.contains("termination"));
    CHECK(fs::exists(d / "series.csv"));
    CHECK(fs::exists(d / "snapshot_000.csv"));
}

TEST_CASE("evolve with a seeded random direction is byte stable") {
    const fs::path a = scratch("rand_a"), b = scratch("rand_b");
    const std::string args = "evolve --q -3 --alpha 0.5 --state periodic --eps 1e-3 --direction random --seed 11 --out ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string()) == 0);
    for (const char* f : {"manifest.json", "series.csv", "snapshot_000.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("config file supplies options") {
    const fs::path d = scratch("config");
    fs::create_directories(d);
    std::ofstream(d / "run.toml") << "q = [2.5]\nalpha-grid = \"0.2,0.4\"\n";
    REQUIRE(run("maps --config " + (d / "run.toml").string() + " --out " + d.string()) == 0);
    const std::string x = slurp(d / "maps_q2.5.csv");
    CHECK(std::count(x.begin(), x.end(), '\n') == 3);
}

TEST_CASE("exit codes") {
    CHECK(run("") == 2);
    CHECK(run("maps --no-such-flag 1") == 2);
    CHECK(run("classify --q 2.5 --alpha 1.5") == 2);
    CHECK(run("classify --q 2.5 --bond -1 --alpha 0.5") == 2);
    CHECK(run("evolve --q 3.5 --alpha 0.5 --out " + scratch("bad").string()) == 2);
    CHECK(run("--help") == 0);
}
