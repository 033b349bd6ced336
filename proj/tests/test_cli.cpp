#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "spdelab_cli";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = std::string(SPDE_LAB_EXE) + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("repeat runs are byte-identical") {
    fs::remove_all(kRoot);
    const auto a = kRoot / "a", b = kRoot / "b";
    const std::string common = "spde-martingale --paths 1 --seed 7 --horizon 0.01 --grid 16 --quiet";
    REQUIRE(run(common + " --out " + a.string(), (kRoot.string() + "_a.txt")) != -1);
    REQUIRE(run(common + " --out " + b.string(), (kRoot.string() + "_b.txt")) != -1);
    for (const char* f : {"summary.json", "config.echo.json", "series.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(kRoot.string() + "_a.txt") == slurp(kRoot.string() + "_b.txt"));
}

TEST_CASE("worker count does not change the outputs") {
    const auto a = kRoot / "w1", b = kRoot / "w8";
    const std::string common = "lp-norms --paths 9 --horizon 0.01 --grid 16 --quiet";
    run(common + " --workers 1 --out " + a.string());
    run(common + " --workers 8 --out " + b.string());
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
}

TEST_CASE("malformed config exits 2 without writing outputs") {
    fs::create_directories(kRoot);
    const auto cfg = kRoot / "bad.json";
    std::ofstream(cfg) << "{\"paths\": 10, \"gamma\": }";
    const auto out = kRoot / "bad_out";
    CHECK(run("spde-martingale --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));

    const auto unknown = kRoot / "unknown.json";
    std::ofstream(unknown) << "{\"gama\": 2}";
    CHECK(run("spde-martingale --config " + unknown.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run("spde-martingale --grid 2 --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run("no-such-command") == 2);
}

TEST_CASE("config files drive runs and flags override them") {
    const auto cfg = kRoot / "good.json";
    std::ofstream(cfg) << R"({"kind": "lp-norms", "paths": 3, "horizon": 0.01, "grid": 16})";
    const auto out = kRoot / "good_out";
    CHECK(run("lp-norms --config " + cfg.string() + " --paths 4 --quiet --out " + out.string()) == 0);
    CHECK(slurp(out / "config.echo.json").find("\"paths\": 4") != std::string::npos);
    CHECK(run("blowup-scan --config " + cfg.string() + " --out " + (kRoot / "mismatch").string()) == 2);
}

TEST_CASE("verdict sets the exit status") {
    // Constant u0 with sup above every level far below 1/n: passes.
    CHECK(run("sode-bounds --paths 50 --horizon 0.5 --quiet --out " + (kRoot / "sb").string()) == 0);
}

TEST_CASE("plot subcommand") {
    const auto dir = kRoot / "w1";
    const auto line = kRoot / "line.svg";
    CHECK(run("plot --input " + dir.string() + " --functional L4 --out " + line.string()) == 0);
    CHECK(slurp(line).rfind("<svg", 0) == 0);
    const auto hist = kRoot / "hist.svg";
    CHECK(run("plot --input " + (dir / "series.csv").string() + " --functional L4 --type hist --out " + hist.string()) == 0);
    CHECK(slurp(hist).find("<rect") != std::string::npos);
    CHECK(run("plot --input " + dir.string() + " --functional nope --out " + (kRoot / "x.svg").string()) != 0);
    CHECK(run("plot --input " + (kRoot / "missing").string() + " --out " + (kRoot / "y.svg").string()) == 2);
}
