#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "escset/cli.hpp"

using namespace escset;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "escset_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("strips subcommand", "[cli]") {
    const Result r = run_cli({"strips", "--family", "F", "--param", "-1+0i", "--z", "-2+3.14159i"});
    CHECK(r.code == 0);
    CHECK(r.out == "k=1\n");

    CHECK(run_cli({"strips", "--family", "F", "--param", "-1", "--z", "-2"}).out == "none\n");
    CHECK(run_cli({"strips", "--family", "G", "--param", "-1", "--z", "2"}).out == "k=0\n");
    // lambda = -1 + i shifts the strips up by 1 unless --literal is given.
    CHECK(run_cli({"strips", "--family", "F", "--param", "-1+1i", "--z", "-2+2.2i", "--literal"}).out == "k=1\n");
    CHECK(run_cli({"strips", "--family", "F", "--param", "-1+1i", "--z", "-2+2.2i"}).out == "none\n");
    CHECK(run_cli({"strips", "--family", "F", "--param", "-1+1i", "--z", "-2+5i"}).out == "k=1\n");
    CHECK(run_cli({"strips", "--family", "F", "--param", "-1+1i", "--z", "-2+5i", "--literal"}).out == "none\n");
    CHECK(run_cli({"strips", "--family", "X", "--param", "-1", "--z", "2"}).code == 2);
}

TEST_CASE("orbit subcommand writes the orbit CSV", "[cli]") {
    const Result r = run_cli({"orbit", "--map", "F(-1,1)", "--z0", "-1", "--max-iter", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,kind,a,b\n0,F,-1,0\n1,F,2,0\n# classification=NonEscapingProven,step=1\n");
    CHECK_THAT(r.err, ContainsSubstring("NonEscapingProven{RightHalfPlaneF, 1}"));

    const Result e = run_cli({"orbit", "--map", "exp(1)", "--z0", "10"});
    CHECK(e.code == 0);
    CHECK_THAT(e.out, Catch::Matchers::EndsWith("# classification=Escaping,step=2\n"));
}

TEST_CASE("usage, parse and validation errors exit 2", "[cli]") {
    const fs::path out = scratch("never.ppm");
    const Result v = run_cli({"render", "--map", "F(1,1)", "--out", out.string()});
    CHECK(v.code == 2);
    CHECK_THAT(v.err, ContainsSubstring("Re(lambda) < 0"));

    const Result p = run_cli({"parse", "--map", "F(-1 1)"});
    CHECK(p.code == 2);
    CHECK_THAT(p.err, ContainsSubstring("5"));

    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"orbit", "--map", "F(-1,1)"}).code == 2);
    CHECK(run_cli({"orbit", "--map", "F(-1,1)", "--z0", "1", "--max-iter", "0"}).code == 2);
    CHECK(run_cli({"render", "--map", "F(-1,1)", "--out", out.string(), "--window", "1,0,0,1"}).code == 2);
    CHECK(run_cli({"render", "--map", "F(-1,1)", "--out", out.string(), "--res", "0,5"}).code == 2);
    CHECK(run_cli({"verify", "--suite", "nope"}).code == 2);
    CHECK(run_cli({"verify", "--suite", "period-shift", "--map", "comp(F(-1,1), F(-1,1))"}).code == 2);
}

TEST_CASE("parse subcommand prints the canonical form", "[cli]") {
    const Result r = run_cli({"parse", "--map", "shift( iter(exp(1),2) , 0+6.283185307i)"});
    CHECK(r.code == 0);
    CHECK(r.out == "shift(iter(exp(1+0i), 2), 0+6.283185307i)\n");
}

TEST_CASE("render writes PPM and CSV", "[cli]") {
    const fs::path ppm = scratch("f.ppm");
    const fs::path csv = scratch("f.csv");
    const Result r = run_cli({"render", "--map", "F(-1,1)", "--window", "-30,5,-20,20", "--res", "70,40", "--out",
                              ppm.string(), "--csv", csv.string(), "--workers", "2"});
    REQUIRE(r.code == 0);
    CHECK_THAT(r.err, ContainsSubstring("escaping="));
    const std::string bytes = slurp(ppm);
    CHECK(bytes.size() == std::string("P6\n70 40\n255\n").size() + 70 * 40 * 3);
    CHECK(bytes.rfind("P6\n70 40\n255\n", 0) == 0);

    std::ifstream in(csv);
    const auto rows = read_field_csv(in);
    CHECK(rows.size() == 70 * 40);

    // Same field in-process gives the same bytes.
    const EscapeField f = classify_grid(MapExpr::family_f(-1.0, 1.0), {-30, 5, -20, 20}, 70, 40, {}, 1);
    std::ostringstream expect;
    render_ppm(f, expect);
    CHECK(bytes == expect.str());

    const fs::path marked = scratch("m.ppm");
    REQUIRE(run_cli({"render", "--map", "F(-1,1)", "--window", "-30,5,-20,20", "--res", "70,40", "--out",
                     marked.string(), "--overlay-strips"})
                .code == 0);
    CHECK(slurp(marked) != bytes);
    CHECK(slurp(marked).find("\xff\xff\xff") != std::string::npos);

    CHECK(run_cli({"render", "--map", "exp(1)", "--out", marked.string(), "--res", "4,4", "--overlay-strips"}).code == 2);
}

TEST_CASE("render output is byte-identical across runs and worker counts", "[cli][property]") {
    const fs::path a = scratch("a.ppm");
    const fs::path b = scratch("b.ppm");
    REQUIRE(run_cli({"render", "--map", "G(-1,-1)", "--window", "-5,30,-20,20", "--res", "90,60", "--out", a.string(),
                     "--workers", "1"})
                .code == 0);
    REQUIRE(run_cli({"render", "--map", "G(-1,-1)", "--window", "-5,30,-20,20", "--res", "90,60", "--out", b.string(),
                     "--workers", "4"})
                .code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("verify disjointness with a seed passes", "[cli][verify]") {
    const Result r = run_cli({"verify", "--suite", "disjointness", "--seed", "7"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["suite_name"] == "disjointness");
    CHECK(j["verdict"] == "pass");
}

TEST_CASE("verify exits 1 on violations", "[cli][verify]") {
    const Result r =
        run_cli({"verify", "--suite", "disjointness", "--map2", "F(-1,1)", "--res", "100,100"});
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.out)["verdict"] == "fail");
}

TEST_CASE("verify output is deterministic", "[cli][verify][property]") {
    const std::vector<std::string> args = {"verify", "--suite", "conjugacy", "--seed", "5", "--samples", "300"};
    const Result a = run_cli(args);
    std::vector<std::string> more = args;
    more.insert(more.end(), {"--workers", "3"});
    const Result b = run_cli(more);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("config file supplies values and flags override them", "[cli][config]") {
    const fs::path conf = scratch("orbit.conf");
    {
        std::ofstream c(conf);
        c << "# orbit settings\n"
          << "map = F(-1, 1)\n"
          << "z0 = -1   # seed\n"
          << "max_iter = 3\n";
    }
    const Result r = run_cli({"orbit", "--config", conf.string()});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("1,F,2,0"));

    const Result o = run_cli({"orbit", "--config", conf.string(), "--z0", "5"});
    CHECK(o.code == 0);
    CHECK(o.out == "n,kind,a,b\n0,F,5,0\n# classification=NonEscapingProven,step=0\n");

    const fs::path render_conf = scratch("render.conf");
    const fs::path ppm = scratch("conf.ppm");
    {
        std::ofstream c(render_conf);
        c << "map = G(-1,-1)\nwindow = -5,30,-20,20\nnx = 12\nny = 8\noverlay_strips = true\nout = " << ppm.string()
          << "\n";
    }
    REQUIRE(run_cli({"render", "--config", render_conf.string()}).code == 0);
    CHECK(slurp(ppm).size() == std::string("P6\n12 8\n255\n").size() + 12 * 8 * 3);

    const fs::path bad = scratch("bad.conf");
    {
        std::ofstream c(bad);
        c << "map F(-1,1)\n";
    }
    CHECK(run_cli({"orbit", "--config", bad.string(), "--z0", "1"}).code == 2);
    CHECK(run_cli({"orbit", "--config", scratch("missing.conf").string(), "--z0", "1"}).code == 2);
}

TEST_CASE("verify all reports every suite", "[cli][verify][slow]") {
    const Result r = run_cli({"verify", "--suite", "all", "--seed", "3"});
    std::vector<std::string> names;
    bool any_fail = false;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
        const auto j = nlohmann::json::parse(line);
        names.push_back(j["suite_name"]);
        any_fail = any_fail || j["verdict"] == "fail";
    }
    CHECK(names.size() == 9);
    CHECK(r.code == (any_fail ? 1 : 0));
    INFO(r.err);
    CHECK_FALSE(any_fail);
}
