#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "swhs/config.hpp"
#include "swhs/grid.hpp"
#include "swhs/params.hpp"
#include "swhs/report.hpp"

using namespace swhs;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// manifests repeat the output directory in artifact paths and stamp the wall
// clock; both are expected to differ between runs
std::string normalize_manifest(const std::string& text, const std::string& dir) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("wall_clock_seconds=", 0) == 0) continue;
        std::string::size_type pos;
        while ((pos = line.find(dir)) != std::string::npos) line.replace(pos, dir.size(), "@OUT@");
        out << line << '\n';
    }
    return out.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("flat and sectioned keys parse with exact numbers") {
    Config cfg = Config::parse_text(
        "p = 3/2\n"
        "tiny = 0.1\n"
        "[grid]\n"
        "r_min = 1e-3  # inline comment\n"
        "n_radial = 32\n"
        "full = true\n"
        "; another comment style\n"
        "name = hello\n",
        "inline");

    CHECK(cfg.origin() == "inline");
    CHECK(cfg.has("p"));
    CHECK(cfg.get_rational("p") == Rational(3, 2));
    CHECK(cfg.get_rational("tiny") == Rational(1, 10));
    CHECK(cfg.get_rational("grid.r_min") == Rational(1, 1000));
    CHECK(cfg.get_double("grid.r_min", 0.0) == 1e-3);
    CHECK(cfg.get_int("grid.n_radial", 0) == 32);
    CHECK(cfg.get_bool("grid.full", false));
    CHECK(cfg.get_string("grid.name") == "hello");
    CHECK(cfg.get_double("absent", 2.5) == 2.5);

    std::vector<std::string> keys = cfg.keys();
    REQUIRE(keys.size() == 6);
    CHECK(keys[0] == "p");
    CHECK(keys[2] == "grid.r_min");
    CHECK(keys[5] == "grid.name");

    SUBCASE("lookup and parse failures carry the field name") {
        try {
            cfg.get_rational("grid.name");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "grid.name");
        }
        try {
            cfg.get_string("absent");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "absent");
        }
        CHECK_THROWS_AS(Config::parse_text("novalue\n", "bad"), ConfigError);
    }
}

TEST_CASE("builders reproduce the shipped reference configuration") {
    std::string path = std::string(SWHS_CONFIG_DIR) + "/reference.cfg";
    Config cfg = Config::parse_file(path);

    InequalityParams ip = inequality_from_config(cfg);
    CHECK(ip.p == Rational(3, 2));
    CHECK(ip.q_prime == Rational(9, 8));
    CHECK(ip.alpha == Rational(0));
    CHECK(ip.mu == Rational(1));
    REQUIRE(ip.q().has_value());
    CHECK(*ip.q() == Rational(9));

    GridSpec spec = grid_from_config(cfg);
    CHECK(spec.r_min == 1e-3);
    CHECK(spec.r_max == 1e3);
    CHECK(spec.n_radial == 32);
    CHECK(spec.n_height == 32);
    CHECK(spec.spacing == Spacing::Geometric);
    CHECK(spec.mode == GridMode::Reduced);

    SolveOptions opts = solve_options_from_config(cfg);
    CHECK(opts.max_iters == 20000);
    CHECK(opts.tol_rel == 1e-9);

    SystemParams sys = system_from_config(cfg);
    CHECK(sys.p0 == Rational(2));
    CHECK(sys.q0 == Rational(8));

    CHECK(weight_convention_from_config(cfg) == WeightConvention::Sum);

    SUBCASE("convention key switches the gate") {
        Config each = Config::parse_text("convention = each\n", "inline");
        CHECK(weight_convention_from_config(each) == WeightConvention::Each);
        Config bad = Config::parse_text("convention = never\n", "inline");
        CHECK_THROWS_AS(weight_convention_from_config(bad), ConfigError);
    }
}

TEST_CASE("report values round trip through their text form") {
    for (double v : {1.0 / 3.0, 0.1, 2.220446049250313e-16, 1e308, -7.25}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }

    KvReport rep;
    rep.set("third", 1.0 / 3.0);
    rep.set("flag", true);
    rep.set("count", 7);
    rep.set("label", "text");
    std::string text = rep.to_text();
    CHECK(text.find("flag=true") != std::string::npos);
    CHECK(text.find("count=7") != std::string::npos);
    CHECK(text.find("label=text") != std::string::npos);
    REQUIRE(rep.entries().size() == 4);
    CHECK(rep.entries()[0].first == "third");
    CHECK(std::strtod(rep.entries()[0].second.c_str(), nullptr) == 1.0 / 3.0);

    std::string path = "report_roundtrip.txt";
    rep.write(path);
    CHECK(slurp(path) == text);
    std::remove(path.c_str());
}

TEST_CASE("solver runs repeat bit for bit under a fixed seed") {
    std::string cfg_path = "determinism.cfg";
    {
        std::ofstream out(cfg_path);
        out << "[params]\n"
               "p = 3/2\n"
               "q_prime = 9/8\n"
               "[grid]\n"
               "r_min = 1e-2\n"
               "r_max = 1e2\n"
               "n_radial = 12\n"
               "n_height = 12\n"
               "[solve]\n"
               "max_iters = 4000\n"
               "tol_rel = 1e-10\n";
    }

    auto run = [&](const std::string& dir) {
        std::filesystem::remove_all(dir);
        std::string cmd = std::string("\"") + SWHS_CLI_PATH + "\" sharp-constant --params " +
                          cfg_path + " --seed 99 --random-start --out " + dir +
                          " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run("det_a") == 0);
    REQUIRE(run("det_b") == 0);

    std::string fa = slurp("det_a/f.csv");
    std::string fb = slurp("det_b/f.csv");
    REQUIRE(!fa.empty());
    CHECK(fa == fb);
    CHECK(slurp("det_a/g.csv") == slurp("det_b/g.csv"));

    std::string ma = normalize_manifest(slurp("det_a/manifest.txt"), "det_a");
    std::string mb = normalize_manifest(slurp("det_b/manifest.txt"), "det_b");
    REQUIRE(!ma.empty());
    CHECK(ma == mb);

    std::filesystem::remove_all("det_a");
    std::filesystem::remove_all("det_b");
    std::remove(cfg_path.c_str());
}

}
