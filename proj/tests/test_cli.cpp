#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "leaflab/cli.hpp"
#include "leaflab/errors.hpp"

using namespace leaflab;

namespace {

struct CliRun {
    int code;
    Json report;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    Json report = Json::parse(out.str(), nullptr, false);
    return {code, report, err.str()};
}

std::set<std::string> point_set(const Json& arr) {
    std::set<std::string> s;
    for (const auto& p : arr) {
        if (p.is_string()) {
            s.insert(p.get<std::string>());
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f", p[0].get<double>() + 0.0, p[1].get<double>() + 0.0);
            s.insert(buf);
        }
    }
    return s;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("leaflab_cli_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config round trip") {
    ExperimentConfig c;
    c.command = "chart";
    c.variant = "fatou";
    c.map = Json{{"num", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}}, {"den", {{1.0, 0.0}}}};
    c.seed = 42;
    c.workers = 3;
    c.depth = 500;
    c.tol = 1e-5;
    c.out = "somewhere";
    c.params = Json{{"petal", "attracting"}, {"points", {{-0.1, 0.0}}}};
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(config_from_json(Json::parse(config_to_json(c).dump())) == c);

    ExperimentConfig d;
    d.command = "map-info";
    d.map = "quad:-1";
    CHECK(config_from_json(config_to_json(d)) == d);

    Json bad = config_to_json(d);
    bad["colour"] = "red";
    try {
        config_from_json(bad);
        FAIL("accepted an unknown field");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
    bad = config_to_json(d);
    bad["seed"] = "many";
    CHECK_THROWS_AS(config_from_json(bad), Error);
}

TEST_CASE("map-info on the Chebyshev quadratic") {
    const auto r = cli({"--map", "chebyshev:2", "map-info"});
    REQUIRE(r.code == 0);
    const Json& res = r.report["result"];
    CHECK(res["degree"] == 2);
    CHECK(res["postcritically_finite"] == true);
    std::set<std::string> crit;
    for (const auto& c : res["critical_points"]) crit.merge(point_set(Json::array({c["point"]})));
    CHECK(crit == std::set<std::string>{"0.000000,0.000000", "inf"});
    CHECK(point_set(res["postcritical_set"]) == std::set<std::string>{"-1.000000,0.000000", "1.000000,0.000000", "inf"});
    CHECK(r.report["schema"] == kReportSchema);
    CHECK(r.report["stamps"]["postcritical_depth"] == 64);
}

TEST_CASE("report echoes the effective parameters") {
    const auto r = cli({"--map", "quad:-1", "--set", "count=2", "orbit-sample", "--depth", "5"});
    REQUIRE(r.code == 0);
    const Json& p = r.report["config"]["params"];
    CHECK(p["count"] == 2);
    CHECK(p.contains("z0"));
    CHECK(r.report["config"]["depth"] == 5);
    CHECK(r.report["result"]["orbits"].size() == 2);
    CHECK(r.report["result"]["orbits"][0]["points"].size() == 6);
}

TEST_CASE("julia-render is reproducible byte for byte") {
    const auto dir_a = scratch("a"), dir_b = scratch("b");
    const std::vector<std::string> base{"--map", "quad:-1", "--set", "resolution=64", "--set", "max_iter=64"};
    auto args_a = base, args_b = base;
    args_a.insert(args_a.end(), {"--out", dir_a.string(), "julia-render"});
    args_b.insert(args_b.end(), {"--out", dir_b.string(), "--workers", "2", "julia-render"});
    const auto a = cli(args_a), b = cli(args_b);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const auto img_a = read_text_file((dir_a / "julia.pgm").string());
    const auto img_b = read_text_file((dir_b / "julia.pgm").string());
    CHECK(img_a == img_b);
    CHECK(a.report["artifacts"][0]["fnv1a64"] == b.report["artifacts"][0]["fnv1a64"]);
    CHECK(std::filesystem::exists(dir_a / "report.json"));
    const double frac = a.report["result"]["bounded_fraction"];
    CHECK(frac > 0.0);
    CHECK(frac < 1.0);
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("saved configs reproduce the run") {
    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    const auto path = (dir / "c.json").string();
    const auto a = cli({"--map", "quad:-1", "--seed", "9", "--set", "count=3", "--save-config", path, "orbit-sample",
                        "--depth", "4"});
    REQUIRE(a.code == 0);
    const auto b = cli({"--config", path, "orbit-sample"});
    REQUIRE(b.code == 0);
    CHECK(a.report["result"] == b.report["result"]);
    // Flags override the file.
    const auto c = cli({"--config", path, "--seed", "10", "orbit-sample"});
    CHECK(c.report["config"]["seed"] == 10);
    CHECK(c.report["result"] != a.report["result"]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
    CHECK(cli({"--map", "quad:-1", "frobnicate"}).code == 2);
    CHECK(cli({"--map", "cubic:banana", "map-info"}).code == 2);
    CHECK(cli({"map-info"}).code == 2);
    CHECK(cli({"--map", "quad:-1", "--set", "bogus=1", "orbit-sample"}).code == 2);
    CHECK(cli({"--map", "quad:-1", "--set", "count=\"x\"", "orbit-sample"}).code == 2);
    CHECK(cli({"--config", "/nonexistent/leaflab.json", "map-info"}).code == 2);
    CHECK(cli({"--help"}).code == 0);

    // z^2 has no parabolic point: a numerical failure, not a config one.
    const auto r = cli({"--map", "quad:0", "chart", "fatou"});
    CHECK(r.code == 3);
    CHECK(r.report["error"]["code"] == "NotParabolic");
    const auto h = cli({"hull-report", "--set", "source=\"points\"", "--set", "points=[[0,0]]"});
    CHECK(h.code == 3);
    CHECK(h.report["error"]["code"] == "DegenerateInput");
}

TEST_CASE("conical-test on the basilica") {
    const auto r = cli({"--map", "quad:-1", "conical-test"});
    REQUIRE(r.code == 0);
    CHECK(r.report["result"]["tested"] == 20);
    CHECK(r.report["result"]["conical_evidence"] == 20);
}

TEST_CASE("charts through the front end") {
    const auto k = cli({"--map", "quad:-1", "chart", "koenigs"});
    REQUIRE(k.code == 0);
    for (const auto& row : k.report["result"]["rows"]) CHECK(row["functional_residual"].get<double>() < 1e-8);

    const auto f = cli({"--map", "{\"num\": [[0,0],[1,0],[1,0]], \"den\": [[1,0]]}", "chart", "fatou"});
    REQUIRE(f.code == 0);
    for (const auto& row : f.report["result"]["rows"]) CHECK(row["functional_residual"].get<double>() < 1e-3);

    const auto b = cli({"--map", "quad:0", "chart", "bottcher"});
    REQUIRE(b.code == 0);
    for (const auto& row : b.report["result"]["rows"]) CHECK(row["functional_residual"].get<double>() < 1e-9);
}

TEST_CASE("hull-report and extend-homeo") {
    const auto h = cli({"hull-report", "--set", "source=\"circle\"", "--set", "probes=[[0,0,0.5],[2,0,1]]"});
    REQUIRE(h.code == 0);
    const Json& probes = h.report["result"]["probes"];
    CHECK(probes[0]["distance"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(probes[1]["distance"].get<double>() == doctest::Approx(std::asinh(1.0)).epsilon(1e-9));

    const auto e = cli({"extend-homeo", "--set", "phi={\"kind\":\"similarity\",\"a\":[2,0],\"b\":[1,0]}", "--set",
                        "points=[[1,1,0.5]]"});
    REQUIRE(e.code == 0);
    const Json& img = e.report["result"]["rows"][0]["image"];
    CHECK(img[0].get<double>() == doctest::Approx(3.0));
    CHECK(img[1].get<double>() == doctest::Approx(2.0));
    CHECK(img[2].get<double>() == doctest::Approx(1.0));
}
