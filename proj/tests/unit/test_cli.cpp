#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prony/cli.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run prony_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "prony");
    std::ostringstream out, err;
    Run r;
    r.code = prony::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("prony_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* classic_problem = R"({
  "kind": "classic",
  "config": { "kappa": 2 },
  "truth": { "modes": [ { "gamma": 0.0, "coeffs": [[1, 0]] }, { "gamma": 0.5, "coeffs": [[1, 0]] } ] }
})";

const char* channel_problem = R"({
  "kind": "channel",
  "config": { "kappa": 2 },
  "truth": { "modes": [ { "gamma": [0.2, 0.7], "coeffs": [[1, 0.5]] }, { "gamma": [0.6, 0.1], "coeffs": [[-0.4, 0]] } ] }
})";

const char* confluent_problem = R"({
  "kind": "confluent",
  "setup": { "D": 1 },
  "config": { "kappa": 2 },
  "truth": { "modes": [ { "gamma": 0.125, "coeffs": [[1, 0], [0.5, -0.25]] }, { "gamma": 0.6, "coeffs": [[-0.75, 0.5]] } ] }
})";

const char* dynamical_problem = R"({
  "kind": "dynamical",
  "setup": {
    "A": [[[0, 0.7], [1, 0], [0, 0]], [[0, 0], [0, 0.7], [0, 0]], [[0, 0], [0, 0], [0, 2.1]]],
    "basis": [
      { "lambda": [0, 0.7], "vectors": [[1, 0, 0], [0, 1, 0]] },
      { "lambda": [0, 2.1], "vectors": [[0, 0, 1]] }
    ],
    "sample_basis": "fourier",
    "I": [1]
  },
  "config": { "kappa": 2 },
  "truth": { "modes": [ { "gamma": [0, 0.7], "coeffs": [[1, 0.5], [-0.8, 0.2]] }, { "gamma": [0, 2.1], "coeffs": [1.3] } ] }
})";

double cabs(const Json& z) { return std::hypot(z[0].get<double>(), z[1].get<double>()); }

}  // namespace

TEST_CASE("synth writes the classic measurements") {
    TempDir dir;
    const auto in = dir.file("p.json", classic_problem);
    const auto r = prony_cli({"synth", in, "-o", dir.path("m.json")});
    CHECK(r.code == 0);
    const Json m = Json::parse(slurp(dir.path("m.json")));
    CHECK(m["kind"] == "classic");
    CHECK(m["L"] == 3);
    const std::vector<double> expected{2.0, 0.0, 2.0, 0.0};
    REQUIRE(m["measurements"].size() == 4);
    for (std::size_t l = 0; l < 4; ++l) {
        CHECK(std::abs(m["measurements"][l][0][0].get<double>() - expected[l]) < 1e-15);
        CHECK(std::abs(m["measurements"][l][0][1].get<double>()) < 1e-15);
    }
}

TEST_CASE("missing kappa is an input error naming the field") {
    TempDir dir;
    const auto in = dir.file("p.json", R"({"kind": "classic", "config": {}, "truth": {"modes": []}})");
    const auto r = prony_cli({"synth", in});
    CHECK(r.code == 2);
    CHECK(r.err.find("\"kappa\"") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
    TempDir dir;
    const auto in = dir.file("p.json", "{\"kind\": \"classic\",\n  \"config\": {\"kappa\": 2,}\n}");
    const auto r = prony_cli({"synth", in});
    CHECK(r.code == 2);
    CHECK(r.err.find("p.json:2:") != std::string::npos);
}

TEST_CASE("field errors report the JSON path") {
    TempDir dir;
    const auto in = dir.file("p.json", R"({"kind": "classic", "config": {"kappa": 2},
        "truth": {"modes": [{"gamma": 0.1, "coeffs": [[1, 0]]}, {"gamma": "x", "coeffs": [1]}]}})");
    const auto r = prony_cli({"synth", in});
    CHECK(r.code == 2);
    CHECK(r.err.find("/truth/modes/1/gamma") != std::string::npos);
}

TEST_CASE("inconsistent sizes are input errors") {
    TempDir dir;
    SUBCASE("L below the requirement") {
        Json p = Json::parse(classic_problem);
        p["L"] = 2;
        CHECK(prony_cli({"synth", dir.file("p.json", p.dump())}).code == 2);
    }
    SUBCASE("ragged measurements") {
        const auto in = dir.file("m.json", R"({"kind": "classic", "config": {"kappa": 1}, "measurements": [[1], [1, 2]]})");
        CHECK(prony_cli({"recover", in}).code == 2);
    }
    SUBCASE("too few measurements") {
        const auto in = dir.file("m.json", R"({"kind": "classic", "config": {"kappa": 3}, "measurements": [[1], [1], [1]]})");
        const auto r = prony_cli({"recover", in});
        CHECK(r.code == 2);
        CHECK(r.err.find("not enough measurements") != std::string::npos);
    }
    SUBCASE("unknown kind") {
        CHECK(prony_cli({"synth", dir.file("p.json", R"({"kind": "wavelet"})")}).code == 2);
    }
    SUBCASE("unknown tolerance") {
        const auto in = dir.file("p.json", classic_problem);
        CHECK(prony_cli({"synth", in, "--tolerance", "nope=1"}).code == 2);
    }
}

TEST_CASE("I/O failures exit with 3") {
    TempDir dir;
    const auto in = dir.file("p.json", classic_problem);
    CHECK(prony_cli({"synth", in, "-o", dir.path("missing/dir/out.json")}).code == 3);
    CHECK(prony_cli({"recover", dir.path("absent.json")}).code == 3);
}

TEST_CASE("synth then recover reproduces the truth") {
    TempDir dir;
    const std::vector<std::pair<std::string, const char*>> problems{
        {"classic", classic_problem}, {"channel", channel_problem}, {"confluent", confluent_problem}, {"dynamical", dynamical_problem}};
    for (const auto& [name, text] : problems) {
        CAPTURE(name);
        const auto in = dir.file(name + ".json", text);
        REQUIRE(prony_cli({"synth", in, "-o", dir.path(name + ".m.json")}).code == 0);
        const auto r = prony_cli({"recover", dir.path(name + ".m.json")});
        CHECK(r.code == 0);
        const Json rep = Json::parse(r.out);
        CHECK(rep["kind"] == "report");
        CHECK(rep["status"] == "clean");
        const Json truth = Json::parse(text)["truth"]["modes"];
        const Json& got = rep["model"]["modes"];
        REQUIRE(got.size() == truth.size());
        // Truth files list modes in the same lexicographic order as reports.
        for (std::size_t k = 0; k < truth.size(); ++k) {
            if (truth[k]["gamma"].is_array()) {
                CHECK(std::abs(got[k]["gamma"][0].get<double>() - truth[k]["gamma"][0].get<double>()) < 1e-6);
                CHECK(std::abs(got[k]["gamma"][1].get<double>() - truth[k]["gamma"][1].get<double>()) < 1e-6);
            } else {
                CHECK(std::abs(got[k]["gamma"].get<double>() - truth[k]["gamma"].get<double>()) < 1e-7);
            }
            for (std::size_t j = 0; j < truth[k]["coeffs"].size(); ++j) {
                const Json& t = truth[k]["coeffs"][j];
                const Json tz = t.is_array() ? t : Json::array({t.get<double>(), 0.0});
                const Json diff = Json::array({got[k]["coeffs"][j][0].get<double>() - tz[0].get<double>(),
                                               got[k]["coeffs"][j][1].get<double>() - tz[1].get<double>()});
                CHECK(cabs(diff) < 1e-5);
            }
        }
    }
}

TEST_CASE("report layout") {
    TempDir dir;
    REQUIRE(prony_cli({"synth", dir.file("p.json", classic_problem), "-o", dir.path("m.json")}).code == 0);
    SUBCASE("field order without timing") {
        const Json rep = Json::parse(prony_cli({"recover", dir.path("m.json")}).out);
        std::vector<std::string> keys;
        for (const auto& [k, v] : rep.items()) keys.push_back(k);
        const std::vector<std::string> expected{"kind", "status", "instance", "config", "model", "annihilator",
                                                "residuals", "diagnostics"};
        CHECK(keys == expected);
        CHECK(rep["annihilator"]["hankel_rank"] == 2);
    }
    SUBCASE("timing on request") {
        const Json rep = Json::parse(prony_cli({"recover", dir.path("m.json"), "--timing"}).out);
        CHECK(rep.contains("timing"));
        CHECK(rep["timing"]["recover_ms"].get<double>() >= 0.0);
    }
    SUBCASE("serialization round trip") {
        const std::string text = prony_cli({"recover", dir.path("m.json")}).out;
        CHECK(Json::parse(text).dump(2) + "\n" == text);
    }
}

TEST_CASE("zero measurements give an empty clean report") {
    TempDir dir;
    const auto in = dir.file("m.json", R"({"kind": "classic", "config": {"kappa": 2}, "measurements": [[0], [0], [0], [0]]})");
    const auto r = prony_cli({"recover", in});
    CHECK(r.code == 0);
    const Json rep = Json::parse(r.out);
    CHECK(rep["model"]["modes"].empty());
    CHECK(rep["annihilator"]["hankel_rank"] == 0);
}

TEST_CASE("too many modes for kappa complete with warnings") {
    TempDir dir;
    Json p = Json::parse(classic_problem);
    p["config"]["kappa"] = 3;
    p["truth"]["modes"].push_back(Json{{"gamma", 0.3}, {"coeffs", Json::array({Json::array({0.7, 0.2})})}});
    REQUIRE(prony_cli({"synth", dir.file("p.json", p.dump()), "-o", dir.path("m.json")}).code == 0);
    const auto cfg = dir.file("cfg.json", R"({"kappa": 2})");
    const auto r = prony_cli({"recover", dir.path("m.json"), "--config", cfg});
    CHECK(r.code == 1);
    const Json rep = Json::parse(r.out);
    CHECK(rep["status"] == "warnings");
    CHECK(rep["annihilator"]["rank_saturated"] == true);
    bool saturation = false;
    for (const auto& w : rep["diagnostics"]["warnings"]) saturation |= w.get<std::string>().find("rank saturation") == 0;
    CHECK(saturation);
}

TEST_CASE("spurious roots complete with warnings") {
    TempDir dir;
    // 2^l i^l is annihilated by z - 2i, which has no preimage on the unit circle.
    const auto in = dir.file("m.json", R"({"kind": "classic", "config": {"kappa": 1},
        "measurements": [[[1, 0]], [[0, 2]], [[-4, 0]], [[0, -8]]]})");
    const auto r = prony_cli({"recover", in});
    CHECK(r.code == 1);
    const Json rep = Json::parse(r.out);
    REQUIRE(rep["diagnostics"]["spurious_roots"].size() == 1);
    CHECK(std::abs(rep["diagnostics"]["spurious_roots"][0][1].get<double>() - 2.0) < 1e-12);
}

TEST_CASE("validate-symbol examples") {
    TempDir dir;
    SUBCASE("default channel setup passes") {
        const auto r = prony_cli({"validate-symbol", dir.file("p.json", R"({"kind": "channel"})")});
        CHECK(r.code == 0);
        CHECK(Json::parse(r.out)["status"] == "pass");
    }
    SUBCASE("single-term channel setup fails") {
        const auto r = prony_cli({"validate-symbol", dir.file("p.json",
                                                             R"({"kind": "channel", "setup": {"shift_terms": [{"b": 1, "g": [1, 1]}]}})"),
                                  "--grid", "16"});
        CHECK(r.code == 1);
        const Json rep = Json::parse(r.out);
        CHECK(rep["status"] == "fail");
        CHECK(rep["injective"] == false);
    }
    SUBCASE("classic setup passes") {
        CHECK(prony_cli({"validate-symbol", dir.file("p.json", R"({"kind": "classic"})")}).code == 0);
    }
    SUBCASE("aliased dynamical spectrum fails") {
        const auto in = dir.file("p.json", R"({"kind": "dynamical", "setup": {
            "A": [[0, 0], [0, [0, 6.283185307179586]]],
            "basis": [{"lambda": 0, "vectors": [[1, 0]]}, {"lambda": [0, 6.283185307179586], "vectors": [[0, 1]]}],
            "I": [0]}})");
        CHECK(prony_cli({"validate-symbol", in}).code == 1);
    }
}

TEST_CASE("reports are byte-identical across runs") {
    TempDir dir;
    const auto in = dir.file("p.json", channel_problem);
    const auto a = prony_cli({"synth", in, "--seed", "5"});
    const auto b = prony_cli({"synth", in, "--seed", "5"});
    CHECK(a.out == b.out);
    dir.file("m.json", a.out);
    CHECK(prony_cli({"recover", dir.path("m.json")}).out == prony_cli({"recover", dir.path("m.json")}).out);
}

TEST_CASE("noise and seeds") {
    TempDir dir;
    Json p = Json::parse(classic_problem);
    p["noise_sigma"] = 1e-3;
    const auto in = dir.file("p.json", p.dump());
    const auto a = prony_cli({"synth", in, "--seed", "1"});
    const auto b = prony_cli({"synth", in, "--seed", "2"});
    CHECK(a.code == 0);
    CHECK(a.out != b.out);
    CHECK(Json::parse(a.out)["seed"] == 1);
}

TEST_CASE("plot writes an SVG") {
    TempDir dir;
    REQUIRE(prony_cli({"synth", dir.file("p.json", channel_problem), "-o", dir.path("m.json")}).code == 0);
    CHECK(prony_cli({"recover", dir.path("m.json"), "--plot", dir.path("plot.svg"), "-o", dir.path("r.json")}).code == 0);
    const std::string svg = slurp(dir.path("plot.svg"));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("batch runs every input and reports the worst exit code") {
    TempDir dir;
    const auto a = dir.file("a.json", classic_problem);
    const auto b = dir.file("b.json", channel_problem);
    const auto bad = dir.file("bad.json", R"({"kind": "classic"})");
    const auto synth = prony_cli({"batch", "--command", "synth", "--output-dir", dir.path("out"), a, b});
    CHECK(synth.code == 0);
    const Json summary = Json::parse(synth.out);
    CHECK(summary["kind"] == "batch");
    REQUIRE(summary["results"].size() == 2);
    CHECK(fs::exists(dir.path("out/a.measurements.json")));
    CHECK(fs::exists(dir.path("out/b.measurements.json")));

    const auto rec = prony_cli({"batch", "--output-dir", dir.path("rep"), dir.path("out/a.measurements.json"),
                                dir.path("out/b.measurements.json")});
    CHECK(rec.code == 0);
    CHECK(fs::exists(dir.path("rep/a.measurements.report.json")));

    const auto mixed = prony_cli({"batch", "--command", "synth", "--output-dir", dir.path("mixed"), a, bad});
    CHECK(mixed.code == 2);
    CHECK(Json::parse(mixed.out)["results"][1]["exit_code"] == 2);
}

TEST_CASE("usage errors") {
    CHECK(prony_cli({}).code == 2);
    CHECK(prony_cli({"frobnicate"}).code == 2);
    CHECK(prony_cli({"--help"}).code == 0);
}
