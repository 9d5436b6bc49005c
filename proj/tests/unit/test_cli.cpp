#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsheet/cli.hpp"
#include "vsheet/measure_io.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/spirals.hpp"

using namespace vsheet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vsheet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("vsheet_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string file(const char* name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"energy", "--measure", "x.json", "--bogus", "1"}).code == 2);
    CHECK(cli({"energy"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"--version"}).out.find(kVersion) != std::string::npos);
    const auto missing = cli({"energy", "--measure", file("does_not_exist.json")});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("load-error") != std::string::npos);
}

TEST_CASE("generate round trip") {
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    const auto path = file("spiral.json");
    const auto r = cli({"generate", "prandtl", "--b", "0.2", "--mu", "0.5", "--p", "1", "--t", "0", "--gamma-max", "1",
                        "--n", "4096", "--out", path});
    REQUIRE(r.code == 0);
    const std::string text = read_text_file(path);
    const auto loaded = parse_curve_json(text);
    const auto direct = prandtl_curve({0.2, 0.5, 1.0, 0.0}, {1.0, 4096, 2.0});
    CHECK(format_curve_json(loaded) == format_curve_json(direct));

    const auto j = json::parse(text);
    CHECK(j["manifest"]["subcommand"] == "generate prandtl");
    CHECK(j["manifest"]["parameters"]["b"] == 0.2);
    CHECK(j["manifest"]["parameters"]["n"] == 4096.0);
    CHECK(j["manifest"]["timestamp"] == "2023-11-14T22:13:20Z");
    CHECK(j["metadata"]["family"] == "prandtl");

    // identical manifest, identical bytes
    REQUIRE(cli({"generate", "prandtl", "--n", "4096", "--out", file("spiral2.json")}).code == 0);
    CHECK(json::parse(read_text_file(file("spiral2.json")))["metadata"] == j["metadata"]);
    REQUIRE(cli({"generate", "prandtl", "--b", "0.2", "--mu", "0.5", "--p", "1", "--t", "0", "--gamma-max", "1",
                 "--n", "4096", "--out", path})
                .code == 0);
    CHECK(read_text_file(path) == text);
}

TEST_CASE("fit-alpha and scaling plot data") {
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    const auto spiral = file("fit_spiral.json");
    REQUIRE(cli({"generate", "prandtl", "--n", "4096", "--out", spiral}).code == 0);
    const auto r = cli({"fit-alpha", "--measure", spiral, "--r-min", "0.01", "--r-max", "0.5"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["fit"]["alpha_hat"].get<double>() == doctest::Approx(2.0).epsilon(0.01));
    CHECK(j["manifest"]["inputs"][spiral] == hex_digest(fnv1a(read_text_file(spiral))));
    CHECK(j["metadata_hash"].is_string());

    write_text_file(file("fit.json"), r.out);
    const auto csv = cli({"report", "--in", file("fit.json"), "--kind", "scaling"});
    REQUIRE(csv.code == 0);
    std::istringstream in(csv.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "ln_r,ln_mass");
    std::vector<double> x, y;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        x.push_back(std::stod(line.substr(0, comma)));
        y.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(x.size() == 25);
    CHECK(fit_line(x, y).slope == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("report rejects missing series") {
    write_text_file(file("empty.json"), "{}");
    const auto r = cli({"report", "--in", file("empty.json"), "--kind", "scaling"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing-series") != std::string::npos);
    CHECK(cli({"report", "--in", file("empty.json"), "--kind", "pie"}).code == 2);
}

TEST_CASE("energy report through the command line") {
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    const auto circle = file("circle.json");
    REQUIRE(cli({"generate", "circle", "--n", "256", "--out", circle}).code == 0);
    const std::vector<std::string> args = {"energy", "--measure", circle, "--s", "0.5", "--method", "all",
                                           "--cutoff", "64", "--refinements", "1"};
    const auto a = cli(args);
    const auto b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    CHECK(j["energy"]["max_relative_spread"].get<double>() < 0.02);
    CHECK(j["energy"]["refinement_series"].size() == 2);
    CHECK(j["manifest"]["parameters"]["method"] == "all");
    CHECK(j["manifest"]["parameters"]["grid-angular"] == 16.0);

    write_text_file(file("energy.json"), a.out);
    CHECK(cli({"report", "--in", file("energy.json"), "--kind", "cutoff"}).code == 0);
    CHECK(cli({"report", "--in", file("energy.json"), "--kind", "refinement"}).out.rfind("segments,direct\n256,", 0) == 0);
}

TEST_CASE("strict mode turns divergence into exit code 3") {
    write_text_file(file("dirac.csv"), "x,y,weight\n0,0,1\n");
    const auto plain = cli({"hminus1", "--measure", file("dirac.csv"), "--cutoff", "100"});
    CHECK(plain.code == 0);
    CHECK(json::parse(plain.out)["divergence_flags"][0] == "h_minus1_growth");
    CHECK(cli({"--strict", "hminus1", "--measure", file("dirac.csv"), "--cutoff", "100"}).code == 3);
    CHECK(cli({"hminus1", "--measure", file("dirac.csv"), "--strict"}).code == 3);

    const auto circle = file("strict_circle.json");
    REQUIRE(cli({"generate", "circle", "--n", "256", "--out", circle}).code == 0);
    CHECK(cli({"--strict", "hminus1", "--measure", circle, "--cutoff", "100"}).code == 0);
}

TEST_CASE("remaining analysis subcommands") {
    const auto kaden = file("kaden.json");
    REQUIRE(cli({"generate", "kaden", "--n", "2048", "--out", kaden}).code == 0);
    const auto fit = cli({"fit-alpha", "--measure", kaden, "--r-min", "0.05", "--r-max", "0.9"});
    REQUIRE(fit.code == 0);
    CHECK(json::parse(fit.out)["fit"]["alpha_hat"].get<double>() == doctest::Approx(0.5).epsilon(0.02));

    const auto bounds = cli({"check-bounds", "--measure", kaden, "--alpha", "0.5", "--samples", "500", "--strict"});
    REQUIRE(bounds.code == 0);
    CHECK(json::parse(bounds.out)["bounds"]["regime"] == "alpha_below_one");

    const auto embed = cli({"check-embedding", "--measure", kaden, "--cutoffs", "10", "40"});
    REQUIRE(embed.code == 0);
    CHECK(json::parse(embed.out)["embedding"]["holds"] == true);

    const auto morrey = cli({"morrey", "--measure", kaden, "--p", "1.5"});
    REQUIRE(morrey.code == 0);
    CHECK(json::parse(morrey.out)["morrey"]["value"].get<double>() > 0.0);

    const auto ball = cli({"ball-mass", "--measure", kaden, "--r", "0.25", "1.0"});
    REQUIRE(ball.code == 0);
    CHECK(json::parse(ball.out)["masses"][0].get<double>() == doctest::Approx(0.5).epsilon(2e-3));

    const auto seg = file("segment.json");
    REQUIRE(cli({"generate", "segment", "--n", "8", "--out", seg}).code == 0);
    CHECK(cli({"generate", "self-similar", "--m", "0.8", "--f-power", "-0.8", "--g-power", "1", "--out",
               file("selfsim.json")})
              .code == 0);
    CHECK(cli({"check-bounds", "--measure", file("dirac.csv")}).code == 2);
}

TEST_CASE("evolve writes JSON lines and snapshots") {
    write_text_file(file("pair.csv"), "x,y,dgamma\n-0.5,0,6.283185307179586\n0.5,0,6.283185307179586\n");
    const auto snaps = workdir() / "snaps";
    const auto r = cli({"evolve", "--sheet", file("pair.csv"), "--delta", "0", "--dt", "0.001", "--steps", "20",
                        "--observe-every", "10", "--snapshot-dir", snaps.string(), "--final-state", file("final.csv"),
                        "--out", file("traj.jsonl")});
    REQUIRE(r.code == 0);
    std::istringstream in(read_text_file(file("traj.jsonl")));
    std::vector<json> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0].contains("manifest"));
    CHECK(lines[1]["step"] == 0);
    CHECK(lines[3]["step"] == 20);
    CHECK(lines[4]["final"]["blow_up"] == false);
    CHECK(fs::exists(snaps / "state_00000010.csv"));
    CHECK(parse_atomic_csv("x,y,weight\n0,0,1\n").size() == 1);
    CHECK(read_text_file(file("final.csv")).rfind("x,y,dgamma\n", 0) == 0);

    const auto csv = cli({"report", "--in", file("traj.jsonl"), "--kind", "trajectory"});
    REQUIRE(csv.code == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);

    CHECK(cli({"evolve", "--delta", "0.1"}).code == 2);
}

TEST_CASE("collapse series") {
    const auto r = cli({"collapse", "--p", "-1", "--n", "256"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["collapse"]["radius_decreasing"] == true);
    CHECK(j["divergence_flags"][0] == "h_minus1_growth");
    write_text_file(file("collapse.json"), r.out);
    const auto csv = cli({"report", "--in", file("collapse.json"), "--kind", "collapse"});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("t,support_radius,support_radius_exact,h_minus1\n0,1,1,", 0) == 0);
    CHECK(cli({"collapse", "--p", "1"}).code == 2);
}
