#include "sensei/cli.hpp"
#include "sensei/graph.hpp"
#include "sensei/selector.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sensei;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "sensei_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

/// Model trained on groups where dynamic always wins.
std::string dynamic_always_model()
{
    std::vector<ProfileRecord> recs;
    for (int g = 0; g < 20; ++g)
        for (Composition c : candidates(GnnModel::Gcn)) {
            ProfileRecord r;
            r.graph_id = "g" + std::to_string(g);
            r.features = extract_features(gen::uniform(50 + 10 * g, 3, g));
            r.model = GnnModel::Gcn;
            r.k1 = 16 << (g % 3);
            r.k2 = 16 << (g % 5);
            r.composition = c;
            r.iterations = 3;
            r.median_time_s = c == Composition::Dynamic ? 1.0 : 2.0;
            recs.push_back(r);
        }
    const auto path = scratch("dynamic.model").string();
    save_model(train(recs, GnnModel::Gcn, plain_system_params()).model, path);
    return path;
}

} // namespace

TEST_CASE("cli: featurize star-5")
{
    const auto r = call({"featurize", "--graph", "gen:star:5"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("n_rows") == 5);
    CHECK(j.at("n_nnzs") == 8);
    CHECK(j.at("d_min") == 1);
    CHECK(j.at("d_max") == 4);
    CHECK(j.at("nnz_mean").get<double>() == doctest::Approx(1.6));
    CHECK(j.at("d_dentr").get<double>() == doctest::Approx(0.7219281).epsilon(1e-7));
    CHECK(j.at("e_dentr").get<double>() == doctest::Approx(0.861353).epsilon(1e-6));
    CHECK(call({"featurize", "--graph", "gen:star:5", "--seed", "3"}).code != 0); // featurize takes no seed
}

TEST_CASE("cli: fixed compositions agree on the checksum")
{
    std::map<std::string, double> sums;
    for (const std::string c : {"precompute", "dynamic"}) {
        const auto r = call({"run", "--graph", "gen:powerlaw:500:6:2.3:1", "--k1", "16", "--k2", "8", "--composition", c, "--reps", "2", "--seed", "9"});
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        CHECK(j.at("composition") == c);
        sums[c] = j.at("checksum").get<double>();
    }
    CHECK(sums["precompute"] == doctest::Approx(sums["dynamic"]).epsilon(1e-9));

    for (const std::string c : {"reuse", "recompute"}) {
        const auto r = call({"run", "--graph", "gen:grid:8x8", "--model", "gat", "--k1", "4", "--k2", "8", "--composition", c, "--reps", "2"});
        REQUIRE(r.code == 0);
        sums[c] = json::parse(r.out).at("checksum").get<double>();
    }
    CHECK(sums["reuse"] == doctest::Approx(sums["recompute"]).epsilon(1e-9));
}

TEST_CASE("cli: auto selection with a dynamic-always model")
{
    const auto model = dynamic_always_model();
    const auto r = call({"run", "--graph", "gen:grid:20x20", "--k1", "32", "--k2", "256", "--composition", "auto", "--model-file", model, "--reps", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("composition") == "dynamic");
    CHECK(j.at("selected_by") == "model");
    CHECK(j.at("selection_overhead_s").get<double>() > 0);
    CHECK(j.at("times").contains("feature_extraction_s"));

    const auto s = call({"select", "--model-file", model, "--graph", "gen:star:30", "--k1", "1024", "--k2", "32"});
    REQUIRE(s.code == 0);
    CHECK(json::parse(s.out).at("composition") == "dynamic");

    CHECK(call({"run", "--graph", "gen:grid:4x4", "--model", "gat", "--composition", "auto", "--model-file", model}).code == cli::Schema);
}

TEST_CASE("cli: profile, train and select pipeline")
{
    const auto profiles = scratch("profiles.ndjson").string();
    auto r = call({"profile", "--graphs", "gen:grid:6x6,gen:star:20", "--model", "gcn", "--sizes", "4:4,4:8", "--reps", "3",
                   "--warmup", "0", "--out", profiles, "--hw", "1,2"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("records") == 8);
    // four groups are too few to train on
    r = call({"train", "--profiles", profiles, "--model", "gcn", "--out", scratch("few.model").string()});
    CHECK(r.code == cli::InsufficientData);
    CHECK(r.err.find("usable groups") != std::string::npos);
    r = call({"train", "--profiles", profiles, "--model", "gcn", "--out", scratch("ok.model").string(), "--min-groups", "4"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("groups") == 4);
    r = call({"select", "--model-file", scratch("ok.model").string(), "--graph", "gen:grid:6x6", "--k1", "4", "--k2", "4", "--hw", "1,2"});
    REQUIRE(r.code == 0);
    r = call({"select", "--model-file", scratch("ok.model").string(), "--graph", "gen:grid:6x6", "--k1", "4", "--k2", "4"});
    CHECK(r.code == cli::Schema);
}

TEST_CASE("cli: errors map to exit codes")
{
    CHECK(call({}).code == cli::Usage);
    CHECK(call({"bogus"}).code == cli::Usage);
    CHECK(call({"featurize"}).code == cli::Usage);
    CHECK(call({"featurize", "--graph", "/nonexistent.mtx"}).code == cli::Input);
    const auto r = call({"run", "--graph", "gen:grid:4x4", "--composition", "auto"});
    CHECK(r.code != 0);
    CHECK_FALSE(r.err.empty());
    CHECK(r.out.empty());
    CHECK(call({"run", "--graph", "gen:grid:4x4", "--composition", "reuse"}).code != 0);
    CHECK(call({"run", "--graph", "gen:grid:4x4", "--composition", "auto", "--model-file", "/nonexistent"}).code == cli::Input);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("cli: generate and read back")
{
    const auto path = scratch("g.mtx").string();
    REQUIRE(call({"generate", "--graph", "gen:powerlaw:100:4:2.5:2", "--out", path}).code == 0);
    const auto a = json::parse(call({"featurize", "--graph", path}).out);
    const auto b = json::parse(call({"featurize", "--graph", "gen:powerlaw:100:4:2.5:2"}).out);
    CHECK(a == b);
}

TEST_CASE("cli: non-timing outputs are deterministic")
{
    auto strip = [](json j) {
        j.erase("times");
        j.erase("selection_overhead_iterations");
        j.erase("selection_overhead_s");
        return j;
    };
    const std::vector<std::string> args{"run", "--graph", "gen:uniform:300:5:4", "--k1", "8", "--k2", "16", "--composition", "dynamic", "--reps", "2", "--seed", "5"};
    CHECK(strip(json::parse(call(args).out)) == strip(json::parse(call(args).out)));
    CHECK(call({"featurize", "--graph", "gen:powerlaw:400:8:2.3:7"}).out == call({"featurize", "--graph", "gen:powerlaw:400:8:2.3:7"}).out);
}

TEST_CASE("cli: bench on three bundled graphs within a minute")
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = call({"bench", "--graphs", "gen:path:4000,gen:star:4000,gen:grid:64x64", "--reps", "3"});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(r.code == 0);
    CHECK(secs < 60.0);
    const auto j = json::parse(r.out);
    CHECK(j.at("results").size() == 3 * 3);
    const auto opt = call({"bench", "--graphs", "gen:grid:16x16", "--model", "gcn", "--sizes", "8:8", "--opt", "--budget", "3", "--reps", "2"});
    REQUIRE(opt.code == 0);
    CHECK(json::parse(opt.out).at("results")[0].contains("tuning"));
    const auto tune = call({"tune", "--graph", "gen:grid:16x16", "--k", "8", "--budget", "2", "--reps", "2"});
    REQUIRE(tune.code == 0);
    CHECK(json::parse(tune.out).at("timed").size() == 2);
}
