#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "app/experiment.hpp"
#include "common/error.hpp"
#include "support/temp_dir.hpp"

using namespace nd::app;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny() {
    auto c = *builtin_config("demo");
    c.synth.duration_s = 240.0;
    c.synth.n_events = 3;
    c.training.epochs = 5;
    c.sweep.window_lens = {10};
    c.sweep.hidden_sizes = {2};
    c.freqmap.freqs_hz = {13.0};
    c.freqmap.amps_uv = {20.0};
    c.freqmap.repeats = 1;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> listing(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_CASE("output directory precedence: flag, config, environment, default") {
    ExperimentConfig c;
    ::unsetenv(kOutputDirEnv);
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("nd_out"));
    ::setenv(kOutputDirEnv, "/env", 1);
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("/env"));
    c.output_dir = "/cfg";
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("/cfg"));
    CHECK(resolve_output_dir(c, fs::path("/flag")) == fs::path("/flag"));
    ::unsetenv(kOutputDirEnv);
}

TEST_CASE("gen writes a recording with embedded provenance and no staging leftovers") {
    nd::test::TempDir dir;
    const auto r = run_command(tiny(), "gen", dir.path());
    REQUIRE(r.artifacts.size() == 3);
    CHECK(listing(dir.path()) == std::vector<std::string>{"recording.events.csv", "recording.f32", "recording.hdr"});
    const auto hdr = slurp(dir / "recording.hdr");
    CHECK_THAT(hdr, Catch::Matchers::ContainsSubstring("# seed = 1"));
    CHECK_THAT(hdr, Catch::Matchers::ContainsSubstring("duration_s = 240"));
}

TEST_CASE("every text artifact embeds the seed and resolved config") {
    nd::test::TempDir dir;
    auto c = tiny();
    c.seed = 5;
    for (const char* cmd : {"train", "sweep", "freqmap", "resources", "compare"}) {
        const auto r = run_command(c, cmd, dir.path());
        for (const auto& a : r.artifacts) {
            const auto body = slurp(a);
            INFO(a);
            if (a.extension() == ".json") {
                const auto j = nlohmann::json::parse(body);
                CHECK(j["seed"] == 5);
                CHECK_THAT(j["config"].get<std::string>(), Catch::Matchers::ContainsSubstring("[training]"));
            } else {
                CHECK_THAT(body, Catch::Matchers::ContainsSubstring("# seed = 5"));
                CHECK_THAT(body, Catch::Matchers::ContainsSubstring("[training]"));
            }
        }
    }
    for (const auto& name : listing(dir.path())) CHECK_FALSE(name.starts_with(".staging"));
}

TEST_CASE("compare report holds two ROC curves and both histogram kinds") {
    nd::test::TempDir dir;
    run_command(tiny(), "compare", dir.path());
    for (const char* n : {"filter", "mlp"}) {
        CHECK(fs::exists(dir / ("roc_" + std::string(n) + ".csv")));
        CHECK(fs::exists(dir / ("latency_hist_" + std::string(n) + ".csv")));
        CHECK(fs::exists(dir / ("overlap_hist_" + std::string(n) + ".csv")));
    }
    const auto j = nlohmann::json::parse(slurp(dir / "compare_report.json"));
    REQUIRE(j["classifiers"].size() == 3);
    CHECK(j["comparison"].contains("mlp_consensus_faster_than_filter"));
    for (const auto& c : j["classifiers"]) {
        CHECK(c["auc"].get<double>() >= 0.0);
        CHECK(c["auc"].get<double>() <= 1.0);
    }
}

TEST_CASE("invalid configs fail before any work and leave nothing behind") {
    nd::test::TempDir dir;
    auto c = tiny();
    c.window_len = 40;
    CHECK_THROWS_WITH(run_command(c, "train", dir.path()), Catch::Matchers::ContainsSubstring("[training] window_len"));
    CHECK(listing(dir.path()).empty());
    CHECK_THROWS_AS(run_command(tiny(), "bogus", dir.path()), nd::Error);
    CHECK_THROWS_AS(run_command(tiny(), "eval", dir.path(), "svm"), nd::Error);
    CHECK_THROWS_AS(run_command(tiny(), "train", dir.path(), "filter"), nd::Error);
    CHECK(listing(dir.path()).empty());
}

TEST_CASE("a failure mid-command leaves earlier artifacts untouched") {
    nd::test::TempDir dir;
    run_command(tiny(), "gen", dir.path());
    const auto before = slurp(dir / "recording.f32");
    auto c = tiny();
    c.model_path = dir / "missing_model.ini";
    CHECK_THROWS(run_command(c, "eval", dir.path(), "mlp"));
    CHECK(listing(dir.path()) == std::vector<std::string>{"recording.events.csv", "recording.f32", "recording.hdr"});
    CHECK(slurp(dir / "recording.f32") == before);
}

TEST_CASE("a saved model drives eval through [paths] model") {
    nd::test::TempDir dir;
    run_command(tiny(), "train", dir.path());
    auto c = tiny();
    c.model_path = dir / "mlp_q8.ini";
    const auto r = run_command(c, "eval", dir.path(), "mlp_q8_consensus");
    CHECK(fs::exists(dir / "eval_mlp_q8_consensus.json"));
    CHECK(r.artifacts.size() == 5);
}

TEST_CASE("sweep writes one row per grid cell") {
    nd::test::TempDir dir;
    auto c = tiny();
    c.sweep.window_lens = {5, 10};
    c.sweep.hidden_sizes = {2, 4};
    run_command(c, "sweep", dir.path());
    std::istringstream in(slurp(dir / "loss_surface.csv"));
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.starts_with("#") && !line.starts_with("window_len")) ++rows;
    CHECK(rows == 4);
}
