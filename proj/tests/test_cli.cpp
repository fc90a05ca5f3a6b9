#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ecolens/accuracy.hpp"
#include "ecolens/commands.hpp"
#include "ecolens/filters.hpp"
#include "ecolens/scene.hpp"

using namespace ecolens;
namespace fs = std::filesystem;

namespace {

const fs::path kScene = ECOLENS_DATA_DIR "/default_scene.json";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 30-frame corpus: a 10x10 square marches right by 2px every frame, over a
// flat background, so consecutive pixel diffs are identical and nonzero.
void write_corpus(const fs::path& dir, DetectionTrack& gt) {
    constexpr int w = 80, h = 40, n = 30;
    for (int i = 0; i < n; ++i) {
        Frame f{w, h, std::vector<std::uint8_t>(w * h, 16)};
        const int x0 = 2 + 2 * i;
        for (int y = 10; y < 20; ++y)
            for (int x = x0; x < x0 + 10; ++x) f.pixels[y * w + x] = 230;
        char name[16];
        std::snprintf(name, sizeof name, "f%04d.pgm", i);
        save_pgm(f, dir / name);
        gt.frames[i] = {{double(x0), 10.0, double(x0 + 10), 20.0}};
    }
}

}  // namespace

TEST_CASE("cmd_profile writes 1452 rows plus a pareto companion") {
    const fs::path dir = fresh_dir("ecolens_cli_profile");
    cmd::ProfileOptions options{kScene, 0.0, dir / "profile.csv"};
    REQUIRE(cmd::cmd_profile(options) == 0);

    const auto records = load_profile_csv(dir / "profile.csv");
    CHECK(records.size() == 1452);
    const auto front = load_profile_csv(cmd::pareto_companion_path(dir / "profile.csv"));
    CHECK(!front.empty());
    for (const auto& r : front) {
        CHECK(r.config.cpu_ghz == 1.5);
        CHECK(r.config.filter == FilterFeature::Pixel);
    }
    // rerun is byte-identical
    const std::string before = slurp(dir / "profile.csv");
    REQUIRE(cmd::cmd_profile(options) == 0);
    CHECK(slurp(dir / "profile.csv") == before);

    cmd::ProfileOptions bad = options;
    bad.scene_file = "/nonexistent.json";
    CHECK(cmd::cmd_profile(bad) != 0);
    bad = options;
    bad.regime = 2.0;
    CHECK(cmd::cmd_profile(bad) != 0);
}

TEST_CASE("cmd_pareto extracts a front from any profile CSV") {
    const fs::path dir = fresh_dir("ecolens_cli_pareto");
    cmd::ProfileOptions options{kScene, 1.0, dir / "night.csv"};
    REQUIRE(cmd::cmd_profile(options) == 0);
    REQUIRE(cmd::cmd_pareto({dir / "night.csv", dir / "front.csv"}) == 0);
    const auto front = load_profile_csv(dir / "front.csv");
    CHECK(!front.empty());
    CHECK(front.size() < 1452);
    for (const auto& r : front) CHECK(r.config.cpu_ghz == 1.5);
    CHECK(cmd::cmd_pareto({dir / "missing.csv", dir / "x.csv"}) != 0);
}

TEST_CASE("cmd_run writes trace, summary and plot deterministically") {
    const fs::path a = fresh_dir("ecolens_cli_run_a");
    const fs::path b = fresh_dir("ecolens_cli_run_b");
    cmd::RunOptions options;
    options.scene_file = kScene;
    options.params.total_duration_s = 130.0;
    options.out_dir = a;
    REQUIRE(cmd::cmd_run(options) == 0);
    options.out_dir = b;
    REQUIRE(cmd::cmd_run(options) == 0);

    CHECK(slurp(a / "trace.jsonl") == slurp(b / "trace.jsonl"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "run.svg") == slurp(b / "run.svg"));

    // --no-plot omits the SVG
    const fs::path c = fresh_dir("ecolens_cli_run_c");
    options.out_dir = c;
    options.write_plot = false;
    REQUIRE(cmd::cmd_run(options) == 0);
    CHECK_FALSE(fs::exists(c / "run.svg"));
    CHECK(fs::exists(c / "trace.jsonl"));

    // a different seed changes the trace
    const fs::path d = fresh_dir("ecolens_cli_run_d");
    options.out_dir = d;
    options.params.seed = 123;
    options.seed_overridden = true;
    REQUIRE(cmd::cmd_run(options) == 0);
    CHECK(slurp(a / "trace.jsonl") != slurp(d / "trace.jsonl"));
}

TEST_CASE("cmd_eval matches a file-level carry-forward oracle") {
    const fs::path dir = fresh_dir("ecolens_cli_eval");
    DetectionTrack gt;
    write_corpus(dir, gt);
    save_detections(gt, dir / "gt.jsonl");

    // degraded detections: drop every third frame's boxes, nudge the rest
    DetectionTrack degraded;
    for (const auto& [i, boxes] : gt.frames) {
        if (i % 3 == 2) {
            degraded.frames[i] = {};
            continue;
        }
        auto nudged = boxes;
        for (auto& b : nudged) {
            b.x1 += 1.0;
            b.x2 += 1.0;
        }
        degraded.frames[i] = nudged;
    }
    save_detections(degraded, dir / "kept.jsonl");

    cmd::EvalOptions options;
    options.frames_dir = dir;
    options.gt_detections = dir / "gt.jsonl";
    options.kept_detections = dir / "kept.jsonl";
    options.feature = FilterFeature::Pixel;
    options.report_path = dir / "report.json";

    // threshold 0: everything kept, so the score is the full-track accuracy
    options.threshold = 0.0;
    REQUIRE(cmd::cmd_eval(options) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["kept_count"] == 30);
    CHECK(report["temporal_accuracy"].get<double>() ==
          doctest::Approx(temporal_accuracy(gt, degraded, 30)).epsilon(1e-12));

    // gt == kept with everything kept scores 1.0
    options.kept_detections = dir / "gt.jsonl";
    REQUIRE(cmd::cmd_eval(options) == 0);
    report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["temporal_accuracy"].get<double>() == 1.0);

    // a threshold that drops frames: compare against a hand-rolled oracle
    // over the same files
    options.kept_detections = dir / "kept.jsonl";
    const auto frames = load_frame_dir(dir);
    const double step_diff = pixel_diff(frames[0], frames[1]);
    options.threshold = step_diff + 1e-6;  // drops every frame except 0
    REQUIRE(cmd::cmd_eval(options) == 0);
    report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["kept_count"] == 1);
    DetectionTrack only_first;
    only_first.frames[0] = degraded.frames.at(0);
    CHECK(report["temporal_accuracy"].get<double>() ==
          doctest::Approx(temporal_accuracy(gt, only_first, 30)).epsilon(1e-12));

    // corrupt input reports failure
    std::ofstream(dir / "bad.jsonl") << "not json\n";
    options.gt_detections = dir / "bad.jsonl";
    CHECK(cmd::cmd_eval(options) != 0);
}

TEST_CASE("cli binary: help and bad usage exit codes") {
    const std::string cli = ECOLENS_CLI_PATH;
    CHECK(std::system((cli + " --help > /dev/null").c_str()) == 0);
    for (const char* sub : {"profile", "run", "eval", "pareto", "serve", "camera"})
        CHECK(std::system((cli + " " + sub + " --help > /dev/null").c_str()) == 0);
    CHECK(std::system((cli + " profile > /dev/null 2>&1").c_str()) != 0);  // missing --out
    CHECK(std::system((cli + " camera --port 1 --host 127.0.0.1 > /dev/null 2>&1").c_str()) != 0);
}
