#include "ecolens/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ecolens/accuracy.hpp"
#include "ecolens/filters.hpp"
#include "ecolens/protocol.hpp"
#include "ecolens/scene.hpp"
#include "ecolens/svg.hpp"

namespace ecolens::cmd {

namespace fs = std::filesystem;

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("ECOLENS_OUT_DIR")) return env;
    return "out";
}

std::filesystem::path pareto_companion_path(const std::filesystem::path& out_csv) {
    fs::path p = out_csv;
    p.replace_extension(".pareto.csv");
    return p;
}

namespace {

std::vector<ProfileRecord> front_records(const std::vector<ProfileRecord>& records) {
    std::vector<ObjectivePoint> pts;
    pts.reserve(records.size());
    for (const auto& r : records) pts.push_back({r.accuracy, r.power_w});
    const auto front = pareto_front(pts);
    std::vector<ProfileRecord> out;
    for (const auto& p : front) {
        for (const auto& r : records) {
            if (r.accuracy == p.accuracy && r.power_w == p.power_w) {
                out.push_back(r);
                break;  // one representative per front point
            }
        }
    }
    return out;
}

int fail(const std::string& message) {
    std::cerr << "ecolens: " << message << "\n";
    return 1;
}

}  // namespace

int cmd_profile(const ProfileOptions& options) {
    try {
        if (options.regime < 0.0 || options.regime > 1.0)
            return fail("regime must be in [0, 1]");
        const SceneModel scene = load_scene(options.scene_file);
        const auto records = offline_profile(scene, offline_grid(), options.regime);
        if (!options.out_csv.parent_path().empty())
            fs::create_directories(options.out_csv.parent_path());
        save_profile_csv(records, options.out_csv);
        save_profile_csv(front_records(records), pareto_companion_path(options.out_csv));
        std::cout << records.size() << " configurations profiled at p=" << options.regime
                  << " -> " << options.out_csv.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_run(const RunOptions& options) {
    try {
        const SceneModel scene = load_scene(options.scene_file);
        LoopParams params = options.params;
        if (!options.seed_overridden) params.seed = scene.seed;
        params.validate();

        SceneBackend backend(scene, params.seed);
        const auto profile = offline_profile(scene, offline_grid(), 0.0);
        const RunResult result = run_online(params, backend, profile, options.baseline);

        fs::create_directories(options.out_dir);
        write_trace_jsonl(result.trace, options.out_dir / "trace.jsonl");
        write_summary_json(result.summary, options.out_dir / "summary.json");
        if (options.write_plot)
            write_run_plot(result.trace, params.target_accuracy, options.out_dir / "run.svg");

        std::cout << "mean accuracy " << result.summary.mean_accuracy << ", mean power "
                  << result.summary.mean_power_w << " W, savings "
                  << result.summary.savings_pct << "% over " << result.summary.rounds
                  << " rounds (" << result.summary.switch_count << " switches)\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_eval(const EvalOptions& options) {
    try {
        const auto frames = load_frame_dir(options.frames_dir);
        if (frames.empty()) return fail("no .pgm frames in " + options.frames_dir.string());
        const auto gt = load_detections(options.gt_detections);
        const auto degraded = load_detections(options.kept_detections);

        FilterOptions fopts{options.area_change_threshold, options.edge_binarize_level};
        const auto decisions =
            filter_sequence(frames, options.feature, options.threshold, fopts);

        DetectionTrack kept;
        std::vector<int> kept_indices;
        for (const auto& d : decisions) {
            if (!d.kept) continue;
            kept_indices.push_back(d.frame_index);
            auto it = degraded.frames.find(d.frame_index);
            kept.frames[d.frame_index] =
                it != degraded.frames.end() ? it->second : std::vector<BoundingBox>{};
        }
        const int horizon = static_cast<int>(frames.size());
        const double accuracy = temporal_accuracy(gt, kept, horizon);

        nlohmann::ordered_json report;
        report["frames"] = horizon;
        report["feature"] = to_string(options.feature);
        report["threshold"] = options.threshold;
        report["kept_count"] = kept_indices.size();
        report["kept_indices"] = kept_indices;
        report["temporal_accuracy"] = accuracy;
        const std::string text = report.dump(2) + "\n";
        std::cout << text;
        if (!options.report_path.empty()) {
            std::ofstream out(options.report_path);
            if (!out) return fail("cannot write " + options.report_path.string());
            out << text;
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_pareto(const ParetoOptions& options) {
    try {
        const auto records = load_profile_csv(options.profile_csv);
        if (records.empty()) return fail("empty profile " + options.profile_csv.string());
        if (!options.out_csv.parent_path().empty())
            fs::create_directories(options.out_csv.parent_path());
        const auto front = front_records(records);
        save_profile_csv(front, options.out_csv);
        std::cout << front.size() << " front rows -> " << options.out_csv.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_serve(const ServeOptions& options, int* bound_port) {
    try {
        const SceneModel scene = load_scene(options.scene_file);
        protocol::ServerOptions server;
        server.port = options.port;
        server.params = options.params;
        if (!options.seed_overridden) server.params.seed = scene.seed;
        server.params.validate();
        server.scene = scene;
        fs::create_directories(options.out_dir);
        server.trace_path = options.out_dir / "trace.jsonl";
        server.summary_path = options.out_dir / "summary.json";
        return protocol::run_server_agent(server, bound_port);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_camera(const CameraOptionsCli& options) {
    try {
        protocol::CameraOptions camera;
        camera.host = options.host;
        camera.port = options.port;
        camera.frames_dir = options.frames_dir;
        camera.threshold = options.threshold;
        camera.bitrate_kbps = options.bitrate_kbps;
        camera.seed = options.seed;
        return protocol::run_camera_agent(camera);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

}  // namespace ecolens::cmd
